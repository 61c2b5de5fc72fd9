"""Time refinement of the PowerLog / variable-exponent configuration.

Prints, per K, the energy-identity residual, the space-time modulars of the
rate, of A(rate) and of eta, and the largest energy-inequality slack. With
--csv the table is also written to a file.

    python3 scripts/refinement_study.py --k-list 16,32,64,128,256
"""
import argparse
import csv
import time

import numpy as np

from orliczflow.stepper import energy_identity_report, max_regularity_report, solve
from orliczflow.verify import nonlinear_problem


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--k-list", default="32,64,128")
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()
    ks = [int(k) for k in args.k_list.split(",")]

    header = ["K", "identity_total", "rho_rate_Q", "rho_conj_A_Q", "rho_conj_eta_Q", "max_slack", "seconds"]
    rows = []
    for K in ks:
        t0 = time.perf_counter()
        traj = solve(nonlinear_problem(K, n=args.n))
        dt = time.perf_counter() - t0
        rows.append([K, energy_identity_report(traj)[1], *max_regularity_report(traj),
                     float(np.max(traj.ineq_slack)), dt])

    print("  ".join(f"{h:>14s}" for h in header))
    for r in rows:
        print(f"{r[0]:>14d}  " + "  ".join(f"{v:14.6e}" for v in r[1:]))
    totals = [r[1] for r in rows]
    if len(totals) > 1:
        rates = np.log2(np.array(totals[:-1]) / np.array(totals[1:]))
        print("observed order of the identity residual:", np.round(rates, 3).tolist())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows([[f"{v:.17g}" if isinstance(v, float) else v for v in r] for r in rows])


if __name__ == "__main__":
    main()
