"""The N-function r log^2(1+r) and its conjugate.

1. Luxemburg norms of k_n on a cell of measure 1/(n log^2(1+n)), k_n = n log(1+n),
   compared with log(1+n).
2. Running doubling estimates of phi and of phi* over growing ranges: the first
   settles below 8, the second blows up.

    python3 scripts/log_squared_counterexample.py
"""
import math

import numpy as np

from orliczflow.grid import Grid
from orliczflow.modular import ModularSpace
from orliczflow.phi import PhiFunction, delta2_diverges, delta2_profile


def main():
    phi = PhiFunction.from_expression("r*log(1+r)**2")
    print(f"{'n':>8s} {'norm':>20s} {'log(1+n)':>20s} {'abs err':>10s}")
    for n in (10, 100, 1000, 10 ** 4, 10 ** 5):
        L = math.log1p(n)
        E = 1.0 / (n * L * L)
        space = ModularSpace(Grid.with_weights([E, 1 - E]), phi, validate=False)
        nrm = space.norm(np.array([n * L, 0.0]))
        print(f"{n:8d} {nrm:20.15f} {L:20.15f} {abs(nrm - L):10.2e}")

    print("\nrunning doubling estimates (sup of f(2r)/f(r) up to r_max)")
    p_prof = delta2_profile(phi, r_min=1e-3, r_max=1e6)
    c_prof = delta2_profile(phi.conjugate, r_min=1e-3, r_max=1e3)
    print(f"{'r_max':>10s} {'phi':>12s}")
    for top, k in p_prof:
        print(f"{top:10.0e} {k:12.6g}")
    print(f"{'r_max':>10s} {'phi*':>12s}")
    for top, k in c_prof:
        print(f"{top:10.0e} {k:12.6g}")
    print("phi* doubling estimate diverges:", delta2_diverges(c_prof))


if __name__ == "__main__":
    main()
