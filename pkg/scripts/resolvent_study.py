"""Resolvent convergence as lambda -> 0 for a quadratic and a nonlinear pair (phi, E).

    python3 scripts/resolvent_study.py
"""
import numpy as np

from orliczflow.energies import Energy
from orliczflow.grid import make_grid, node_profile
from orliczflow.modular import ModularSpace
from orliczflow.phi import PhiFunction
from orliczflow.proximal import ProximalOperator, resolvent_convergence


def table(P, u):
    rows = resolvent_convergence(P, u)
    print(f"{'lambda':>10s} {'|J u - u|':>12s} {'ratio':>7s} {'E(J u)':>12s} {'E_lam(u)':>12s} {'E(u)':>12s}")
    prev = None
    for r in rows:
        ratio = "" if prev is None else f"{r['distance'] / prev:7.3f}"
        print(f"{r['lambda']:10.3e} {r['distance']:12.5e} {ratio:>7s} {r['E_J']:12.5e} {r['E_lambda']:12.5e} "
              f"{r['E_u']:12.5e}")
        prev = r["distance"]


def main():
    g = make_grid(0.0, 1.0, 64)
    u = 0.1 * np.sin(np.pi * g.nodes)
    print("phi = r^2/2, m = 2")
    table(ProximalOperator(ModularSpace(g, PhiFunction.power(2.0)), Energy.m_laplacian(g, 2.0)), u)
    print("\nphi = r^2 log(1+r)/2, m ramp 1.8 -> 2.5")
    E = Energy.m_laplacian(g, node_profile({"ramp": [1.8, 2.5]}, g))
    table(ProximalOperator(ModularSpace(g, PhiFunction.power_log(2.0, 1.0)), E), u)


if __name__ == "__main__":
    main()
