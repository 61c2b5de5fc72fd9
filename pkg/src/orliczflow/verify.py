"""Seeded property suites run by ``orliczflow verify``.

Each check returns a :class:`Check`; :func:`run_suite` prints one line per
check and reports whether all of them passed.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .energies import Energy, dirichlet_laplacian
from .grid import Grid, TimeGrid, make_grid, node_profile
from .modular import ModularSpace, holder_check
from .phi import (PhiFunction, common_doubling_constant, delta2_constant, delta2_diverges, delta2_profile,
                  doubling_infimum, k0_lower_bound, validate_assumption_alpha)
from .proximal import ProximalOperator, resolvent, resolvent_convergence
from .stepper import Mode, Nonlinearity, Problem, ZeroSource, sinusoidal_source, solve, verify_hp_M

SUITES = ("phi", "modular", "prox", "stepper")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<34s} {self.detail}"


def builtin_families(grid: Grid) -> dict[str, PhiFunction]:
    """The built-in phi families used by the suites, one variable-exponent member included."""
    return {
        "power(1.5)": PhiFunction.power(1.5),
        "power(2)": PhiFunction.power(2.0),
        "power(3)": PhiFunction.power(3.0),
        "power(ramp 1.5-3)": PhiFunction.power(node_profile({"ramp": [1.5, 3.0]}, grid)),
        "power_log(2,1)": PhiFunction.power_log(2.0, 1.0),
        "power_log(ramp 1.8-2.5,1)": PhiFunction.power_log(node_profile({"ramp": [1.8, 2.5]}, grid), 1.0),
        "two_power(1.5,3)": PhiFunction.two_power(1.5, 3.0),
    }


def random_grid_function(rng: np.random.Generator, n: int) -> np.ndarray:
    """Nonzero sample spread over several orders of magnitude."""
    while True:
        v = rng.standard_normal(n) * 10.0 ** rng.uniform(-3, 3)
        if np.any(v):
            return v


def _closed_form(phi: PhiFunction) -> bool:
    return phi.kind.value == "power" and phi.conjugate_mode.value == "closed_form"


def _log_squared() -> PhiFunction:
    return PhiFunction.from_expression("r*log(1+r)**2")


# ---------------------------------------------------------------------------
# phi


def check_fenchel(seed: int, samples: int = 100, n: int = 32) -> list[Check]:
    """<A u, u> = rho(u) + rho*(A u) on random grid functions."""
    grid = make_grid(0.0, 1.0, n)
    out = []
    for name, phi in builtin_families(grid).items():
        rng = np.random.default_rng(seed)
        space = ModularSpace(grid, phi, validate=False)
        tol = 1e-8 if _closed_form(phi) else 1e-4
        worst = 0.0
        for _ in range(samples):
            u = random_grid_function(rng, n)
            A = space.A(u)
            lhs = grid.pairing(A, u)
            rhs = space.modular(u) + space.dual_modular(A)
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
        out.append(Check(f"fenchel equality {name}", worst <= tol, f"max rel err {worst:.2e} (tol {tol:g})"))
    return out


def check_young(seed: int, samples: int = 200) -> list[Check]:
    """phi(r) + phi*(s) >= r s for random scalar pairs."""
    out = []
    grid = make_grid(0.0, 1.0, 1)
    for name, phi in builtin_families(grid).items():
        rng = np.random.default_rng(seed)
        r = 10.0 ** rng.uniform(-4, 4, samples)
        s = 10.0 ** rng.uniform(-4, 4, samples)
        gap = (phi.value(r) + phi.conjugate.value(s) - r * s) / (r * s)
        out.append(Check(f"young inequality {name}", bool(np.min(gap) >= -1e-10), f"min rel gap {np.min(gap):.2e}"))
    return out


def check_doubling() -> list[Check]:
    out = []
    for p in (1.5, 2.0, 3.0):
        K = delta2_constant(PhiFunction.power(p), r_max=1e6)
        err = abs(K / 2 ** p - 1)
        out.append(Check(f"doubling constant power({p})", err <= 0.01, f"K={K:.6g}, 2^p={2 ** p:.6g}"))
    grid = make_grid(0.0, 1.0, 16)
    for name, phi in builtin_families(grid).items():
        K = common_doubling_constant(phi)
        lo, inf = k0_lower_bound(K), doubling_infimum(phi, r_max=1e6)
        out.append(Check(f"super-doubling bound {name}", lo <= inf, f"2+1/(K-2)={lo:.6g} <= inf ratio {inf:.6g}"))
    prof = delta2_profile(_log_squared().conjugate, r_min=1e-3, r_max=1e3)
    out.append(Check("doubling divergence of r log^2(1+r) conjugate", delta2_diverges(prof),
                     f"running estimate {prof[-2][1]:.3g} -> {prof[-1][1]:.3g}"))
    return out


def check_structural() -> list[Check]:
    grid = make_grid(0.0, 1.0, 16)
    out = []
    for name, phi in builtin_families(grid).items():
        rep = validate_assumption_alpha(phi)
        out.append(Check(f"structural checks {name}", rep.passed, ", ".join(rep.failures()) or "all verdicts hold"))
    rep = validate_assumption_alpha(_log_squared())
    ok = rep.failures() == ["delta2_conjugate"]
    out.append(Check("structural rejection r log^2(1+r)", ok, f"failed verdicts: {rep.failures()}"))
    return out


def suite_phi(seed: int) -> list[Check]:
    return check_structural() + check_young(seed) + check_fenchel(seed) + check_doubling()


# ---------------------------------------------------------------------------
# modular


def check_unit_ball(seed: int, samples: int = 100, n: int = 32) -> list[Check]:
    grid = make_grid(0.0, 1.0, n)
    out = []
    for name, phi in builtin_families(grid).items():
        rng = np.random.default_rng(seed)
        space = ModularSpace(grid, phi, validate=False)
        worst = 0.0
        for _ in range(samples):
            u = random_grid_function(rng, n)
            worst = max(worst, abs(space.modular(u / space.norm(u)) - 1.0))
        out.append(Check(f"unit ball {name}", worst <= 1e-8, f"max |rho(u/|u|)-1| {worst:.2e}"))
    return out


def two_cell_norm(n: int) -> float:
    """Luxemburg norm of k_n on a cell of measure 1/(n log^2(1+n)) for phi = r log^2(1+r)."""
    L = math.log1p(n)
    E = 1.0 / (n * L * L)
    space = ModularSpace(Grid.with_weights([E, 1.0 - E]), _log_squared(), validate=False)
    return space.norm(np.array([n * L, 0.0]))


def check_two_cell() -> list[Check]:
    out = []
    for n in (10, 100, 1000):
        got = two_cell_norm(n)
        want = math.log1p(n)
        out.append(Check(f"two-cell norm n={n}", abs(got - want) <= 1e-6, f"{got:.12g} vs log(1+n)={want:.12g}"))
    return out


def check_holder(seed: int, samples: int = 50, n: int = 32) -> list[Check]:
    grid = make_grid(0.0, 1.0, n)
    out = []
    for name, phi in builtin_families(grid).items():
        rng = np.random.default_rng(seed)
        space = ModularSpace(grid, phi, validate=False)
        ok = True
        for _ in range(samples):
            lhs, rhs = holder_check(space, random_grid_function(rng, n), random_grid_function(rng, n))
            ok &= lhs <= rhs * (1 + 1e-10)
        out.append(Check(f"holder inequality {name}", ok))
    return out


def suite_modular(seed: int) -> list[Check]:
    return check_unit_ball(seed) + check_two_cell() + check_holder(seed)


# ---------------------------------------------------------------------------
# prox


def quadratic_operator(n: int = 64) -> ProximalOperator:
    grid = make_grid(0.0, 1.0, n)
    return ProximalOperator(ModularSpace(grid, PhiFunction.power(2.0)), Energy.m_laplacian(grid, 2.0))


def check_quadratic_resolvent(seed: int) -> Check:
    """With phi = r^2/2 and E the Dirichlet energy, J_lam u = (I + lam L)^{-1} u."""
    P = quadratic_operator()
    grid = P.space.grid
    rng = np.random.default_rng(seed)
    L = dirichlet_laplacian(grid)
    worst = 0.0
    for lam in (1.0, 1e-2, 1e-4):
        u = rng.standard_normal(grid.n)
        ref = np.linalg.solve(np.eye(grid.n) + lam * L, u)
        worst = max(worst, np.max(np.abs(resolvent(P, lam, u) - ref)))
    return Check("quadratic resolvent oracle", worst <= 1e-8, f"max diff {worst:.2e}")


def check_my_sandwich() -> list[Check]:
    P = quadratic_operator()
    x = P.space.grid.nodes
    u = 0.1 * np.sin(np.pi * x)
    rows = resolvent_convergence(P, u)
    sandwich = all(r["E_J"] <= r["E_lambda"] <= r["E_u"] + 1e-10 for r in rows)
    d = [r["distance"] for r in rows]
    mono = all(b < a for a, b in zip(d, d[1:]))
    out = [Check("moreau-yosida sandwich", sandwich, f"{len(rows)} values of lambda"),
           Check("resolvent distance decreasing", mono, f"{d[0]:.3e} -> {d[-1]:.3e}"),
           Check("resolvent convergence", d[-1] <= 1e-3, f"|J u - u| = {d[-1]:.3e} at lambda={rows[-1]['lambda']:g}")]
    grid = P.space.grid
    nl = ProximalOperator(ModularSpace(grid, PhiFunction.power_log(2.0, 1.0)),
                          Energy.m_laplacian(grid, node_profile({"ramp": [1.8, 2.5]}, grid)))
    rows = resolvent_convergence(nl, u)
    res = max(r["inclusion_residual"] for r in rows)
    out.append(Check("resolvent inclusion residual", res <= 1e-12, f"max {res:.2e}"))
    out.append(Check("moreau-yosida sandwich nonlinear",
                     all(r["E_J"] <= r["E_lambda"] <= r["E_u"] + 1e-10 for r in rows)))
    return out


def suite_prox(seed: int) -> list[Check]:
    return [check_quadratic_resolvent(seed)] + check_my_sandwich()


# ---------------------------------------------------------------------------
# stepper


def heat_problem(n: int = 64, K: int = 64) -> Problem:
    grid = make_grid(0.0, 1.0, n)
    return Problem(ModularSpace(grid, PhiFunction.power(2.0)), Energy.m_laplacian(grid, 2.0), TimeGrid(1.0, K),
                   np.sin(np.pi * grid.nodes), ZeroSource(n))


def heat_oracle_error(prob: Problem, traj) -> float:
    """Max nodal difference against implicit Euler with the three-point Laplacian."""
    L = dirichlet_laplacian(prob.grid)
    M = np.eye(prob.grid.n) + prob.tg.tau * L
    u, worst = prob.u0.copy(), 0.0
    for k in range(1, prob.tg.K + 1):
        u = np.linalg.solve(M, u)
        worst = max(worst, float(np.max(np.abs(u - traj.us[k]))))
    return worst


def nonlinear_problem(K: int, n: int = 64, mode=Mode.SUBDIFFERENTIAL, beta=None) -> Problem:
    """PowerLog(2,1) dissipation, m ramp 1.8 -> 2.5, smooth source."""
    grid = make_grid(0.0, 1.0, n)
    space = ModularSpace(grid, PhiFunction.power_log(2.0, 1.0))
    E = Energy.m_laplacian(grid, node_profile({"ramp": [1.8, 2.5]}, grid))
    src = sinusoidal_source(np.sin(np.pi * grid.nodes), amplitude=1.0, omega=2 * np.pi, offset=1.0)
    return Problem(space, E, TimeGrid(1.0, K), np.sin(np.pi * grid.nodes), src, mode, beta)


def check_stepper() -> list[Check]:
    prob = heat_problem()
    err = heat_oracle_error(prob, solve(prob))
    out = [Check("heat equation oracle", err <= 1e-8, f"max diff {err:.2e}")]
    prob = nonlinear_problem(32)
    traj = solve(prob)
    tol = 1e-8 * (1 + traj.energy[0])
    out.append(Check("discrete energy inequality", bool(np.max(traj.ineq_slack) <= tol),
                     f"max slack {np.max(traj.ineq_slack):.2e}"))
    gen = solve(nonlinear_problem(32, mode=Mode.GENERALIZED, beta=Nonlinearity.from_phi(prob.space.phi)))
    diff = float(np.max(np.abs(gen.us - traj.us)))
    out.append(Check("generalized mode with beta = alpha", diff <= 1e-8, f"max diff {diff:.2e}"))
    # beta of the same two-power type as phi but with other coefficients
    space = ModularSpace(prob.grid, PhiFunction.two_power(1.5, 3.0))
    res = verify_hp_M(space, Nonlinearity.from_phi(PhiFunction.two_power(1.5, 3.0, a=2.0, b=0.5)))
    out.append(Check("growth conditions accept two-power beta", res.passed,
                     f"alpha0={res.alpha0:.3g}, C2={res.C2:.3g}"))
    res = verify_hp_M(space, Nonlinearity.arctan())
    out.append(Check("growth conditions reject arctan", not res.passed, "; ".join(sorted(set(res.notes)))))
    return out


def suite_stepper(seed: int) -> list[Check]:
    return check_stepper()


_SUITES: dict[str, Callable[[int], list[Check]]] = {
    "phi": suite_phi, "modular": suite_modular, "prox": suite_prox, "stepper": suite_stepper,
}


def run_suite(name: str, seed: int = 0, stream=None) -> bool:
    """Run one suite (or ``"all"``), print a line per check, return True if all pass."""
    stream = stream or sys.stdout
    names = SUITES if name == "all" else (name,)
    if any(s not in _SUITES for s in names):
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES + ('all',)}")
    ok = True
    for s in names:
        print(f"[{s}] seed={seed}", file=stream)
        for chk in _SUITES[s](seed):
            print(chk.line(), file=stream)
            ok &= chk.passed
    print("all checks passed" if ok else "some checks FAILED", file=stream)
    return ok
