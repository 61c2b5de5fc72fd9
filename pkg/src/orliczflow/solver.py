"""Damped Newton minimization of smooth convex functionals of nodal vectors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np
import scipy.linalg
import scipy.sparse as sps
import scipy.sparse.linalg as spla

_EPS = np.finfo(float).eps


class SolverError(ArithmeticError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


@dataclass(frozen=True)
class SolverConfig:
    grad_tol: float = 1e-10
    max_iters: int = 200
    hessian_floor: float = 1e-10
    shrink: float = 0.5
    decrease: float = 1e-4
    max_backtracks: int = 60

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if not 0 < self.decrease < 0.5:
            raise ValueError("decrease constant must lie in (0, 1/2)")
        if self.max_iters < 1 or self.hessian_floor < 0:
            raise ValueError("need max_iters >= 1 and hessian_floor >= 0")


@dataclass
class SolverReport:
    iterations: int
    objective: float
    grad_norm: float
    converged: bool
    message: str = ""


class Objective(Protocol):
    weights: np.ndarray

    def value(self, x) -> float: ...

    def gradient(self, x) -> np.ndarray:
        """Euclidean gradient."""

    def hessian(self, x, floor: float): ...


def weighted_grad_norm(g, weights) -> float:
    """Norm of the Riesz representative g/w in the weighted l2 pairing."""
    return float(np.sqrt(np.sum(g * g / weights)))


def _newton_direction(H, g):
    if H is None:
        return None
    try:
        if sps.issparse(H):
            d = spla.spsolve(H.tocsc(), -g)
        elif np.ndim(H) == 1:
            d = -g / H
        else:
            d = scipy.linalg.solve(H, -g, assume_a="sym")
    except (np.linalg.LinAlgError, RuntimeError, ValueError):
        return None
    if not np.all(np.isfinite(d)):
        return None
    return d


def minimize(objective, x0, cfg: SolverConfig = SolverConfig()):
    """Minimize ``objective`` from ``x0``.

    Newton steps use the objective's Hessian when it offers one (curvatures
    floored at ``cfg.hessian_floor``), otherwise weight-preconditioned gradient
    steps; both are globalized by Armijo backtracking. Returns ``(x, report)``;
    ``report.converged`` is False if ``max_iters`` runs out.
    """
    w = np.asarray(objective.weights, dtype=float)
    x = np.array(x0, dtype=float)
    f = objective.value(x)
    if not np.isfinite(f):
        raise SolverError(f"objective is not finite at the initial point ({f})")
    has_hess = callable(getattr(objective, "hessian", None))
    for it in range(cfg.max_iters + 1):
        g = objective.gradient(x)
        if not np.all(np.isfinite(g)):
            raise SolverError("gradient is not finite", SolverReport(it, f, np.nan, False, "nan gradient"))
        gn = weighted_grad_norm(g, w)
        if gn <= cfg.grad_tol:
            return x, SolverReport(it, f, gn, True, "gradient tolerance reached")
        if it == cfg.max_iters:
            break
        d = _newton_direction(objective.hessian(x, cfg.hessian_floor), g) if has_hess else None
        if d is None or g @ d >= 0:
            d = -g / w
        slope = float(g @ d)
        # once the predicted decrease is buried in the roundoff of f, values can no
        # longer rank iterates; fall back to comparing gradient norms
        noisy = abs(slope) <= 1e3 * _EPS * (1.0 + abs(f))
        t = 1.0
        accepted = False
        for _ in range(cfg.max_backtracks):
            x_new = x + t * d
            f_new = objective.value(x_new)
            if np.isnan(f_new):
                raise SolverError("objective evaluated to NaN", SolverReport(it, f, gn, False, "nan objective"))
            if f_new <= f + cfg.decrease * t * slope + 8 * _EPS * abs(f):
                accepted = True
                break
            if noisy:
                g_new = objective.gradient(x_new)
                if np.all(np.isfinite(g_new)) and weighted_grad_norm(g_new, w) < (1 - cfg.decrease * t) * gn:
                    accepted = True
                    break
            t *= cfg.shrink
        if not accepted:
            return x, SolverReport(it, f, gn, False, "line search failed")
        x, f = x_new, f_new
    return x, SolverReport(cfg.max_iters, f, gn, False, "maximum iterations reached")
