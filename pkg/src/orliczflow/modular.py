"""Discrete Musielak-Orlicz modulars, Luxemburg norms and the duality map."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, TimeGrid
from .phi import PhiFunction, validate_assumption_alpha


class NormError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class ModularSpace:
    """L^phi on a grid. The conjugate phi* is built (and cached) on construction.

    With ``validate=True`` the structural checks on phi must pass, otherwise a
    ``ValueError`` lists the failed verdicts.
    """

    grid: Grid
    phi: PhiFunction
    validate: bool = True
    conj: PhiFunction = field(init=False, repr=False)

    def __post_init__(self):
        n = self.phi.n_nodes
        if n is not None and n != self.grid.n:
            raise ValueError(f"phi has per-node parameters for {n} nodes, grid has {self.grid.n}")
        if self.validate:
            report = validate_assumption_alpha(self.phi)
            if not report.passed:
                raise ValueError(f"phi fails structural checks: {report.failures()}")
        object.__setattr__(self, "conj", self.phi.conjugate)

    def modular(self, v) -> float:
        return modular(self, v)

    def dual_modular(self, xi) -> float:
        return dual_modular(self, xi)

    def norm(self, v) -> float:
        return luxemburg_norm(self, v)

    def dual_norm(self, xi) -> float:
        return luxemburg_norm(self, xi, dual=True)

    def A(self, v) -> np.ndarray:
        return apply_A(self, v)


def modular(space: ModularSpace, v) -> float:
    """sum_i w_i phi(x_i, |v_i|)."""
    v = space.grid.check(v)
    return float(np.dot(space.grid.weights, space.phi.value(v)))


def dual_modular(space: ModularSpace, xi) -> float:
    """Modular of the conjugate, sum_i w_i phi*(x_i, |xi_i|); may be ``inf``."""
    xi = space.grid.check(xi, "xi")
    return float(np.dot(space.grid.weights, space.conj.value(xi)))


def gauge_norm(rho, v, rtol: float = 1e-13, max_steps: int = 200) -> float:
    """inf{lam > 0 : rho(v / lam) <= 1} for a modular ``rho``, by bisection in log(lam).

    The upper bracket ``rho(v) + 1`` is always admissible; the lower bracket is
    found by halving, which at least doubles a convex modular each time.
    """
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return 0.0
    m = rho(v)
    hi = m + 1.0 if np.isfinite(m) else float(np.max(np.abs(v))) * v.size * 2.0 ** 10
    while rho(v / hi) > 1.0:
        hi *= 2.0
    lo = hi
    while rho(v / lo) <= 1.0:
        hi, lo = lo, 0.5 * lo
        if lo == 0.0:
            raise NormError("lower bracket underflow")
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(max_steps):
        if lhi - llo <= rtol:
            return math.exp(lhi)
        mid = 0.5 * (llo + lhi)
        if rho(v / math.exp(mid)) <= 1.0:
            lhi = mid
        else:
            llo = mid
    raise NormError(f"bisection did not reach rtol={rtol} in {max_steps} steps")


def luxemburg_norm(space: ModularSpace, v, dual: bool = False, rtol: float = 1e-13) -> float:
    """Luxemburg norm of ``v`` in L^phi (or in L^phi* with ``dual``)."""
    v = space.grid.check(v)
    rho = dual_modular if dual else modular
    return gauge_norm(lambda z: rho(space, z), v, rtol)


def apply_A(space: ModularSpace, v) -> np.ndarray:
    """Duality map xi_i = alpha(x_i, v_i)."""
    v = space.grid.check(v)
    return space.phi.deriv(v)


def holder_check(space: ModularSpace, u, v) -> tuple[float, float]:
    """(sum w|u v|, 2 ||u||_phi ||v||_phi*); the first never exceeds the second."""
    u = space.grid.check(u, "u")
    v = space.grid.check(v, "v")
    lhs = float(np.dot(space.grid.weights, np.abs(u * v)))
    rhs = 2.0 * luxemburg_norm(space, u) * luxemburg_norm(space, v, dual=True)
    return lhs, rhs


def spacetime_modular(phi: PhiFunction, grid: Grid, tg: TimeGrid, v, dual: bool = False) -> float:
    """sum_k tau * rho(v_k) for slices ``v`` of shape ``(K, n)``."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != tg.K:
        raise ValueError(f"expected {tg.K} time slices, got array of shape {v.shape}")
    grid.check(v)
    f = phi.conjugate if dual else phi
    slices = f.value(v) @ grid.weights
    return float(tg.tau * np.sum(slices))
