"""Convex energies E on grid functions and their gradients under the weighted pairing.

``gradient`` returns the Riesz representative g with <g, d>_w = dE(w)[d], i.e. the
Euclidean partial derivatives divided by the node weights. ``hessian`` returns
the Euclidean second derivative (sparse tridiagonal or dense).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .grid import Grid


class EnergyKind(str, enum.Enum):
    ZERO = "zero"
    M_LAPLACIAN = "m_laplacian"
    FRACTIONAL = "fractional"


@dataclass(frozen=True, eq=False)
class Energy:
    kind: EnergyKind
    grid: Grid
    m_edges: np.ndarray | None = field(default=None, repr=False)
    s: float | None = None
    c_s: float = 1.0
    _matrix: np.ndarray | None = field(default=None, repr=False)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, grid: Grid) -> "Energy":
        return cls(EnergyKind.ZERO, grid)

    @classmethod
    def m_laplacian(cls, grid: Grid, m) -> "Energy":
        """sum over the n+1 edges of h |Dw|^m_e / m_e, with zero ghost values.

        ``m`` is a scalar or a per-node table; interior edges take the mean of
        their two nodes, boundary edges the value of their interior node.
        """
        m = np.broadcast_to(np.asarray(m, dtype=float), (grid.n,))
        if np.any(m <= 1) or not np.all(np.isfinite(m)):
            raise ValueError("need 1 < m(x) < inf")
        m_edges = np.concatenate([[m[0]], 0.5 * (m[:-1] + m[1:]), [m[-1]]])
        return cls(EnergyKind.M_LAPLACIAN, grid, m_edges=m_edges)

    @classmethod
    def fractional(cls, grid: Grid, s: float, c_s: float = 1.0) -> "Energy":
        """(c_s/4) double integral of |w(x)-w(y)|^2 / |x-y|^(1+2s) with zero extension."""
        if not 0 < s < 1:
            raise ValueError("need 0 < s < 1")
        if c_s <= 0:
            raise ValueError("need c_s > 0")
        x, h = grid.nodes, grid.h
        dist = np.abs(x[:, None] - x[None, :])
        np.fill_diagonal(dist, 1.0)
        Kmat = h * h / dist ** (1 + 2 * s)
        np.fill_diagonal(Kmat, 0.0)
        # interaction of each node with the exterior (closed-form tail integrals)
        ext = h * ((x - grid.a) ** (-2 * s) + (grid.b - x) ** (-2 * s)) / (2 * s)
        M = c_s * (np.diag(Kmat.sum(axis=1) + ext) - Kmat)
        return cls(EnergyKind.FRACTIONAL, grid, s=float(s), c_s=float(c_s), _matrix=M)

    # -- evaluation ---------------------------------------------------------

    def _diff(self, w):
        h = self.grid.h
        wp = np.concatenate([[0.0], w, [0.0]])
        return np.diff(wp) / h

    def value(self, w) -> float:
        w = self.grid.check(w, "w")
        if self.kind is EnergyKind.ZERO:
            return 0.0
        if self.kind is EnergyKind.M_LAPLACIAN:
            D = self._diff(w)
            return float(self.grid.h * np.sum(np.abs(D) ** self.m_edges / self.m_edges))
        return float(0.5 * w @ self._matrix @ w)

    def _flux(self, D):
        m = self.m_edges
        aD = np.abs(D)
        with np.errstate(divide="ignore", invalid="ignore"):
            F = np.where(aD > 0, aD ** (m - 2) * D, 0.0)
        return F

    def euclidean_gradient(self, w) -> np.ndarray:
        w = self.grid.check(w, "w")
        if self.kind is EnergyKind.ZERO:
            return np.zeros_like(w)
        if self.kind is EnergyKind.M_LAPLACIAN:
            F = self._flux(self._diff(w))
            return F[:-1] - F[1:]
        return self._matrix @ w

    def gradient(self, w) -> np.ndarray:
        return self.euclidean_gradient(w) / self.grid.weights

    def hessian(self, w, floor: float = 0.0):
        """Euclidean Hessian; edge curvatures clamped to ``[floor, 1/floor]``."""
        w = self.grid.check(w, "w")
        n = self.grid.n
        if self.kind is EnergyKind.ZERO:
            return sps.csr_matrix((n, n))
        if self.kind is EnergyKind.FRACTIONAL:
            return self._matrix
        m = self.m_edges
        aD = np.abs(self._diff(w))
        with np.errstate(divide="ignore", invalid="ignore"):
            c = np.where(aD > 0, (m - 1) * aD ** (m - 2), np.where(m > 2, 0.0, np.where(m < 2, np.inf, 1.0)))
        c = c / self.grid.h
        if floor > 0:
            c = np.clip(c, floor, 1.0 / floor)
        main = c[:-1] + c[1:]
        off = -c[1:-1]
        return sps.diags([off, main, off], [-1, 0, 1], format="csc")


def subgradient(E: Energy, w) -> np.ndarray:
    return E.gradient(w)


def eval_energy(E: Energy, w) -> float:
    return E.value(w)


def dirichlet_laplacian(grid: Grid) -> np.ndarray:
    """Dense three-point Laplacian ``(2w_i - w_{i-1} - w_{i+1}) / h^2`` with zero ghosts."""
    n, h = grid.n, grid.h
    return (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / h ** 2
