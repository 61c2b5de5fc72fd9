"""Uniform 1-D grids with homogeneous Dirichlet ghosts, time grids and
piecewise interpolants of discrete trajectories.

Grid functions are plain ``numpy`` arrays holding the interior nodal values;
boundary values are implicitly zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class Grid:
    """Interior nodes of ``(a, b)`` with quadrature weights.

    ``weights`` defaults to ``h`` at every node. A custom weight vector may be
    supplied to realize measure-weighted cells (the nodes then only label the
    cells).
    """

    a: float
    b: float
    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n + 1)

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))

    @classmethod
    def with_weights(cls, weights, a: float = 0.0, b: float = 1.0) -> "Grid":
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size < 1 or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be a non-empty vector of positive finite numbers")
        n = w.size
        base = make_grid(a, b, n)
        return cls(a=float(a), b=float(b), n=n, nodes=base.nodes, weights=w)

    def check(self, v, name: str = "v") -> np.ndarray:
        """Return ``v`` as a float array, raising if it does not live on this grid."""
        arr = np.asarray(v, dtype=float)
        if arr.shape[-1:] != (self.n,):
            raise ValueError(f"{name} has trailing length {arr.shape[-1:]} but the grid has {self.n} nodes")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} contains non-finite values")
        return arr

    def pairing(self, xi, v) -> float:
        """Discrete duality pairing ``sum_i w_i xi_i v_i``."""
        return float(np.dot(self.weights, np.asarray(xi) * np.asarray(v)))

    def integrate(self, g) -> float:
        return float(np.dot(self.weights, np.asarray(g, dtype=float)))


def make_grid(a: float, b: float, n: int) -> Grid:
    """Uniform grid with interior nodes ``a + i h``, ``i = 1..n`` and weights ``h``."""
    if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
        raise ValueError(f"need finite a < b, got a={a}, b={b}")
    if int(n) != n or n < 1:
        raise ValueError(f"need an integer n >= 1, got {n}")
    n = int(n)
    h = (b - a) / (n + 1)
    nodes = a + h * np.arange(1, n + 1)
    weights = np.full(n, h)
    return Grid(a=float(a), b=float(b), n=n, nodes=nodes, weights=weights)


@dataclass(frozen=True)
class TimeGrid:
    T: float
    K: int

    def __post_init__(self):
        if not np.isfinite(self.T) or self.T <= 0:
            raise ValueError(f"need T > 0, got {self.T}")
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"need an integer K >= 1, got {self.K}")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "T", float(self.T))

    @property
    def tau(self) -> float:
        return self.T / self.K

    @property
    def times(self) -> np.ndarray:
        return self.tau * np.arange(self.K + 1)


def node_profile(spec, grid: Grid) -> np.ndarray | float:
    """Evaluate a per-node parameter spec.

    ``spec`` is a number (returned as a float), ``{"ramp": [v0, v1]}`` (linear in
    x from ``v0`` at ``a`` to ``v1`` at ``b``), ``{"sin": [mean, amp, periods]}``,
    ``{"sine": [amp, k]}`` (``amp sin(k pi s)``, ``s`` the relative position),
    ``{"bump": [amp]}`` (``16 amp s^2 (1-s)^2``) or ``{"table": [...]}`` of
    length ``grid.n``.
    """
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return float(spec)
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError(f"unrecognised parameter spec {spec!r}")
    (key, val), = spec.items()
    s = (grid.nodes - grid.a) / (grid.b - grid.a)
    if key == "ramp":
        v0, v1 = val
        return v0 + (v1 - v0) * s
    if key == "sin":
        mean, amp, periods = val
        return mean + amp * np.sin(2 * np.pi * periods * s)
    if key == "sine":
        amp, k = val
        return amp * np.sin(k * np.pi * s)
    if key == "bump":
        amp, = val
        return amp * 16.0 * s ** 2 * (1.0 - s) ** 2
    if key == "table":
        arr = np.asarray(val, dtype=float)
        if arr.shape != (grid.n,):
            raise ValueError(f"table has length {arr.size}, expected {grid.n}")
        return arr
    raise ValueError(f"unknown parameter generator {key!r}")


def piecewise_interpolants(traj, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise linear and piecewise constant interpolants at time ``t``.

    ``traj`` needs ``us`` (shape ``(K+1, n)``) and ``tg``. On ``((k-1)tau, k tau]``
    the linear interpolant blends ``u_{k-1}`` and ``u_k`` and the constant one
    equals ``u_k``; both equal ``u_0`` at ``t = 0``.
    """
    tg = traj.tg
    if not (0.0 <= t <= tg.T):
        raise ValueError(f"t={t} outside [0, {tg.T}]")
    us = traj.us
    if t == 0.0:
        return us[0].copy(), us[0].copy()
    k = int(np.ceil(t / tg.tau - 1e-12))
    k = min(max(k, 1), tg.K)
    theta = (t - (k - 1) * tg.tau) / tg.tau
    lin = theta * us[k] + (1.0 - theta) * us[k - 1]
    return lin, us[k].copy()
