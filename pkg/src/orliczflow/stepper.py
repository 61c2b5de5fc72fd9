"""Minimizing-movement time stepping for alpha(x, u_t) + dE(u) = f.

Each step minimizes

    J_k(w) = tau * rho_phi((w - u_{k-1}) / tau) + E(w) - <f_k, w>

whose Euler-Lagrange equation is A((u_k - u_{k-1})/tau) + dE(u_k) = f_k. In
generalized mode rho_phi is replaced by the integral of a primitive Psi of a
monotone nonlinearity beta, giving beta((u_k - u_{k-1})/tau) + dE(u_k) = f_k.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .energies import Energy
from .grid import Grid, TimeGrid
from .modular import ModularSpace, gauge_norm
from .phi import PhiFunction
from .proximal import MovementObjective
from .solver import SolverConfig, SolverError, SolverReport, minimize

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)


# ---------------------------------------------------------------------------
# sources


class Source:
    """Right-hand side f(x, t). Subclasses provide ``average(k, tg)``."""

    n: int

    def average(self, k: int, tg: TimeGrid) -> np.ndarray:
        raise NotImplementedError


class ZeroSource(Source):
    def __init__(self, n: int):
        self.n = n

    def average(self, k, tg):
        return np.zeros(self.n)


class ConstantSource(Source):
    def __init__(self, g):
        self.g = np.asarray(g, dtype=float)
        self.n = self.g.size

    def average(self, k, tg):
        return self.g.copy()


class ClosedFormSource(Source):
    """f given as a callable ``t -> nodal array``; averaged by 5-point Gauss quadrature."""

    def __init__(self, fn: Callable[[float], np.ndarray], n: int):
        self.fn = fn
        self.n = n

    def __call__(self, t):
        return np.asarray(self.fn(t), dtype=float) + np.zeros(self.n)

    def average(self, k, tg):
        t0 = (k - 1) * tg.tau
        ts = t0 + 0.5 * tg.tau * (_GAUSS_X + 1.0)
        return sum(0.5 * wq * self(t) for wq, t in zip(_GAUSS_W, ts))


def separable_source(g, coeffs) -> ClosedFormSource:
    """f(x, t) = g(x) * sum_j c_j t^j."""
    g = np.asarray(g, dtype=float)
    poly = np.polynomial.Polynomial(coeffs)
    return ClosedFormSource(lambda t: g * poly(t), g.size)


def sinusoidal_source(g, amplitude=1.0, omega=2 * np.pi, phase=0.0, offset=0.0) -> ClosedFormSource:
    """f(x, t) = g(x) * (offset + amplitude * sin(omega t + phase))."""
    g = np.asarray(g, dtype=float)
    return ClosedFormSource(lambda t: g * (offset + amplitude * np.sin(omega * t + phase)), g.size)


class TableSource(Source):
    """Piecewise constant in time on ``M`` equal slices of ``[0, T]`` (rows of ``values``)."""

    def __init__(self, values, T: float):
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("table source needs a 2-D array (slices, nodes)")
        self.T = float(T)
        self.n = self.values.shape[1]

    def average(self, k, tg):
        M = self.values.shape[0]
        edges = np.linspace(0.0, self.T, M + 1)
        t0, t1 = (k - 1) * tg.tau, k * tg.tau
        overlap = np.clip(np.minimum(edges[1:], t1) - np.maximum(edges[:-1], t0), 0.0, None)
        return overlap @ self.values / tg.tau

    def slices(self):
        return self.values, self.T / self.values.shape[0]


def average_source(f: Source, k: int, tg: TimeGrid) -> np.ndarray:
    """f_k = (1/tau) * integral of f over ((k-1) tau, k tau]."""
    if not 1 <= k <= tg.K:
        raise IndexError(f"step index {k} outside 1..{tg.K}")
    return f.average(k, tg)


# ---------------------------------------------------------------------------
# monotone nonlinearities for the generalized mode


class Nonlinearity:
    """Continuous nondecreasing beta(x, r) with beta(x, 0) = 0 and primitive Psi.

    Exposes the dissipation interface used by the step objective: ``value`` is
    Psi, ``deriv`` is beta and ``curvature`` is beta'.
    """

    def __init__(self, beta, primitive, slope, label="beta"):
        self._beta, self._primitive, self._slope = beta, primitive, slope
        self.label = label

    def __call__(self, r):
        return self.deriv(r)

    def value(self, r):
        return self._primitive(np.asarray(r, dtype=float))

    def deriv(self, r):
        return self._beta(np.asarray(r, dtype=float))

    def curvature(self, r):
        return self._slope(np.asarray(r, dtype=float))

    @classmethod
    def from_phi(cls, phi: PhiFunction, scale: float = 1.0):
        """beta = scale * alpha_phi, Psi = scale * phi."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        return cls(lambda r: scale * phi.deriv(r), lambda r: scale * phi.value(r),
                   lambda r: scale * phi.curvature(r), label=f"{scale}*alpha[{phi.kind.value}]")

    @classmethod
    def arctan(cls):
        return cls(np.arctan, lambda r: r * np.arctan(r) - 0.5 * np.log1p(r * r),
                   lambda r: 1.0 / (1.0 + r * r), label="arctan")

    @classmethod
    def from_expression(cls, expr: str):
        """beta from a sympy expression in ``r``; Psi by adaptive quadrature."""
        import sympy as sp

        r = sp.Symbol("r", real=True)
        e = sp.sympify(expr, locals={"r": r})
        b = sp.lambdify(r, e, modules="numpy")
        db = sp.lambdify(r, sp.diff(e, r), modules="numpy")
        beta = lambda x: np.asarray(b(x), dtype=float) + 0.0 * x  # noqa: E731

        @np.vectorize
        def prim(x):
            return integrate.quad(lambda y: float(b(y)), 0.0, x, limit=200)[0]

        return cls(beta, lambda x: np.asarray(prim(x), dtype=float),
                   lambda x: np.asarray(db(x), dtype=float) + 0.0 * x, label=expr)


@dataclass
class HpMResult:
    alpha0: float
    C1: float
    C2: float
    passed: bool
    notes: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.alpha0, self.C1, self.C2, self.passed))


def verify_hp_M(space: ModularSpace, beta: Nonlinearity, samples: int = 20, r_min=1e-6, r_max=1e6,
                alpha0_floor=1e-3, growth=0.10) -> HpMResult:
    """Fit the constants of the coercivity/growth conditions on beta by sampling.

    Pointwise: alpha0 phi(x,r) <= beta(x,r) r + c1(x) and
    phi*(x, beta(x,r)) <= C2 phi(x,r) + c3(x) on r = +-[r_min, r_max] (``samples``
    points per decade). alpha0 is capped at 1; c1 and c3 are integrated against
    the weights. Rejects beta when the large-r ratios trend to 0 (first
    condition) or to infinity (second) over the last decade.
    """
    w = space.grid.weights
    decades = int(round(math.log10(r_max / r_min)))
    rp = r_min * 10.0 ** (np.arange(decades * samples + 1) / samples)
    notes = []
    ok = True
    alpha0 = math.inf
    C2_ratio = 0.0
    c1 = np.zeros(space.grid.n)
    c3 = np.zeros(space.grid.n)
    sign_checks = []
    with np.errstate(all="ignore"):
        for sgn in (1.0, -1.0):
            r = sgn * rp[:, None] + np.zeros(space.grid.n)
            ph = space.phi.value(r)
            b = beta.deriv(r)
            sign_checks.append(np.all(sgn * b >= 0))
            br = b * r
            big = np.abs(rp) >= 1.0
            ratio1 = br[big] / ph[big]
            ratio2 = space.conj.value(b)[big] / ph[big]
            top, prev = np.abs(rp[big]) > r_max / 10, (np.abs(rp[big]) > r_max / 100) & (np.abs(rp[big]) <= r_max / 10)
            if np.min(ratio1[top]) < (1 - growth) * np.min(ratio1[prev]):
                ok = False
                notes.append("beta*r/phi decays at large |r|")
            if not np.all(np.isfinite(ratio2)) or np.max(ratio2[top]) > (1 + growth) * np.max(ratio2[prev]):
                ok = False
                notes.append("phi*(beta)/phi grows at large |r|")
            alpha0 = min(alpha0, float(np.min(ratio1)))
            C2_ratio = max(C2_ratio, float(np.nanmax(np.where(np.isfinite(ratio2), ratio2, np.inf))))
    alpha0 = min(alpha0, 1.0)
    if not alpha0 >= alpha0_floor:
        ok = False
        notes.append(f"alpha0={alpha0:.3g} below floor {alpha0_floor}")
    if not all(sign_checks):
        ok = False
        notes.append("beta(r) r < 0 for some r")
    with np.errstate(all="ignore"):
        for sgn in (1.0, -1.0):
            r = sgn * rp[:, None] + np.zeros(space.grid.n)
            ph = space.phi.value(r)
            b = beta.deriv(r)
            c1 = np.maximum(c1, np.max(np.maximum(alpha0 * ph - b * r, 0.0), axis=0))
            if np.isfinite(C2_ratio):
                c3 = np.maximum(c3, np.max(np.maximum(space.conj.value(b) - C2_ratio * ph, 0.0), axis=0))
    C1 = float(w @ c1)
    C2 = max(C2_ratio, float(w @ c3)) if np.isfinite(C2_ratio) else math.inf
    if not np.isfinite(C2):
        ok = False
    return HpMResult(alpha0=alpha0, C1=C1, C2=C2, passed=ok, notes=notes)


# ---------------------------------------------------------------------------
# problem, trajectory, stepping


class Mode(str, enum.Enum):
    SUBDIFFERENTIAL = "subdifferential"
    GENERALIZED = "generalized"


class StepError(SolverError):
    def __init__(self, msg, report=None, trajectory=None, step=None):
        super().__init__(msg, report)
        self.trajectory = trajectory
        self.step = step


@dataclass(eq=False)
class Problem:
    space: ModularSpace
    energy: Energy
    tg: TimeGrid
    u0: np.ndarray
    source: Source
    mode: Mode = Mode.SUBDIFFERENTIAL
    beta: Nonlinearity | None = None
    solver: SolverConfig | None = None

    def __post_init__(self):
        self.mode = Mode(self.mode)
        self.u0 = self.space.grid.check(self.u0, "u0")
        if self.mode is Mode.GENERALIZED and self.beta is None:
            raise ValueError("generalized mode needs a nonlinearity beta")
        if self.source.n != self.space.grid.n:
            raise ValueError("source lives on a different grid")

    @property
    def grid(self) -> Grid:
        return self.space.grid

    @property
    def dissipation(self):
        return self.beta if self.mode is Mode.GENERALIZED else self.space.phi

    def solver_config(self) -> SolverConfig:
        """Inner tolerance tied to the initial energy and to tau."""
        if self.solver is not None:
            return self.solver
        tol = 1e-10 * (1.0 + self.energy.value(self.u0)) * min(1.0, self.tg.tau)
        return SolverConfig(grad_tol=tol)


@dataclass(eq=False)
class StepDiagnostics:
    report: SolverReport
    rate: np.ndarray
    eta: np.ndarray
    el_residual: float
    ineq_slack: float


def step(prob: Problem, u_prev, f_k, cfg: SolverConfig | None = None):
    """One minimizing-movement step, warm-started at ``u_prev``."""
    cfg = cfg or prob.solver_config()
    obj = MovementObjective(prob.grid, prob.dissipation, prob.energy, u_prev, prob.tg.tau, f_k)
    u_k, report = minimize(obj, u_prev, cfg)
    if not report.converged:
        raise StepError(f"inner solver failed: {report.message}", report)
    tau = prob.tg.tau
    rate = (u_k - u_prev) / tau
    M_rate = prob.dissipation.deriv(rate)
    eta = f_k - M_rate
    resid = obj.residual(u_k)
    el = prob.space.dual_modular(resid)
    w = prob.grid.weights
    diss = float(w @ prob.dissipation.value(rate))
    slack = diss + (prob.energy.value(u_k) - prob.energy.value(u_prev)) / tau - float(w @ (f_k * rate))
    return u_k, StepDiagnostics(report, rate, eta, el, slack)


@dataclass(eq=False)
class Trajectory:
    problem: Problem
    us: np.ndarray
    fs: np.ndarray
    eta: np.ndarray
    energy: np.ndarray
    rho_rate: np.ndarray
    rho_conj_eta: np.ndarray
    rho_conj_A: np.ndarray
    el_residual: np.ndarray
    ineq_slack: np.ndarray
    inner_iters: np.ndarray
    grad_tol: float
    steps_done: int

    @property
    def tg(self) -> TimeGrid:
        return self.problem.tg

    @property
    def complete(self) -> bool:
        return self.steps_done == self.tg.K

    @property
    def rates(self) -> np.ndarray:
        return np.diff(self.us, axis=0) / self.tg.tau


def _empty_trajectory(prob: Problem, grad_tol: float) -> Trajectory:
    K, n = prob.tg.K, prob.grid.n
    nan = lambda *shape: np.full(shape, np.nan)  # noqa: E731
    us = nan(K + 1, n)
    us[0] = prob.u0
    energy = nan(K + 1)
    energy[0] = prob.energy.value(prob.u0)
    return Trajectory(prob, us, nan(K, n), nan(K, n), energy, nan(K), nan(K), nan(K), nan(K), nan(K),
                      np.zeros(K, dtype=int), grad_tol, 0)


def solve(prob: Problem) -> Trajectory:
    """Run all K steps. A failing step raises :class:`StepError` carrying the
    partial trajectory."""
    cfg = prob.solver_config()
    traj = _empty_trajectory(prob, cfg.grad_tol)
    space = prob.space
    # per-step tolerance on the energy inequality: solver tolerance plus roundoff of J
    for k in range(1, prob.tg.K + 1):
        f_k = average_source(prob.source, k, prob.tg)
        try:
            u_k, diag = step(prob, traj.us[k - 1], f_k, cfg)
        except StepError as exc:
            exc.trajectory, exc.step = traj, k
            raise
        traj.us[k] = u_k
        traj.fs[k - 1] = f_k
        traj.eta[k - 1] = diag.eta
        traj.energy[k] = prob.energy.value(u_k)
        traj.rho_rate[k - 1] = space.modular(diag.rate)
        traj.rho_conj_eta[k - 1] = space.dual_modular(diag.eta)
        traj.rho_conj_A[k - 1] = space.dual_modular(prob.dissipation.deriv(diag.rate))
        traj.el_residual[k - 1] = diag.el_residual
        traj.ineq_slack[k - 1] = diag.ineq_slack
        traj.inner_iters[k - 1] = diag.report.iterations
        traj.steps_done = k
        allowed = 10 * cfg.grad_tol + 64 * np.finfo(float).eps * (1.0 + abs(diag.report.objective)) / prob.tg.tau
        if diag.ineq_slack > allowed:
            raise StepError(f"discrete energy inequality violated at step {k} by {diag.ineq_slack:.3e}",
                            diag.report, traj, k)
    return traj


def energy_identity_report(traj: Trajectory):
    """Per-step |E(u_k) - E(u_{k-1}) + tau<M(d_k), d_k> - tau<f_k, d_k>| and their sum,
    with d_k = (u_k - u_{k-1})/tau and M = alpha (or beta in generalized mode)."""
    prob = traj.problem
    w = prob.grid.weights
    tau = traj.tg.tau
    d = traj.rates[: traj.steps_done]
    Md = prob.dissipation.deriv(d)
    E = traj.energy[: traj.steps_done + 1]
    r = np.abs(np.diff(E) + tau * (Md * d) @ w - tau * (traj.fs[: traj.steps_done] * d) @ w)
    return r, float(np.sum(r))


def max_regularity_report(traj: Trajectory) -> tuple[float, float, float]:
    """Space-time modulars of the rate, of M(rate) (dual) and of eta (dual)."""
    tau = traj.tg.tau
    k = traj.steps_done
    return (float(tau * np.sum(traj.rho_rate[:k])), float(tau * np.sum(traj.rho_conj_A[:k])),
            float(tau * np.sum(traj.rho_conj_eta[:k])))


def a_priori_bound(traj: Trajectory) -> tuple[float, float]:
    """(sum_k tau rho(d_k) + E(u_K), E(u_0) + ||f_bar||_{dual,Q} ||d||_Q) for the rates d."""
    lhs = max_regularity_report(traj)[0] + traj.energy[traj.steps_done]
    rhs = traj.energy[0] + _spacetime_norm(traj, traj.fs, dual=True) * _spacetime_norm(traj, traj.rates, dual=False)
    return float(lhs), float(rhs)


def _spacetime_norm(traj: Trajectory, V, dual: bool) -> float:
    """Luxemburg norm on Q of a piecewise-constant-in-time function with slices ``V``."""
    space = traj.problem.space
    phi = space.conj if dual else space.phi
    w, tau = space.grid.weights, traj.tg.tau
    return gauge_norm(lambda Z: tau * float(np.sum(phi.value(Z) @ w)), V)
