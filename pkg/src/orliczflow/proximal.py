"""Modular-based resolvent, Yosida approximation and Moreau-Yosida regularization.

The resolvent of B = dE at ``u`` is the minimizer of

    v -> lam * rho_phi((v - u) / lam) + E(v),

which reduces to the usual proximal map when phi(r) = r^2/2.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .energies import Energy
from .modular import ModularSpace, apply_A, luxemburg_norm
from .solver import SolverConfig, SolverError, minimize


class MovementObjective:
    """step * rho_D((v - center) / step) + E(v) - <f, v> for a pointwise potential D.

    ``dissipation`` needs ``value``, ``deriv`` and ``curvature`` acting per node
    (a :class:`PhiFunction` qualifies).
    """

    def __init__(self, grid, dissipation, energy: Energy, center, step: float, source=None):
        self.grid = grid
        self.weights = grid.weights
        self.D = dissipation
        self.E = energy
        self.center = np.asarray(center, dtype=float)
        self.step = float(step)
        self.source = None if source is None else np.asarray(source, dtype=float)

    def rate(self, v):
        return (np.asarray(v) - self.center) / self.step

    def value(self, v) -> float:
        val = self.step * float(self.weights @ self.D.value(self.rate(v))) + self.E.value(v)
        if self.source is not None:
            val -= float(self.weights @ (self.source * v))
        return val

    def gradient(self, v) -> np.ndarray:
        g = self.weights * self.D.deriv(self.rate(v)) + self.E.euclidean_gradient(v)
        if self.source is not None:
            g = g - self.weights * self.source
        return g

    def hessian(self, v, floor: float = 0.0):
        c = np.asarray(self.D.curvature(self.rate(v)), dtype=float) + np.zeros(self.grid.n)
        if floor > 0:
            c = np.clip(c, floor, 1.0 / floor)
        diag = self.weights * c / self.step
        HE = self.E.hessian(v, floor)
        if sps.issparse(HE):
            return (HE + sps.diags(diag)).tocsc()
        return HE + np.diag(diag)

    def residual(self, v) -> np.ndarray:
        """Riesz representative of the gradient: D'(rate) + dE(v) - f."""
        return self.gradient(v) / self.weights


@dataclass(frozen=True, eq=False)
class ProximalOperator:
    space: ModularSpace
    energy: Energy
    solver: SolverConfig = field(default_factory=lambda: SolverConfig(grad_tol=1e-11))

    def __post_init__(self):
        if self.space.grid is not self.energy.grid:
            g1, g2 = self.space.grid, self.energy.grid
            same = g1.n == g2.n and np.array_equal(g1.nodes, g2.nodes) and np.array_equal(g1.weights, g2.weights)
            if not same:
                raise ValueError("space and energy live on different grids")


class ProxError(SolverError):
    pass


def resolvent(P: ProximalOperator, lam: float, u, x0=None, full_output: bool = False):
    """J_lam(u); with ``full_output`` also the :class:`SolverReport`."""
    if not lam > 0:
        raise ValueError(f"need lambda > 0, got {lam}")
    u = P.space.grid.check(u, "u")
    obj = MovementObjective(P.space.grid, P.space.phi, P.energy, u, lam)
    v, report = minimize(obj, u if x0 is None else x0, P.solver)
    if not report.converged:
        raise ProxError(f"resolvent solve failed: {report.message}", report)
    return (v, report) if full_output else v


def yosida(P: ProximalOperator, lam: float, u, J=None) -> np.ndarray:
    """B_lam(u) = A((u - J_lam u) / lam)."""
    u = P.space.grid.check(u, "u")
    if J is None:
        J = resolvent(P, lam, u)
    return apply_A(P.space, (u - J) / lam)


def moreau_yosida_value(P: ProximalOperator, lam: float, u, J=None) -> float:
    """E_lam(u) = lam rho((J - u)/lam) + E(J)."""
    u = P.space.grid.check(u, "u")
    if J is None:
        J = resolvent(P, lam, u)
    return lam * P.space.modular((J - u) / lam) + P.energy.value(J)


def inclusion_residual(P: ProximalOperator, lam: float, u, J=None) -> float:
    """rho*(B_lam u - dE(J_lam u)) / (1 + rho*(B_lam u)); zero at an exact resolvent."""
    if J is None:
        J = resolvent(P, lam, u)
    b = yosida(P, lam, u, J)
    diff = b - P.energy.gradient(J)
    return P.space.dual_modular(diff) / (1.0 + P.space.dual_modular(b))


def resolvent_convergence(P: ProximalOperator, u, lambdas=None) -> list[dict]:
    """One row per lambda: distance ||J u - u||, E(J u), E_lam(u), E(u), residuals."""
    if lambdas is None:
        lambdas = 2.0 ** -np.arange(11)
    u = P.space.grid.check(u, "u")
    E_u = P.energy.value(u)
    rows = []
    J_prev = u
    for lam in lambdas:
        J, rep = resolvent(P, lam, u, x0=J_prev, full_output=True)
        J_prev = J
        rows.append({
            "lambda": float(lam),
            "distance": luxemburg_norm(P.space, J - u),
            "E_J": P.energy.value(J),
            "E_lambda": moreau_yosida_value(P, lam, u, J),
            "E_u": E_u,
            "yosida_dual_modular": P.space.dual_modular(yosida(P, lam, u, J)),
            "inclusion_residual": inclusion_residual(P, lam, u, J),
            "inner_iters": rep.iterations,
        })
    return rows


def resolvent_slices(P: ProximalOperator, lam: float, U) -> np.ndarray:
    """Resolvent of a space-time function, applied slice by slice."""
    U = np.asarray(U, dtype=float)
    return np.stack([resolvent(P, lam, u) for u in U])


def chain_rule_residual(P: ProximalOperator, traj, eta, s_index: int, t_index: int) -> float:
    """|E(u_t) - E(u_s) - sum_{k=s+1}^{t} tau <eta_k, (u_k - u_{k-1})/tau>|.

    ``eta`` has one row per step, row ``k-1`` belonging to step ``k``.
    """
    K = traj.tg.K
    if not (0 <= s_index <= t_index <= K):
        raise IndexError(f"need 0 <= s <= t <= {K}, got s={s_index}, t={t_index}")
    us = traj.us
    tau = traj.tg.tau
    eta = np.asarray(eta, dtype=float)
    w = P.space.grid.weights
    total = 0.0
    for k in range(s_index + 1, t_index + 1):
        total += tau * float(w @ (eta[k - 1] * (us[k] - us[k - 1]) / tau))
    return abs(P.energy.value(us[t_index]) - P.energy.value(us[s_index]) - total)
