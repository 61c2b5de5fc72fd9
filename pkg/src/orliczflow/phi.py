"""Generalized Phi-functions phi(x, r), their derivatives alpha = d phi / dr and
convex conjugates phi*(x, s) = sup_r (r s - phi(x, r)).

Spatial dependence enters only through the parameter arrays: every parameter is
either a scalar or a vector with one entry per grid node, and evaluation
broadcasts ``r`` against it. A vector ``r`` of length ``n`` is therefore read as
one value per node.

Families
--------
power       phi = |r|^p / p
power_log   phi = |r|^p log(1+|r|)^q / p
two_power   phi = a |r|^p / p + b |r|^q / q
custom      user formula (sympy expression in ``r`` or plain callables)
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import numpy as np
from scipy.interpolate import PchipInterpolator

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class Kind(str, enum.Enum):
    POWER = "power"
    POWER_LOG = "power_log"
    TWO_POWER = "two_power"
    CUSTOM = "custom"


class ConjugateMode(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERICAL = "numerical"


class ConjugateError(ArithmeticError):
    """Raised when the conjugate maximization fails; carries the offending pair."""

    def __init__(self, msg, node=None, s=None):
        super().__init__(msg)
        self.node = node
        self.s = s


# ---------------------------------------------------------------------------
# formulas on the half line a = |r| >= 0


class _Formula:
    """f(a), f'(a), f''(a) for a >= 0 with parameters ``P`` already broadcast."""

    def f(self, a, P):
        raise NotImplementedError

    def df(self, a, P):
        raise NotImplementedError

    def d2f(self, a, P):
        raise NotImplementedError


class _Power(_Formula):
    def f(self, a, P):
        p = P["p"]
        return a ** p / p

    def df(self, a, P):
        p = P["p"]
        return np.where(a > 0, a ** (p - 1), 0.0)

    def d2f(self, a, P):
        p = P["p"]
        with np.errstate(divide="ignore"):
            out = (p - 1) * a ** (p - 2)
        at0 = np.where(p > 2, 0.0, np.where(p < 2, np.inf, 1.0))
        return np.where(a > 0, out, at0)


class _PowerLog(_Formula):
    def f(self, a, P):
        p, q = P["p"], P["q"]
        return a ** p * np.log1p(a) ** q / p

    def df(self, a, P):
        p, q = P["p"], P["q"]
        L = np.log1p(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = a ** (p - 1) * L ** q + (q / p) * a ** p * L ** (q - 1) / (1 + a)
        return np.where(a > 0, out, 0.0)

    def d2f(self, a, P):
        p, q = P["p"], P["q"]
        L = np.log1p(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (p - 1) * a ** (p - 2) * L ** q + q * a ** (p - 1) * L ** (q - 1) / (1 + a)
            t2 = (q / p) * (
                p * a ** (p - 1) * L ** (q - 1) / (1 + a)
                + (q - 1) * a ** p * L ** (q - 2) / (1 + a) ** 2
                - a ** p * L ** (q - 1) / (1 + a) ** 2
            )
            out = t1 + t2
        # near 0, f ~ a^(p+q)/p
        e = p + q
        at0 = np.where(e > 2, 0.0, np.where(e < 2, np.inf, (e - 1) * e / p))
        return np.where(a > 0, out, at0)


class _TwoPower(_Formula):
    def f(self, a, P):
        return P["a"] * a ** P["p"] / P["p"] + P["b"] * a ** P["q"] / P["q"]

    def df(self, a, P):
        out = P["a"] * a ** (P["p"] - 1) + P["b"] * a ** (P["q"] - 1)
        return np.where(a > 0, out, 0.0)

    def d2f(self, a, P):
        pw = _Power()
        return (P["a"] * pw.d2f(a, {"p": P["p"]}) + P["b"] * pw.d2f(a, {"p": P["q"]}))


class _Callables(_Formula):
    """Formula given by user callables ``value(a, **P)``, ``deriv(a, **P)``."""

    def __init__(self, value, deriv, curvature=None, label="custom"):
        self.value, self.deriv, self.curvature, self.label = value, deriv, curvature, label

    def f(self, a, P):
        return np.asarray(self.value(a, **P), dtype=float) + 0.0 * a

    def df(self, a, P):
        out = np.asarray(self.deriv(a, **P), dtype=float) + 0.0 * a
        return np.where(a > 0, out, 0.0)

    def d2f(self, a, P):
        if self.curvature is not None:
            with np.errstate(all="ignore"):
                out = np.asarray(self.curvature(a, **P), dtype=float) + 0.0 * a
        else:
            eps = 1e-6 * np.maximum(a, 1e-6)
            lo = np.maximum(a - eps, 0.0)
            out = (self.df(a + eps, P) - self.df(lo, P)) / (a + eps - lo)
        return np.where(np.isnan(out), np.inf, out)


def _symbolic(expr: str, param_names):
    import sympy as sp

    r = sp.Symbol("r", nonnegative=True)
    syms = {name: sp.Symbol(name, real=True) for name in param_names}
    loc = {"r": r, **syms}
    e = sp.sympify(expr, locals=loc)
    args = [r] + [syms[k] for k in param_names]
    d1 = sp.diff(e, r)
    d2 = sp.diff(d1, r)
    f, df, d2f = (sp.lambdify(args, z, modules="numpy") for z in (e, d1, d2))

    def wrap(fn):
        return lambda a, **P: fn(a, *[P[k] for k in param_names])

    return _Callables(wrap(f), wrap(df), wrap(d2f), label=expr)


_FAMILY = {Kind.POWER: _Power(), Kind.POWER_LOG: _PowerLog(), Kind.TWO_POWER: _TwoPower()}


# ---------------------------------------------------------------------------
# numerical conjugation


def _golden_argmax(obj, lo, hi, iters=200):
    """Vectorized golden-section maximization of concave ``obj`` on ``[lo, hi]``."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = obj(c), obj(d)
    for _ in range(iters):
        left = fc >= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new = np.where(left, hi - _INVPHI * (hi - lo), lo + _INVPHI * (hi - lo))
        fnew = obj(new)
        c, d, fc, fd = (
            np.where(left, new, d),
            np.where(left, c, new),
            np.where(left, fnew, fd),
            np.where(left, fc, fnew),
        )
        if np.all(hi - lo <= 1e-15 * np.maximum(hi, 1e-300)):
            break
    mid = 0.5 * (lo + hi)
    return mid


def _conjugate_direct(formula: _Formula, s, P, max_doublings=1100):
    """phi*(s) and the maximizer for s >= 0, elementwise (``s`` and ``P`` broadcast)."""
    s = np.asarray(s, dtype=float)
    shape = np.broadcast_shapes(s.shape, *(np.shape(v) for v in P.values()))
    s = np.broadcast_to(s, shape).astype(float)
    Pb = {k: np.broadcast_to(v, shape) for k, v in P.items()}

    def obj_at(r, mask=None):
        PP = Pb if mask is None else {k: v[mask] for k, v in Pb.items()}
        ss = s if mask is None else s[mask]
        with np.errstate(all="ignore"):
            val = ss * r - formula.f(r, PP)
        return np.where(np.isnan(val), -np.inf, val)

    R = np.ones(shape)
    active = s > 0
    for _ in range(max_doublings):
        if not np.any(active):
            break
        with np.errstate(all="ignore"):
            grow = obj_at(R, None) > obj_at(0.5 * R, None)
        grow &= active & np.isfinite(R)
        if not np.any(grow):
            break
        R = np.where(grow, 2.0 * R, R)
    with np.errstate(all="ignore"):
        diverged = active & ~(np.isfinite(R) & np.isfinite(obj_at(R)))
    with np.errstate(all="ignore"):
        r_hat = _golden_argmax(obj_at, np.zeros(shape), np.where(diverged, 1.0, R))
    r_hat = np.where(s > 0, r_hat, 0.0)
    with np.errstate(all="ignore"):
        val = s * r_hat - formula.f(r_hat, Pb)
    val = np.maximum(val, 0.0)
    # R reached the overflow range: the supremum is not representable
    overflow = diverged | ~np.isfinite(R) | ~np.isfinite(val)
    val = np.where(overflow, np.inf, val)
    r_hat = np.where(overflow, np.inf, r_hat)
    return val, r_hat


class _TabulatedConjugate(_Formula):
    """phi* of a primal formula: golden-section samples on a log-spaced s-grid,
    argmax interpolated by a monotone cubic in log-log coordinates.

    The value at ``s`` is ``s r(s) - phi(r(s))`` with the interpolated maximizer
    ``r(s)``, which is accurate to second order in the interpolation error.
    Parameters carry a ``_row`` index selecting the table of the node.
    """

    S_MIN, S_MAX, PER_DECADE = 1e-10, 1e10, 40

    def __init__(self, primal: _Formula, rows: list[dict]):
        self.primal = primal
        self.rows = rows
        ndec = int(round(math.log10(self.S_MAX / self.S_MIN)))
        self.s_grid = np.logspace(math.log10(self.S_MIN), math.log10(self.S_MAX), ndec * self.PER_DECADE + 1)
        self.tables = []
        for P in rows:
            _, r_hat = _conjugate_direct(primal, self.s_grid, P)
            ok = np.isfinite(r_hat) & (r_hat > 0)
            if ok.sum() < 4:
                raise ConjugateError("conjugate maximization failed on the whole table", s=self.s_grid[0])
            ls, lr = np.log(self.s_grid[ok]), np.log(r_hat[ok])
            self.tables.append((PchipInterpolator(ls, lr, extrapolate=False), self.s_grid[ok][-1]))

    def _row_params(self, P, rid):
        return self.rows[rid]

    def argmax(self, s, P):
        s = np.asarray(s, dtype=float)
        rid = np.asarray(P["_row"])
        shape = np.broadcast_shapes(s.shape, rid.shape)
        s, rid = np.broadcast_to(s, shape), np.broadcast_to(rid, shape)
        out = np.zeros(shape)
        for k in np.unique(rid):
            m = rid == k
            sk = s[m]
            interp, s_top = self.tables[int(k)]
            inside = (sk >= self.S_MIN) & (sk <= s_top)
            rk = np.zeros(sk.shape)
            if np.any(inside):
                rk[inside] = self._polish(np.exp(interp(np.log(sk[inside]))), sk[inside], self.rows[int(k)])
            outside = ~inside & (sk > 0)
            if np.any(outside):
                rk[outside] = self._outside(sk[outside], int(k))
            out[m] = rk
        return out

    def _outside(self, s, k):
        """Maximizer off the table: log-log extrapolation from the nearest table end,
        polished by Newton; direct maximization where that does not converge."""
        interp, s_top = self.tables[k]
        P = self.rows[k]
        x = interp.x
        lo_end = s < self.S_MIN
        i0, i1 = np.where(lo_end, 0, len(x) - 2), np.where(lo_end, 1, len(x) - 1)
        y0, y1 = interp(x[i0]), interp(x[i1])
        slope = (y1 - y0) / (x[i1] - x[i0])
        with np.errstate(all="ignore"):
            r = np.exp(y0 + slope * (np.log(s) - x[i0]))
        r = self._polish(r, s, P, steps=8)
        with np.errstate(all="ignore"):
            bad = ~(np.abs(self.primal.df(r, P) - s) <= 1e-12 * s) | ~np.isfinite(r) | (r <= 0)
        # maximizers below the normal range cannot be resolved by any method
        bad &= ~(np.isfinite(r) & (r < np.finfo(float).tiny))
        if np.any(bad):
            _, r[bad] = _conjugate_direct(self.primal, s[bad], P)
        return r

    def _polish(self, r, s, P, steps=2):
        """Newton steps on alpha(r) = s from the interpolated maximizer; a step is
        kept only where it stays positive and reduces the residual."""
        with np.errstate(all="ignore"):
            for _ in range(steps):
                res = self.primal.df(r, P) - s
                r_new = r - res / self.primal.d2f(r, P)
                better = (r_new > 0) & np.isfinite(r_new) & (np.abs(self.primal.df(r_new, P) - s) < np.abs(res))
                r = np.where(better, r_new, r)
        return r

    def f(self, a, P):
        r = self.argmax(a, P)
        Pp = self._primal_params(P, np.shape(r))
        with np.errstate(all="ignore"):
            val = a * r - self.primal.f(r, Pp)
        val = np.where(np.isfinite(r), np.maximum(val, 0.0), np.inf)
        return np.where(a > 0, val, 0.0)

    def df(self, a, P):
        return np.where(a > 0, self.argmax(a, P), 0.0)

    def d2f(self, a, P):
        r = self.argmax(a, P)
        Pp = self._primal_params(P, np.shape(r))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1.0 / self.primal.d2f(r, Pp)
        return np.where(np.isnan(out), np.inf, out)

    def _primal_params(self, P, shape):
        rid = np.broadcast_to(np.asarray(P["_row"]), shape)
        keys = self.rows[0].keys()
        out = {k: np.empty(shape) for k in keys}
        for k in np.unique(rid):
            m = rid == k
            for key in keys:
                out[key][m] = self.rows[int(k)][key]
        return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PhiFunction:
    """A generalized Phi-function with per-node parameters.

    Use the constructors (:meth:`power`, :meth:`power_log`, :meth:`two_power`,
    :meth:`from_expression`, :meth:`custom`) rather than the raw initializer.
    """

    kind: Kind
    params: Mapping[str, np.ndarray]
    conjugate_mode: ConjugateMode = ConjugateMode.NUMERICAL
    formula: _Formula = field(default=None, repr=False)
    label: str = ""

    # -- constructors -------------------------------------------------------

    @classmethod
    def power(cls, p, conjugate_mode=ConjugateMode.CLOSED_FORM):
        P = {"p": _param(p)}
        _check_exponent(P["p"], "p")
        return cls(Kind.POWER, P, ConjugateMode(conjugate_mode), _FAMILY[Kind.POWER])

    @classmethod
    def power_log(cls, p, q=1.0):
        P = {"p": _param(p), "q": _param(q)}
        _check_exponent(P["p"], "p")
        if np.any(P["q"] < 1) or not np.all(np.isfinite(P["q"])):
            raise ValueError("power_log needs 1 <= q < inf")
        return cls(Kind.POWER_LOG, P, ConjugateMode.NUMERICAL, _FAMILY[Kind.POWER_LOG])

    @classmethod
    def two_power(cls, p, q, a=1.0, b=1.0):
        P = {"p": _param(p), "q": _param(q), "a": _param(a), "b": _param(b)}
        _check_exponent(P["p"], "p")
        _check_exponent(P["q"], "q")
        if np.any(P["a"] < 0) or np.any(P["b"] < 0) or np.any(P["a"] + P["b"] <= 0):
            raise ValueError("two_power needs a, b >= 0 with a + b > 0")
        return cls(Kind.TWO_POWER, P, ConjugateMode.NUMERICAL, _FAMILY[Kind.TWO_POWER])

    @classmethod
    def from_expression(cls, expr: str, **params):
        """Custom phi from a sympy expression in ``r >= 0`` (and named parameters)."""
        P = {k: _param(v) for k, v in params.items()}
        return cls(Kind.CUSTOM, P, ConjugateMode.NUMERICAL, _symbolic(expr, list(P)), label=expr)

    @classmethod
    def custom(cls, value: Callable, deriv: Callable, curvature: Callable | None = None, label="custom", **params):
        """Custom phi from vectorized callables ``value(a, **params)`` etc. on ``a >= 0``."""
        P = {k: _param(v) for k, v in params.items()}
        return cls(Kind.CUSTOM, P, ConjugateMode.NUMERICAL, _Callables(value, deriv, curvature, label), label=label)

    # -- evaluation ---------------------------------------------------------

    def _P(self, idx):
        if idx is None:
            return dict(self.params)
        return {k: (v if v.ndim == 0 else v[idx]) for k, v in self.params.items()}

    def value(self, r, idx=None):
        """phi(x, r) broadcasting ``r`` against the per-node parameters."""
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore"):
            return self.formula.f(np.abs(r), self._P(idx))

    def deriv(self, r, idx=None):
        """alpha(x, r) = d phi / dr; odd in r and exactly 0 at r = 0."""
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore"):
            return np.sign(r) * self.formula.df(np.abs(r), self._P(idx))

    def curvature(self, r, idx=None):
        """d^2 phi / dr^2; may be 0 or +inf at r = 0."""
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore"):
            return self.formula.d2f(np.abs(r), self._P(idx))

    @property
    def n_nodes(self) -> int | None:
        sizes = {v.size for v in self.params.values() if v.ndim > 0}
        return sizes.pop() if sizes else None

    def exponent_bounds(self):
        """(min, max) over nodes of the growth exponents, for the families that have them."""
        keys = [k for k in ("p", "q") if k in self.params]
        return {k: (float(np.min(self.params[k])), float(np.max(self.params[k]))) for k in keys}

    # -- conjugation --------------------------------------------------------

    @cached_property
    def conjugate(self) -> "PhiFunction":
        return _conjugate(self)


def _param(v):
    arr = np.asarray(v, dtype=float)
    if arr.ndim > 1:
        raise ValueError("parameters must be scalars or 1-D per-node tables")
    if not np.all(np.isfinite(arr)):
        raise ValueError("parameters must be finite")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _check_exponent(p, name):
    if np.any(p <= 1) or not np.all(np.isfinite(p)):
        raise ValueError(f"exponent {name} must satisfy 1 < {name} < inf")


def _unique_rows(params):
    """Split per-node parameters into distinct rows; returns (rows, row index per node)."""
    keys = list(params)
    n = max([v.size for v in params.values() if v.ndim > 0], default=None)
    if n is None:
        return [{k: float(params[k]) for k in keys}], np.asarray(0)
    M = np.column_stack([np.broadcast_to(params[k], (n,)) for k in keys]) if keys else np.zeros((n, 0))
    uniq, inv = np.unique(M, axis=0, return_inverse=True)
    rows = [{k: float(u[j]) for j, k in enumerate(keys)} for u in uniq]
    return rows, inv.reshape(-1)


def _conjugate(phi: PhiFunction) -> PhiFunction:
    if phi.kind is Kind.POWER and phi.conjugate_mode is ConjugateMode.CLOSED_FORM:
        p = phi.params["p"]
        return PhiFunction.power(p / (p - 1.0))
    rows, rid = _unique_rows(phi.params)
    table = _TabulatedConjugate(phi.formula, rows)
    P = {"_row": _param(rid)}
    return PhiFunction(Kind.CUSTOM, P, ConjugateMode.NUMERICAL, table, label=f"conjugate({phi.kind.value})")


def conjugate(phi: PhiFunction) -> PhiFunction:
    """Convex conjugate in the second variable (cached on ``phi``)."""
    return phi.conjugate


# scalar entry points -------------------------------------------------------


def eval_phi(phi: PhiFunction, node_index: int, r: float) -> float:
    if not np.isfinite(r):
        raise ValueError(f"r must be finite, got {r}")
    return float(phi.value(r, idx=node_index))


def eval_alpha(phi: PhiFunction, node_index: int, r: float) -> float:
    if not np.isfinite(r):
        raise ValueError(f"r must be finite, got {r}")
    return float(phi.deriv(r, idx=node_index))


# ---------------------------------------------------------------------------
# doubling constants and structural validation


def _ratio_grid(r_min, r_max, samples):
    """Log grid anchored at ``r_min`` with ``samples`` points per decade (nested in r_max)."""
    if r_max <= 0 or r_min <= 0:
        raise ValueError("need r_min, r_max > 0")
    if samples < 2:
        raise ValueError("need samples >= 2")
    j_max = int(math.floor(samples * math.log10(r_max / r_min) + 1e-9))
    return r_min * 10.0 ** (np.arange(max(j_max, 0) + 1) / samples)


def _doubling_ratios(phi: PhiFunction, r):
    rows, _ = _unique_rows(phi.params)
    P = {k: np.array([row[k] for row in rows]) for k in rows[0]} if rows[0] else {}
    rr = np.asarray(r, dtype=float)[:, None]
    with np.errstate(all="ignore"):
        num = phi.formula.f(2 * rr, P) + 0.0 * rr
        den = phi.formula.f(rr, P) + 0.0 * rr
        ratio = num / den
    return np.where(np.isnan(ratio) | (den <= 0), np.inf, ratio)


def delta2_constant(phi: PhiFunction, r_max: float, samples: int = 20, r_min: float = 1e-6) -> float:
    """Sampled sup of phi(x, 2r) / phi(x, r) over nodes and r in [r_min, r_max].

    Returns ``inf`` when the ratio overflows, which is how a missing doubling
    condition shows up.
    """
    if r_max < r_min:
        raise ValueError("need r_max >= r_min")
    ratio = _doubling_ratios(phi, _ratio_grid(r_min, r_max, samples))
    return float(np.max(ratio))


def doubling_infimum(phi: PhiFunction, r_max: float, samples: int = 20, r_min: float = 1e-6) -> float:
    """Sampled inf of phi(x, 2r) / phi(x, r); the best super-doubling constant seen."""
    ratio = _doubling_ratios(phi, _ratio_grid(r_min, r_max, samples))
    return float(np.min(ratio))


def delta2_profile(phi: PhiFunction, r_min=1e-6, r_max=1e6, samples=20):
    """Running estimate of the doubling constant at every decade of ``r_max``."""
    tops = r_min * 10.0 ** np.arange(1, int(round(math.log10(r_max / r_min))) + 1)
    grid = _ratio_grid(r_min, r_max, samples)
    ratio = _doubling_ratios(phi, grid)
    run = np.maximum.accumulate(np.max(ratio, axis=1))
    return [(float(t), float(run[np.searchsorted(grid, t * (1 + 1e-12)) - 1])) for t in tops]


def delta2_diverges(profile, growth=0.10) -> bool:
    """True if the estimate is infinite or still grows by more than ``growth``
    over the last decade of the profile."""
    vals = [k for _, k in profile]
    if not np.all(np.isfinite(vals)):
        return True
    return len(vals) >= 2 and vals[-1] > (1.0 + growth) * vals[-2]


def k0_lower_bound(K: float) -> float:
    """Guaranteed super-doubling constant 2 + 1/(K - 2) implied by a doubling constant K > 2."""
    if not K > 2:
        raise ValueError(f"need K > 2, got {K}")
    if math.isinf(K):
        return 2.0
    return 2.0 + 1.0 / (K - 2.0)


def common_doubling_constant(phi: PhiFunction, r_max=1e6, samples=20, r_min=1e-6) -> float:
    """One constant K serving both phi and phi* (both doubling conditions at once)."""
    return max(delta2_constant(phi, r_max, samples, r_min), delta2_constant(phi.conjugate, r_max, samples, r_min))


@dataclass
class ValidationReport:
    even: bool
    zero_at_origin: bool
    alpha_strictly_increasing: bool
    nfun_small: bool
    nfun_large: bool
    delta2_phi: bool
    delta2_conjugate: bool
    young_equality: bool
    K_phi: float = math.nan
    K_conjugate: float = math.nan
    young_defect: float = math.nan

    CHECKS = ("even", "zero_at_origin", "alpha_strictly_increasing", "nfun_small", "nfun_large",
              "delta2_phi", "delta2_conjugate", "young_equality")

    @property
    def passed(self) -> bool:
        return all(getattr(self, c) for c in self.CHECKS)

    def failures(self) -> list[str]:
        return [c for c in self.CHECKS if not getattr(self, c)]


def validate_assumption_alpha(phi: PhiFunction, r_grid=None, tol: float = 1e-8, trend: float = 1e-3) -> ValidationReport:
    """Sampled check of the structural hypotheses on phi and alpha.

    ``r_grid`` (positive, several decades; default 1e-6..1e6) drives every test.
    Limits are judged by monotone trends over the two extreme decades.
    """
    r = np.unique(np.abs(np.asarray(r_grid if r_grid is not None else np.logspace(-6, 6, 121), dtype=float)))
    r = r[r > 0]
    rc = r[:, None]
    sym = np.concatenate([-r[::-1], [0.0], r])[:, None]

    with np.errstate(all="ignore"):
        even = bool(np.array_equal(phi.value(-rc), phi.value(rc)) and np.array_equal(phi.deriv(-rc), -phi.deriv(rc)))
        zero = bool(np.all(phi.value(np.zeros(1)) == 0) and np.all(phi.deriv(np.zeros(1)) == 0))
        al = phi.deriv(sym) + 0.0 * sym
        increasing = bool(np.all(np.diff(al, axis=0) > 0))

        lo, hi = r[0], r[-1]
        pts_lo = np.array([lo, 10 * lo, 100 * lo])[:, None]
        pts_hi = np.array([hi / 100, hi / 10, hi])[:, None]
        m_lo = phi.value(pts_lo) / pts_lo
        m_hi = phi.value(pts_hi) / pts_hi
        small = bool(np.all(m_lo[1:] >= (1 + trend) * m_lo[:-1]))
        large = bool(np.all(m_hi[1:] >= (1 + trend) * m_hi[:-1]))

    decades = max(int(round(math.log10(hi / lo))), 1)
    K_phi = delta2_profile(phi, lo, lo * 10 ** decades)
    conj = phi.conjugate
    K_conj = delta2_profile(conj, lo, lo * 10 ** decades)
    d2_phi = not delta2_diverges(K_phi)
    d2_conj = not delta2_diverges(K_conj)

    with np.errstate(all="ignore"):
        s = phi.deriv(rc)
        rs = rc * s
        defect = np.abs(rs - phi.value(rc) - conj.value(s)) / (1.0 + rs)
        young_defect = float(np.nanmax(np.where(np.isfinite(defect), defect, np.inf)))

    return ValidationReport(
        even=even, zero_at_origin=zero, alpha_strictly_increasing=increasing,
        nfun_small=small, nfun_large=large, delta2_phi=d2_phi, delta2_conjugate=d2_conj,
        young_equality=young_defect <= tol,
        K_phi=K_phi[-1][1], K_conjugate=K_conj[-1][1], young_defect=young_defect,
    )
