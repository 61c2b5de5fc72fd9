"""Run configuration: strict JSON parsing into frozen dataclasses and back.

Every validation error names the JSON path of the offending field, e.g.
``domain.n`` or ``phi.p.table``. Unknown keys are rejected.

Per-node parameters (``phi.p``, ``energy.m``, ...) and grid functions (``u0``,
source profiles) share one spec language:

* a number (constant),
* ``{"ramp": [v0, v1]}``, linear from ``a`` to ``b``,
* ``{"sin": [mean, amp, periods]}``,
* ``{"sine": [amp, k]}``, ``amp * sin(k pi s)`` with ``s = (x - a)/(b - a)``,
* ``{"bump": [amp]}``, ``amp * 16 s^2 (1 - s)^2``,
* ``{"table": [...]}`` with one value per node.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .grid import Grid, TimeGrid, make_grid, node_profile


class ConfigError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


_GENERATORS = {"ramp": 2, "sin": 3, "sine": 2, "bump": 1, "table": None}


# ---------------------------------------------------------------------------
# low level checks


def _obj(d, path, allowed, required=()):
    if not isinstance(d, dict):
        raise ConfigError(path, f"expected an object, got {type(d).__name__}")
    for k in d:
        if k not in allowed:
            raise ConfigError(_join(path, k), "unknown key")
    for k in required:
        if k not in d:
            raise ConfigError(_join(path, k), "required key missing")
    return d


def _join(path, key):
    return f"{path}.{key}" if path else str(key)


def _num(v, path, lo=-math.inf, hi=math.inf, lo_open=False, hi_open=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(path, f"expected a finite number, got {v!r}")
    if v < lo or v > hi or (lo_open and v == lo) or (hi_open and v == hi):
        lb = "(" if lo_open else "["
        rb = ")" if hi_open else "]"
        raise ConfigError(path, f"value {v!r} outside {lb}{lo}, {hi}{rb}")
    return float(v)


def _int(v, path, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(path, f"must be >= {lo}, got {v}")
    return v


def _enum(v, path, choices):
    if v not in choices:
        raise ConfigError(path, f"expected one of {sorted(choices)}, got {v!r}")
    return v


def _spec(v, path, n, lo=-math.inf, lo_open=False):
    """Validate a parameter/grid-function spec; returns a normalized JSON value."""
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return _num(v, path, lo=lo, lo_open=lo_open)
    if not isinstance(v, dict) or len(v) != 1:
        raise ConfigError(path, f"expected a number or a one-key generator object, got {v!r}")
    (key, val), = v.items()
    sub = _join(path, key)
    if key not in _GENERATORS:
        raise ConfigError(sub, f"unknown generator (expected one of {sorted(_GENERATORS)})")
    if not isinstance(val, list):
        raise ConfigError(sub, "expected a list")
    want = _GENERATORS[key]
    if want is None:
        if len(val) != n:
            raise ConfigError(sub, f"table has length {len(val)}, expected n={n}")
        vals = [_num(x, f"{sub}[{i}]", lo=lo, lo_open=lo_open) for i, x in enumerate(val)]
        return {key: vals}
    if len(val) != want:
        raise ConfigError(sub, f"expected {want} entries, got {len(val)}")
    vals = [_num(x, f"{sub}[{i}]") for i, x in enumerate(val)]
    if key == "ramp" and lo > -math.inf:
        for i, x in enumerate(vals):
            _num(x, f"{sub}[{i}]", lo=lo, lo_open=lo_open)
    if key == "sin" and lo > -math.inf:
        mean, amp, _ = vals
        _num(mean - abs(amp), sub, lo=lo, lo_open=lo_open)
    return {key: vals}


def grid_function(spec, grid: Grid) -> np.ndarray:
    return np.asarray(node_profile(spec, grid), dtype=float) + np.zeros(grid.n)


# ---------------------------------------------------------------------------
# blocks


@dataclass(frozen=True)
class DomainConfig:
    a: float = 0.0
    b: float = 1.0
    n: int = 64

    def grid(self) -> Grid:
        return make_grid(self.a, self.b, self.n)


@dataclass(frozen=True)
class TimeConfig:
    T: float = 1.0
    K: int = 64

    def time_grid(self) -> TimeGrid:
        return TimeGrid(self.T, self.K)


@dataclass(frozen=True)
class PhiConfig:
    kind: str = "power"
    p: Any = 2.0
    q: Any = None
    a: Any = None
    b: Any = None
    expr: str | None = None
    params: dict = field(default_factory=dict)
    conjugate: str = "closed_form"


@dataclass(frozen=True)
class EnergyConfig:
    kind: str = "m_laplacian"
    m: Any = 2.0
    s: float | None = None
    c_s: float = 1.0


@dataclass(frozen=True)
class SourceConfig:
    kind: str = "zero"
    g: Any = None
    amplitude: float = 1.0
    omega: float = 2 * math.pi
    phase: float = 0.0
    offset: float = 0.0
    coeffs: tuple = ()
    values: tuple = ()


@dataclass(frozen=True)
class SolverBlock:
    grad_tol: float | None = None
    max_iters: int = 200
    hessian_floor: float = 1e-10


@dataclass(frozen=True)
class BetaConfig:
    kind: str = "phi"
    scale: float = 1.0
    p: float | None = None
    q: float | None = None
    a: float = 1.0
    b: float = 1.0
    expr: str | None = None


@dataclass(frozen=True)
class ModeConfig:
    kind: str = "subdifferential"
    beta: BetaConfig | None = None


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    snapshots: tuple = ()
    precision: int = 17


@dataclass(frozen=True)
class ProxConfig:
    lambdas: tuple = tuple(2.0 ** -k for k in range(11))
    u: Any = None


@dataclass(frozen=True)
class RunConfig:
    domain: DomainConfig = DomainConfig()
    time: TimeConfig = TimeConfig()
    phi: PhiConfig = PhiConfig()
    energy: EnergyConfig = EnergyConfig()
    source: SourceConfig = SourceConfig()
    u0: Any = 0.0
    solver: SolverBlock = SolverBlock()
    mode: ModeConfig = ModeConfig()
    output: OutputConfig = OutputConfig()
    prox: ProxConfig = ProxConfig()
    seed: int = 0


# ---------------------------------------------------------------------------
# parsing


def _parse_domain(d):
    _obj(d, "domain", {"a", "b", "n"}, ("n",))
    a = _num(d.get("a", 0.0), "domain.a")
    b = _num(d.get("b", 1.0), "domain.b")
    if not b > a:
        raise ConfigError("domain.b", f"need b > a, got a={a}, b={b}")
    n = _int(d["n"], "domain.n", lo=1)
    return DomainConfig(a, b, n)


def _parse_time(d):
    _obj(d, "time", {"T", "K"}, ("K",))
    T = _num(d.get("T", 1.0), "time.T", lo=0.0, lo_open=True)
    K = _int(d["K"], "time.K", lo=1)
    return TimeConfig(T, K)


def _parse_phi(d, n):
    _obj(d, "phi", {"kind", "p", "q", "a", "b", "expr", "params", "conjugate"}, ("kind",))
    kind = _enum(d["kind"], "phi.kind", {"power", "power_log", "two_power", "custom"})
    conj = _enum(d.get("conjugate", "closed_form"), "phi.conjugate", {"closed_form", "numerical"})
    if kind == "custom":
        for k in ("p", "q", "a", "b"):
            if k in d:
                raise ConfigError(f"phi.{k}", "not used by a custom phi; put parameters in phi.params")
        if not isinstance(d.get("expr"), str):
            raise ConfigError("phi.expr", "custom phi needs an expression string")
        params = _obj(d.get("params", {}), "phi.params", set(d.get("params", {})))
        params = {k: _spec(v, f"phi.params.{k}", n) for k, v in sorted(params.items())}
        return PhiConfig(kind, None, None, None, None, d["expr"], params, conj)
    if "expr" in d or "params" in d:
        raise ConfigError("phi.expr" if "expr" in d else "phi.params", f"not used by kind {kind!r}")
    if "p" not in d:
        raise ConfigError("phi.p", "required key missing")
    p = _spec(d["p"], "phi.p", n, lo=1.0, lo_open=True)
    q = a = b = None
    if kind == "power":
        for k in ("q", "a", "b"):
            if k in d:
                raise ConfigError(f"phi.{k}", "not used by kind 'power'")
    elif kind == "power_log":
        for k in ("a", "b"):
            if k in d:
                raise ConfigError(f"phi.{k}", "not used by kind 'power_log'")
        q = _spec(d.get("q", 1.0), "phi.q", n, lo=1.0)
    else:
        if "q" not in d:
            raise ConfigError("phi.q", "required key missing")
        q = _spec(d["q"], "phi.q", n, lo=1.0, lo_open=True)
        a = _spec(d.get("a", 1.0), "phi.a", n, lo=0.0, lo_open=True)
        b = _spec(d.get("b", 1.0), "phi.b", n, lo=0.0, lo_open=True)
    return PhiConfig(kind, p, q, a, b, None, {}, conj)


def _parse_energy(d, n):
    _obj(d, "energy", {"kind", "m", "s", "c_s"}, ("kind",))
    kind = _enum(d["kind"], "energy.kind", {"zero", "m_laplacian", "fractional"})
    if kind == "zero":
        _obj(d, "energy", {"kind"})
        return EnergyConfig("zero", None, None, 1.0)
    if kind == "m_laplacian":
        _obj(d, "energy", {"kind", "m"})
        return EnergyConfig(kind, _spec(d.get("m", 2.0), "energy.m", n, lo=1.0, lo_open=True), None, 1.0)
    _obj(d, "energy", {"kind", "s", "c_s"}, ("s",))
    s = _num(d["s"], "energy.s", 0.0, 1.0, lo_open=True, hi_open=True)
    c_s = _num(d.get("c_s", 1.0), "energy.c_s", lo=0.0, lo_open=True)
    return EnergyConfig(kind, None, s, c_s)


def _parse_source(d, n):
    _obj(d, "source", {"kind", "g", "amplitude", "omega", "phase", "offset", "coeffs", "values"}, ("kind",))
    kind = _enum(d["kind"], "source.kind", {"zero", "constant", "sinusoidal", "separable", "table"})
    allowed = {
        "zero": {"kind"},
        "constant": {"kind", "g"},
        "sinusoidal": {"kind", "g", "amplitude", "omega", "phase", "offset"},
        "separable": {"kind", "g", "coeffs"},
        "table": {"kind", "values"},
    }[kind]
    _obj(d, "source", allowed, ("g",) if "g" in allowed else ())
    g = _spec(d["g"], "source.g", n) if "g" in allowed else None
    out = SourceConfig(kind, g)
    if kind == "sinusoidal":
        out = SourceConfig(kind, g, _num(d.get("amplitude", 1.0), "source.amplitude"),
                           _num(d.get("omega", 2 * math.pi), "source.omega"),
                           _num(d.get("phase", 0.0), "source.phase"), _num(d.get("offset", 0.0), "source.offset"))
    elif kind == "separable":
        c = d.get("coeffs", [1.0])
        if not isinstance(c, list) or not c:
            raise ConfigError("source.coeffs", "expected a nonempty list")
        out = SourceConfig(kind, g, coeffs=tuple(_num(x, f"source.coeffs[{i}]") for i, x in enumerate(c)))
    elif kind == "table":
        rows = d.get("values")
        if not isinstance(rows, list) or not rows:
            raise ConfigError("source.values", "expected a nonempty list of rows")
        vals = []
        for i, row in enumerate(rows):
            p = f"source.values[{i}]"
            if not isinstance(row, list) or len(row) != n:
                raise ConfigError(p, f"expected a row of length n={n}")
            vals.append(tuple(_num(x, f"{p}[{j}]") for j, x in enumerate(row)))
        out = SourceConfig(kind, values=tuple(vals))
    return out


def _parse_solver(d):
    _obj(d, "solver", {"grad_tol", "max_iters", "hessian_floor"})
    tol = d.get("grad_tol")
    if tol is not None:
        tol = _num(tol, "solver.grad_tol", lo=0.0, lo_open=True)
    return SolverBlock(tol, _int(d.get("max_iters", 200), "solver.max_iters", lo=1),
                       _num(d.get("hessian_floor", 1e-10), "solver.hessian_floor", lo=0.0, hi=1.0))


def _parse_mode(d):
    _obj(d, "mode", {"kind", "beta"}, ("kind",))
    kind = _enum(d["kind"], "mode.kind", {"subdifferential", "generalized"})
    if kind == "subdifferential":
        if "beta" in d:
            raise ConfigError("mode.beta", "only used in generalized mode")
        return ModeConfig(kind)
    if "beta" not in d:
        raise ConfigError("mode.beta", "generalized mode needs a beta block")
    b = _obj(d["beta"], "mode.beta", {"kind", "scale", "p", "q", "a", "b", "expr"}, ("kind",))
    bk = _enum(b["kind"], "mode.beta.kind", {"phi", "two_power", "arctan", "expr"})
    allowed = {"phi": {"kind", "scale"}, "two_power": {"kind", "p", "q", "a", "b"},
               "arctan": {"kind"}, "expr": {"kind", "expr"}}[bk]
    _obj(b, "mode.beta", allowed)
    if bk == "phi":
        beta = BetaConfig(bk, scale=_num(b.get("scale", 1.0), "mode.beta.scale", lo=0.0, lo_open=True))
    elif bk == "two_power":
        _obj(b, "mode.beta", allowed, ("p", "q"))
        beta = BetaConfig(bk, p=_num(b["p"], "mode.beta.p", lo=1.0, lo_open=True),
                          q=_num(b["q"], "mode.beta.q", lo=1.0, lo_open=True),
                          a=_num(b.get("a", 1.0), "mode.beta.a", lo=0.0, lo_open=True),
                          b=_num(b.get("b", 1.0), "mode.beta.b", lo=0.0, lo_open=True))
    elif bk == "expr":
        if not isinstance(b.get("expr"), str):
            raise ConfigError("mode.beta.expr", "expected an expression string in r")
        beta = BetaConfig(bk, expr=b["expr"])
    else:
        beta = BetaConfig(bk)
    return ModeConfig(kind, beta)


def _parse_output(d, K):
    _obj(d, "output", {"dir", "snapshots", "precision"})
    out_dir = d.get("dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.dir", "expected a nonempty string")
    snaps = d.get("snapshots", [])
    if not isinstance(snaps, list):
        raise ConfigError("output.snapshots", "expected a list of step indices")
    snaps = tuple(sorted({_int(k, f"output.snapshots[{i}]", lo=0) for i, k in enumerate(snaps)}))
    if snaps and snaps[-1] > K:
        raise ConfigError("output.snapshots", f"index {snaps[-1]} exceeds K={K}")
    prec = _int(d.get("precision", 17), "output.precision", lo=1)
    if prec > 17:
        raise ConfigError("output.precision", "at most 17 significant digits")
    return OutputConfig(out_dir, snaps, prec)


def _parse_prox(d, n):
    _obj(d, "prox", {"lambdas", "u"})
    lams = d.get("lambdas", list(ProxConfig.lambdas))
    if not isinstance(lams, list) or not lams:
        raise ConfigError("prox.lambdas", "expected a nonempty list")
    lams = tuple(_num(x, f"prox.lambdas[{i}]", lo=0.0, lo_open=True) for i, x in enumerate(lams))
    u = _spec(d["u"], "prox.u", n) if "u" in d else None
    return ProxConfig(lams, u)


def parse_dict(d: dict) -> RunConfig:
    """Validate a decoded JSON document and build a :class:`RunConfig`."""
    _obj(d, "", {"domain", "time", "phi", "energy", "source", "u0", "solver", "mode", "output", "prox", "seed"},
         ("domain", "time", "phi", "energy"))
    domain = _parse_domain(d["domain"])
    n = domain.n
    time = _parse_time(d["time"])
    return RunConfig(
        domain=domain,
        time=time,
        phi=_parse_phi(d["phi"], n),
        energy=_parse_energy(d["energy"], n),
        source=_parse_source(d.get("source", {"kind": "zero"}), n),
        u0=_spec(d.get("u0", 0.0), "u0", n),
        solver=_parse_solver(d.get("solver", {})),
        mode=_parse_mode(d.get("mode", {"kind": "subdifferential"})),
        output=_parse_output(d.get("output", {}), time.K),
        prox=_parse_prox(d.get("prox", {}), n),
        seed=_int(d.get("seed", 0), "seed", lo=0),
    )


def parse_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file {path} does not exist")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"malformed JSON: {exc}") from exc
    return parse_dict(doc)


# ---------------------------------------------------------------------------
# serialization


def _prune(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def to_dict(cfg: RunConfig) -> dict:
    """Inverse of :func:`parse_dict`: ``parse_dict(to_dict(cfg)) == cfg``."""
    phi = asdict(cfg.phi)
    if cfg.phi.kind == "custom":
        phi = {"kind": "custom", "expr": cfg.phi.expr, "params": dict(cfg.phi.params),
               "conjugate": cfg.phi.conjugate}
    else:
        phi.pop("expr")
        phi.pop("params")
        phi = _prune(phi)
    energy = {"kind": cfg.energy.kind}
    if cfg.energy.kind == "m_laplacian":
        energy["m"] = cfg.energy.m
    elif cfg.energy.kind == "fractional":
        energy.update(s=cfg.energy.s, c_s=cfg.energy.c_s)
    src = cfg.source
    source = {"kind": src.kind}
    if src.kind in ("constant", "sinusoidal", "separable"):
        source["g"] = src.g
    if src.kind == "sinusoidal":
        source.update(amplitude=src.amplitude, omega=src.omega, phase=src.phase, offset=src.offset)
    elif src.kind == "separable":
        source["coeffs"] = list(src.coeffs)
    elif src.kind == "table":
        source["values"] = [list(r) for r in src.values]
    mode = {"kind": cfg.mode.kind}
    if cfg.mode.beta is not None:
        b = cfg.mode.beta
        keep = {"phi": ("kind", "scale"), "two_power": ("kind", "p", "q", "a", "b"),
                "arctan": ("kind",), "expr": ("kind", "expr")}[b.kind]
        mode["beta"] = {k: getattr(b, k) for k in keep}
    prox = {"lambdas": list(cfg.prox.lambdas)}
    if cfg.prox.u is not None:
        prox["u"] = cfg.prox.u
    return {
        "domain": asdict(cfg.domain),
        "time": asdict(cfg.time),
        "phi": phi,
        "energy": energy,
        "source": source,
        "u0": cfg.u0,
        "solver": _prune(asdict(cfg.solver)),
        "mode": mode,
        "output": {"dir": cfg.output.dir, "snapshots": list(cfg.output.snapshots),
                   "precision": cfg.output.precision},
        "prox": prox,
        "seed": cfg.seed,
    }


def serialize(cfg: RunConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# building the numerical objects


def build_phi(cfg: RunConfig):
    from .phi import PhiFunction

    grid = cfg.domain.grid()
    c = cfg.phi
    P = lambda spec: node_profile(spec, grid)  # noqa: E731
    if c.kind == "power":
        return PhiFunction.power(P(c.p), conjugate_mode=c.conjugate)
    if c.kind == "power_log":
        return PhiFunction.power_log(P(c.p), P(c.q))
    if c.kind == "two_power":
        return PhiFunction.two_power(P(c.p), P(c.q), P(c.a), P(c.b))
    return PhiFunction.from_expression(c.expr, **{k: P(v) for k, v in c.params.items()})


def build_energy(cfg: RunConfig, grid: Grid):
    from .energies import Energy

    c = cfg.energy
    if c.kind == "zero":
        return Energy.zero(grid)
    if c.kind == "m_laplacian":
        return Energy.m_laplacian(grid, node_profile(c.m, grid))
    return Energy.fractional(grid, c.s, c.c_s)


def build_source(cfg: RunConfig, grid: Grid):
    from . import stepper as st

    c = cfg.source
    if c.kind == "zero":
        return st.ZeroSource(grid.n)
    if c.kind == "table":
        return st.TableSource(np.array(c.values), cfg.time.T)
    g = grid_function(c.g, grid)
    if c.kind == "constant":
        return st.ConstantSource(g)
    if c.kind == "sinusoidal":
        return st.sinusoidal_source(g, c.amplitude, c.omega, c.phase, c.offset)
    return st.separable_source(g, c.coeffs)


def build_beta(cfg: RunConfig, phi):
    from .phi import PhiFunction
    from .stepper import Nonlinearity

    b = cfg.mode.beta
    if b is None:
        return None
    if b.kind == "phi":
        return Nonlinearity.from_phi(phi, b.scale)
    if b.kind == "two_power":
        return Nonlinearity.from_phi(PhiFunction.two_power(b.p, b.q, b.a, b.b))
    if b.kind == "arctan":
        return Nonlinearity.arctan()
    return Nonlinearity.from_expression(b.expr)


def build_problem(cfg: RunConfig):
    """Assemble the :class:`~orliczflow.stepper.Problem` described by ``cfg``."""
    from .modular import ModularSpace
    from .solver import SolverConfig
    from .stepper import Problem

    grid = cfg.domain.grid()
    phi = build_phi(cfg)
    space = ModularSpace(grid, phi)
    solver = None
    if cfg.solver.grad_tol is not None:
        solver = SolverConfig(grad_tol=cfg.solver.grad_tol, max_iters=cfg.solver.max_iters,
                              hessian_floor=cfg.solver.hessian_floor)
    prob = Problem(space, build_energy(cfg, grid), cfg.time.time_grid(), grid_function(cfg.u0, grid),
                   build_source(cfg, grid), cfg.mode.kind, build_beta(cfg, phi), solver)
    if solver is None and (cfg.solver.max_iters != 200 or cfg.solver.hessian_floor != 1e-10):
        auto = prob.solver_config()
        prob.solver = SolverConfig(grad_tol=auto.grad_tol, max_iters=cfg.solver.max_iters,
                                   hessian_floor=cfg.solver.hessian_floor)
    return prob
