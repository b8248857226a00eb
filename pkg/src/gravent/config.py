"""JSON run configuration: schema, validation, canonical hashing.

One JSON file describes a system (dimensionless or SI) plus optional
command sections (dynamics, sweep, rate, feasibility, validate); each CLI
command reads the sections it needs.  Parsing is strict: unknown keys and
type errors raise ConfigError with the dotted field path, and
parse(serialize(cfg)) == cfg holds exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .params import (ModelParams, PhysicalSetup, coulomb_distance_for_drive,
                     derive_model_params, derive_squeezed_frame)
from .sweep import AxisSpec, TimeRule

_MODES = ("dimensionless", "si")
_BACKENDS = ("analytic", "fock", "both")
_HAMILTONIANS = ("squeezed", "lab")
_BIPARTITIONS = ("tp_qubit", "tp_mediator", "qubit_mediator")


def _check_keys(d: dict, path: str, allowed, required=()):
    if not isinstance(d, dict):
        raise ConfigError(path, f"expected an object, got {type(d).__name__}")
    for key in d:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", "unknown key")
    for key in required:
        if key not in d:
            raise ConfigError(f"{path}.{key}", "missing required key")


def _num(d, key, path, default=None, required=False, allow_none=False):
    if key not in d:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required key")
        return default
    v = d[key]
    if v is None:
        if allow_none:
            return None
        raise ConfigError(f"{path}.{key}", "null not allowed here")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {v!r}")
    return float(v)


def _int(d, key, path, default=None, required=False):
    if key not in d:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required key")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {v!r}")
    return v


def _str(d, key, path, default=None, required=False, choices=None):
    if key not in d:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required key")
        return default
    v = d[key]
    if not isinstance(v, str):
        raise ConfigError(f"{path}.{key}", f"expected a string, got {v!r}")
    if choices and v not in choices:
        raise ConfigError(f"{path}.{key}", f"must be one of {choices}")
    return v


def _complex(d, key, path, default):
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(float(v), 0.0)
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                    for x in v)):
        return complex(float(v[0]), float(v[1]))
    raise ConfigError(f"{path}.{key}",
                      "expected a number or a [re, im] pair")


def _variants(d, key, path):
    if key not in d:
        return ()
    raw = d[key]
    if not isinstance(raw, list):
        raise ConfigError(f"{path}.{key}", "expected a list of [label, "
                          "{overrides}] pairs")
    out = []
    for i, item in enumerate(raw):
        if (not isinstance(item, list) or len(item) != 2
                or not isinstance(item[0], str)
                or not isinstance(item[1], dict)):
            raise ConfigError(f"{path}.{key}[{i}]",
                              "expected [label, {overrides}]")
        out.append((item[0], dict(item[1])))
    return tuple(out)


@dataclass(frozen=True)
class MediatorBlock:
    """Initial mediator state: D(alpha0) S(xi) vacuum in the moving frame.

    xi_mag = null matches the squeezing to the frame (the self-consistent
    ground-state choice); a number pins it, 0.0 giving a plain coherent
    state.  theta is the squeezing phase.
    """

    alpha0: complex = 1.0 + 0.0j
    xi_mag: float | None = None
    theta: float = math.pi


@dataclass(frozen=True)
class DephasingBlock:
    gamma: float = 0.0
    gamma_tp: float = 0.0


@dataclass(frozen=True)
class DimensionlessSystem:
    """Couplings in units of the modified mediator frequency."""

    g_a: float
    g_b: float
    F: float | None = None
    delta: float | None = None
    omega_a: float = 0.0
    omega_b: float = 0.0
    epsilon: float = 0.0


@dataclass(frozen=True)
class SISystem:
    """Raw experimental inputs (SI units, angular frequencies).

    The two-phonon drive is fixed by exactly one of: the tip distance r0,
    the detuning delta = omega_tilde - 4F, or F itself.  Given delta or F
    the tip distance is back-solved, since a detuning of interest can sit
    ten orders of magnitude below omega_tilde where r0 cannot be typed in
    decimal form.
    """

    m_a: float
    m_c: float
    d: float
    d0: float
    omega_c: float
    omega_b: float
    omega_a0: float = 0.0
    Q1: float = 0.0
    Q2: float = 0.0
    r0: float | None = None
    delta: float | None = None
    F: float | None = None
    chi: float | None = None
    B_grad: float | None = None
    gamma_e: float | None = None
    radius_a: float = 0.0
    radius_c: float = 0.0


@dataclass(frozen=True)
class DynamicsSection:
    t_stop: float
    points: int
    t_start: float = 0.0
    backend: str = "analytic"
    hamiltonian: str = "squeezed"
    fock_n: int = 64
    bipartitions: tuple[str, ...] = ("tp_qubit",)
    variants: tuple = ()


@dataclass(frozen=True)
class SweepSection:
    axes: tuple[AxisSpec, ...]
    time: TimeRule = TimeRule()
    backend: str = "analytic"
    fock_n: int = 64


@dataclass(frozen=True)
class RateSection:
    which: str
    axis: AxisSpec
    time: TimeRule = TimeRule()
    variants: tuple = ()


@dataclass(frozen=True)
class FeasibilitySection:
    gamma_window: tuple[float, float] = (0.0, 0.0)
    cycles: float = 1.0


@dataclass(frozen=True)
class ValidateSection:
    seed: int = 20240811
    overlap_samples: int = 200
    pt_samples: int = 20
    fock_n: int = 64
    t_points: int = 25
    overlap_tol: float = 1e-8
    pt_tol: float = 1e-6
    en_tol: float = 1e-3


@dataclass(frozen=True)
class ToleranceBlock:
    fock_tail: float = 1e-8
    en_convergence: float = 1e-4


@dataclass(frozen=True)
class RunConfig:
    label: str
    mode: str
    system: DimensionlessSystem | None = None
    si_system: SISystem | None = None
    mediator: MediatorBlock = field(default_factory=MediatorBlock)
    dephasing: DephasingBlock = field(default_factory=DephasingBlock)
    tolerances: ToleranceBlock = field(default_factory=ToleranceBlock)
    dynamics: DynamicsSection | None = None
    sweep: SweepSection | None = None
    rate: RateSection | None = None
    feasibility: FeasibilitySection | None = None
    validate: ValidateSection | None = None


def _parse_axis(raw, path) -> AxisSpec:
    _check_keys(raw, path, ("name", "start", "stop", "count", "scale"),
                ("name", "start", "stop", "count"))
    return AxisSpec(name=_str(raw, "name", path, required=True),
                    start=_num(raw, "start", path, required=True),
                    stop=_num(raw, "stop", path, required=True),
                    count=_int(raw, "count", path, required=True),
                    scale=_str(raw, "scale", path, default="linear",
                               choices=("linear", "log")))


def _parse_time(raw, path) -> TimeRule:
    if raw is None:
        return TimeRule()
    _check_keys(raw, path, ("kind", "cycles", "t"))
    return TimeRule(kind=_str(raw, "kind", path, default="phase",
                              choices=("phase", "fixed")),
                    cycles=_num(raw, "cycles", path, default=1.0),
                    t=_num(raw, "t", path, default=None, allow_none=True))


def parse_config(data: dict, source: str = "<config>") -> RunConfig:
    """Validate a raw JSON object and build the typed configuration."""
    top = ("label", "mode", "system", "si_system", "mediator", "dephasing",
           "tolerances", "dynamics", "sweep", "rate", "feasibility",
           "validate")
    _check_keys(data, source, top, ("label", "mode"))
    label = _str(data, "label", source, required=True)
    mode = _str(data, "mode", source, required=True, choices=_MODES)

    if (mode == "dimensionless") != ("system" in data) or \
            (mode == "si") != ("si_system" in data):
        raise ConfigError(f"{source}.mode",
                          "dimensionless mode requires the 'system' block, "
                          "si mode the 'si_system' block, never both")

    system = si_system = None
    if mode == "dimensionless":
        p = f"{source}.system"
        raw = data["system"]
        _check_keys(raw, p, ("g_a", "g_b", "F", "delta", "omega_a",
                             "omega_b", "epsilon"), ("g_a", "g_b"))
        F = _num(raw, "F", p, allow_none=True)
        delta = _num(raw, "delta", p, allow_none=True)
        if (F is None) == (delta is None):
            raise ConfigError(p, "give exactly one of F, delta")
        system = DimensionlessSystem(
            g_a=_num(raw, "g_a", p, required=True),
            g_b=_num(raw, "g_b", p, required=True),
            F=F, delta=delta,
            omega_a=_num(raw, "omega_a", p, default=0.0),
            omega_b=_num(raw, "omega_b", p, default=0.0),
            epsilon=_num(raw, "epsilon", p, default=0.0))
    else:
        p = f"{source}.si_system"
        raw = data["si_system"]
        _check_keys(raw, p, ("m_a", "m_c", "d", "d0", "omega_c", "omega_b",
                             "omega_a0", "Q1", "Q2", "r0", "delta", "F",
                             "chi", "B_grad", "gamma_e", "radius_a",
                             "radius_c"),
                    ("m_a", "m_c", "d", "d0", "omega_c", "omega_b"))
        drive = {k: _num(raw, k, p, allow_none=True)
                 for k in ("r0", "delta", "F")}
        n_drive = sum(v is not None for v in drive.values())
        charged = _num(raw, "Q1", p, default=0.0) != 0.0 \
            and _num(raw, "Q2", p, default=0.0) != 0.0
        if charged and n_drive != 1:
            raise ConfigError(p, "give exactly one of r0, delta, F when "
                              "both charges are set")
        if not charged and n_drive:
            raise ConfigError(p, "r0/delta/F need both charges nonzero")
        si_system = SISystem(
            m_a=_num(raw, "m_a", p, required=True),
            m_c=_num(raw, "m_c", p, required=True),
            d=_num(raw, "d", p, required=True),
            d0=_num(raw, "d0", p, required=True),
            omega_c=_num(raw, "omega_c", p, required=True),
            omega_b=_num(raw, "omega_b", p, required=True),
            omega_a0=_num(raw, "omega_a0", p, default=0.0),
            Q1=_num(raw, "Q1", p, default=0.0),
            Q2=_num(raw, "Q2", p, default=0.0),
            r0=drive["r0"], delta=drive["delta"], F=drive["F"],
            chi=_num(raw, "chi", p, allow_none=True),
            B_grad=_num(raw, "B_grad", p, allow_none=True),
            gamma_e=_num(raw, "gamma_e", p, allow_none=True),
            radius_a=_num(raw, "radius_a", p, default=0.0),
            radius_c=_num(raw, "radius_c", p, default=0.0))

    p = f"{source}.mediator"
    raw = data.get("mediator", {})
    _check_keys(raw, p, ("alpha0", "xi_mag", "theta"))
    mediator = MediatorBlock(
        alpha0=_complex(raw, "alpha0", p, 1.0 + 0.0j),
        xi_mag=_num(raw, "xi_mag", p, default=None, allow_none=True),
        theta=_num(raw, "theta", p, default=math.pi))

    p = f"{source}.dephasing"
    raw = data.get("dephasing", {})
    _check_keys(raw, p, ("gamma", "gamma_tp"))
    dephasing = DephasingBlock(gamma=_num(raw, "gamma", p, default=0.0),
                               gamma_tp=_num(raw, "gamma_tp", p, default=0.0))
    if dephasing.gamma < 0 or dephasing.gamma_tp < 0:
        raise ConfigError(p, "dephasing rates must be non-negative")

    p = f"{source}.tolerances"
    raw = data.get("tolerances", {})
    _check_keys(raw, p, ("fock_tail", "en_convergence"))
    tolerances = ToleranceBlock(
        fock_tail=_num(raw, "fock_tail", p, default=1e-8),
        en_convergence=_num(raw, "en_convergence", p, default=1e-4))

    dynamics = None
    if "dynamics" in data:
        p = f"{source}.dynamics"
        raw = data["dynamics"]
        _check_keys(raw, p, ("t_stop", "points", "t_start", "backend",
                             "hamiltonian", "fock_n", "bipartitions",
                             "variants"), ("t_stop", "points"))
        points = _int(raw, "points", p, required=True)
        if points < 2:
            raise ConfigError(f"{p}.points", "need at least 2 points")
        bips = tuple(raw.get("bipartitions", ["tp_qubit"]))
        for b in bips:
            if b not in _BIPARTITIONS:
                raise ConfigError(f"{p}.bipartitions",
                                  f"{b!r} not in {_BIPARTITIONS}")
        dynamics = DynamicsSection(
            t_stop=_num(raw, "t_stop", p, required=True),
            points=points,
            t_start=_num(raw, "t_start", p, default=0.0),
            backend=_str(raw, "backend", p, default="analytic",
                         choices=_BACKENDS),
            hamiltonian=_str(raw, "hamiltonian", p, default="squeezed",
                             choices=_HAMILTONIANS),
            fock_n=_int(raw, "fock_n", p, default=64),
            bipartitions=bips,
            variants=_variants(raw, "variants", p))

    sweep = None
    if "sweep" in data:
        p = f"{source}.sweep"
        raw = data["sweep"]
        _check_keys(raw, p, ("axes", "time", "backend", "fock_n"), ("axes",))
        if not isinstance(raw["axes"], list) or not raw["axes"]:
            raise ConfigError(f"{p}.axes", "expected a non-empty list")
        axes = tuple(_parse_axis(a, f"{p}.axes[{i}]")
                     for i, a in enumerate(raw["axes"]))
        sweep = SweepSection(
            axes=axes,
            time=_parse_time(raw.get("time"), f"{p}.time"),
            backend=_str(raw, "backend", p, default="analytic",
                         choices=_BACKENDS),
            fock_n=_int(raw, "fock_n", p, default=64))

    rate = None
    if "rate" in data:
        p = f"{source}.rate"
        raw = data["rate"]
        _check_keys(raw, p, ("which", "axis", "time", "variants"),
                    ("which", "axis"))
        rate = RateSection(
            which=_str(raw, "which", p, required=True,
                       choices=("g_a", "g_b")),
            axis=_parse_axis(raw["axis"], f"{p}.axis"),
            time=_parse_time(raw.get("time"), f"{p}.time"),
            variants=_variants(raw, "variants", p))

    feasibility = None
    if "feasibility" in data:
        p = f"{source}.feasibility"
        raw = data["feasibility"]
        _check_keys(raw, p, ("gamma_window", "cycles"))
        win = raw.get("gamma_window", [0.0, 0.0])
        if (not isinstance(win, list) or len(win) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float))
                       for x in win)):
            raise ConfigError(f"{p}.gamma_window",
                              "expected [gamma_lo, gamma_hi]")
        feasibility = FeasibilitySection(
            gamma_window=(float(win[0]), float(win[1])),
            cycles=_num(raw, "cycles", p, default=1.0))

    validate = None
    if "validate" in data:
        p = f"{source}.validate"
        raw = data["validate"]
        _check_keys(raw, p, ("seed", "overlap_samples", "pt_samples",
                             "fock_n", "t_points", "overlap_tol", "pt_tol",
                             "en_tol"))
        validate = ValidateSection(
            seed=_int(raw, "seed", p, default=20240811),
            overlap_samples=_int(raw, "overlap_samples", p, default=200),
            pt_samples=_int(raw, "pt_samples", p, default=20),
            fock_n=_int(raw, "fock_n", p, default=64),
            t_points=_int(raw, "t_points", p, default=25),
            overlap_tol=_num(raw, "overlap_tol", p, default=1e-8),
            pt_tol=_num(raw, "pt_tol", p, default=1e-6),
            en_tol=_num(raw, "en_tol", p, default=1e-3))

    return RunConfig(label=label, mode=mode, system=system,
                     si_system=si_system, mediator=mediator,
                     dephasing=dephasing, tolerances=tolerances,
                     dynamics=dynamics, sweep=sweep, rate=rate,
                     feasibility=feasibility, validate=validate)


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    return parse_config(data, source=str(path))


def serialize_config(cfg: RunConfig) -> dict:
    """Canonical JSON form; parse(serialize(cfg)) == cfg."""
    out: dict = {"label": cfg.label, "mode": cfg.mode}
    if cfg.system is not None:
        s = cfg.system
        out["system"] = {"g_a": s.g_a, "g_b": s.g_b, "F": s.F,
                         "delta": s.delta, "omega_a": s.omega_a,
                         "omega_b": s.omega_b, "epsilon": s.epsilon}
    if cfg.si_system is not None:
        s = cfg.si_system
        out["si_system"] = {
            "m_a": s.m_a, "m_c": s.m_c, "d": s.d, "d0": s.d0,
            "omega_c": s.omega_c, "omega_b": s.omega_b,
            "omega_a0": s.omega_a0, "Q1": s.Q1, "Q2": s.Q2, "r0": s.r0,
            "delta": s.delta, "F": s.F, "chi": s.chi, "B_grad": s.B_grad,
            "gamma_e": s.gamma_e, "radius_a": s.radius_a,
            "radius_c": s.radius_c}
    m = cfg.mediator
    out["mediator"] = {"alpha0": [m.alpha0.real, m.alpha0.imag],
                       "xi_mag": m.xi_mag, "theta": m.theta}
    out["dephasing"] = {"gamma": cfg.dephasing.gamma,
                        "gamma_tp": cfg.dephasing.gamma_tp}
    out["tolerances"] = {"fock_tail": cfg.tolerances.fock_tail,
                         "en_convergence": cfg.tolerances.en_convergence}
    if cfg.dynamics is not None:
        d = cfg.dynamics
        out["dynamics"] = {"t_stop": d.t_stop, "points": d.points,
                           "t_start": d.t_start, "backend": d.backend,
                           "hamiltonian": d.hamiltonian, "fock_n": d.fock_n,
                           "bipartitions": list(d.bipartitions),
                           "variants": [[l, dict(o)] for l, o in d.variants]}
    if cfg.sweep is not None:
        out["sweep"] = {
            "axes": [{"name": a.name, "start": a.start, "stop": a.stop,
                      "count": a.count, "scale": a.scale}
                     for a in cfg.sweep.axes],
            "time": {"kind": cfg.sweep.time.kind,
                     "cycles": cfg.sweep.time.cycles, "t": cfg.sweep.time.t},
            "backend": cfg.sweep.backend,
            "fock_n": cfg.sweep.fock_n}
    if cfg.rate is not None:
        r = cfg.rate
        out["rate"] = {
            "which": r.which,
            "axis": {"name": r.axis.name, "start": r.axis.start,
                     "stop": r.axis.stop, "count": r.axis.count,
                     "scale": r.axis.scale},
            "time": {"kind": r.time.kind, "cycles": r.time.cycles,
                     "t": r.time.t},
            "variants": [[l, dict(o)] for l, o in r.variants]}
    if cfg.feasibility is not None:
        out["feasibility"] = {"gamma_window": list(cfg.feasibility.gamma_window),
                              "cycles": cfg.feasibility.cycles}
    if cfg.validate is not None:
        v = cfg.validate
        out["validate"] = {"seed": v.seed,
                           "overlap_samples": v.overlap_samples,
                           "pt_samples": v.pt_samples, "fock_n": v.fock_n,
                           "t_points": v.t_points,
                           "overlap_tol": v.overlap_tol, "pt_tol": v.pt_tol,
                           "en_tol": v.en_tol}
    return out


def config_hash(cfg: RunConfig) -> str:
    """16-hex-char digest of the canonical serialized form."""
    blob = json.dumps(serialize_config(cfg), sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def base_cell(cfg: RunConfig) -> dict:
    """Fixed-parameter dict for the sweep engine (dimensionless mode)."""
    if cfg.system is None:
        raise ConfigError(f"{cfg.label}.system",
                          "this command needs a dimensionless system block")
    s = cfg.system
    cell = {"g_a": s.g_a, "g_b": s.g_b, "omega_a": s.omega_a,
            "omega_b": s.omega_b, "epsilon": s.epsilon,
            "gamma": cfg.dephasing.gamma, "gamma_tp": cfg.dephasing.gamma_tp,
            "alpha0": cfg.mediator.alpha0, "xi_mag": cfg.mediator.xi_mag,
            "theta": cfg.mediator.theta}
    if s.F is not None:
        cell["F"] = s.F
    else:
        cell["delta"] = s.delta
    return cell


def resolve_si(cfg: RunConfig):
    """SI block -> (PhysicalSetup, ModelParams, SqueezedFrame).

    When the drive is given as delta or F, the tip distance is back-solved
    and the exact requested drive is kept for the frame derivation.
    """
    if cfg.si_system is None:
        raise ConfigError(f"{cfg.label}.si_system",
                          "this command needs an SI system block")
    s = cfg.si_system
    common = dict(m_a=s.m_a, m_c=s.m_c, d=s.d, d0=s.d0, omega_c=s.omega_c,
                  omega_b=s.omega_b, omega_a0=s.omega_a0, Q1=s.Q1, Q2=s.Q2,
                  chi=s.chi, B_grad=s.B_grad, gamma_e=s.gamma_e,
                  radius_a=s.radius_a, radius_c=s.radius_c)
    F_exact = None
    r0 = s.r0
    if s.delta is not None or s.F is not None:
        probe = derive_model_params(
            PhysicalSetup(r0=None, **dict(common, Q1=0.0, Q2=0.0)))
        F_exact = s.F if s.F is not None \
            else (probe.omega_tilde - s.delta) / 4.0
        if F_exact < 0:
            raise ConfigError(f"{cfg.label}.si_system.delta",
                              "detuning exceeds omega_tilde")
        if F_exact == 0.0:
            common.update(Q1=0.0, Q2=0.0)
            F_exact, r0 = None, None
        else:
            r0 = coulomb_distance_for_drive(s.m_c, s.omega_c, s.Q1, s.Q2,
                                            F_exact)
    setup = PhysicalSetup(r0=r0, **common)
    params = derive_model_params(setup, F_override=F_exact)
    frame = derive_squeezed_frame(params)
    return setup, params, frame


def resolve_dimensionless(cfg: RunConfig) -> ModelParams:
    if cfg.system is None:
        raise ConfigError(f"{cfg.label}.system",
                          "this command needs a dimensionless system block")
    s = cfg.system
    return ModelParams.dimensionless(s.g_a, s.g_b, F=s.F, delta=s.delta,
                                     omega_a=s.omega_a, omega_b=s.omega_b,
                                     epsilon=s.epsilon)


__all__ = [
    "MediatorBlock", "DephasingBlock", "DimensionlessSystem", "SISystem",
    "DynamicsSection", "SweepSection", "RateSection", "FeasibilitySection",
    "ValidateSection", "ToleranceBlock", "RunConfig", "parse_config",
    "load_config", "serialize_config", "config_hash", "base_cell",
    "resolve_si", "resolve_dimensionless",
]
