"""Parameter sweeps, entanglement-rate extraction, and time-series tables.

Grids are specified in units of the modified mediator frequency
(omega_tilde = 1).  Every cell independently rebuilds the squeezed frame,
so axes may move the drive itself; cells that land at or beyond the
instability are marked invalid rather than zeroed, and the sweep keeps
going.  The analytic backend evaluates the closed-form matrix; the Fock
backend is available for cross-checking small grids.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import fock
from .dynamics import MediatorInit, en_timeseries, partial_transpose_matrix
from .errors import InsufficientPoints, InvalidAxis, UnstableFrame
from .negativity import log_negativity_from_partial_transpose
from .params import ModelParams, derive_squeezed_frame

AXIS_NAMES = ("F", "delta", "g_a", "g_b", "gamma", "s", "t", "alpha0")

# cell parameters understood by the fixed dict / variant overrides
_CELL_DEFAULTS = {
    "g_a": None, "g_b": None, "F": None, "delta": None, "s": None,
    "gamma": 0.0, "gamma_tp": 0.0, "alpha0": 1.0 + 0.0j, "xi_mag": None,
    "theta": math.pi, "epsilon": 0.0, "omega_a": 0.0, "omega_b": 0.0,
    "t": None,
}


@dataclass(frozen=True)
class AxisSpec:
    name: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidAxis(
                f"axis {self.name!r} not in supported set {AXIS_NAMES}")
        if self.count < 2:
            raise InsufficientPoints(
                f"axis {self.name!r} needs >= 2 points, got {self.count}")
        if self.scale not in ("linear", "log"):
            raise InvalidAxis(f"scale {self.scale!r} not linear/log")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise InvalidAxis("log axis endpoints must be positive")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class TimeRule:
    """When to evaluate EN in each cell.

    kind = "phase": t = cycles * 2 pi / omega_s, re-derived per cell so
    the sweep tracks the decoupling comb as the frame shifts.
    kind = "fixed": absolute time t.
    """

    kind: str = "phase"
    cycles: float = 1.0
    t: float | None = None

    def __post_init__(self):
        if self.kind not in ("phase", "fixed"):
            raise InvalidAxis(f"time rule {self.kind!r} not phase/fixed")
        if self.kind == "fixed" and self.t is None:
            raise InvalidAxis("fixed time rule needs t")


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple[AxisSpec, ...]
    fixed: dict = field(default_factory=dict)
    time_rule: TimeRule = TimeRule()
    backend: str = "analytic"
    fock_n: int = 64
    variants: tuple[tuple[str, dict], ...] = ()
    bipartitions: tuple[str, ...] = ("tp_qubit",)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise InvalidAxis("sweeps support one or two axes")
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise InvalidAxis(f"duplicate axis {names}")
        if self.backend not in ("analytic", "fock", "both"):
            raise InvalidAxis(f"backend {self.backend!r} unknown")
        for key in self.fixed:
            if key not in _CELL_DEFAULTS:
                raise InvalidAxis(f"fixed parameter {key!r} unknown")
        sources = [k for k in ("F", "delta", "s")
                   if self.fixed.get(k) is not None or k in names]
        if len(sources) != 1:
            raise InvalidAxis(
                f"exactly one drive source among F/delta/s required, "
                f"got {sources or 'none'}")
        for name in self.bipartitions:
            if name not in fock.BIPARTITIONS:
                raise InvalidAxis(f"bipartition {name!r} unknown")


def merge_cell(base: dict, overrides: dict) -> dict:
    """Overlay variant overrides on a fixed-parameter dict.

    An override that names any drive source (F, delta, s) evicts the
    others first, so a variant can switch e.g. from an F-specified base
    to a delta-specified cell without tripping the one-source rule.
    """
    cell = dict(base)
    if any(k in overrides for k in ("F", "delta", "s")):
        for k in ("F", "delta", "s"):
            cell.pop(k, None)
    cell.update(overrides)
    return cell


def _resolve_cell(spec: SweepSpec, overrides: dict):
    """Fixed dict + axis values -> (params, init, gamma, gamma_tp, t)."""
    p = dict(_CELL_DEFAULTS)
    p.update(spec.fixed)
    p.update(overrides)
    if p["g_a"] is None or p["g_b"] is None:
        raise InvalidAxis("g_a and g_b must be set by fixed dict or axes")

    if p["s"] is not None:
        F = 0.25 * (1.0 - math.exp(-4.0 * p["s"]))
    elif p["delta"] is not None:
        F = 0.25 * (1.0 - p["delta"])
    else:
        F = p["F"]

    params = ModelParams(omega_a=p["omega_a"], omega_b=p["omega_b"],
                         omega_tilde=1.0, F=F, epsilon=p["epsilon"],
                         g_a=p["g_a"], g_b=p["g_b"])
    frame = derive_squeezed_frame(params)
    init = MediatorInit(alpha0=complex(p["alpha0"]), xi_mag=p["xi_mag"],
                        theta=p["theta"])

    if p["t"] is not None:
        t = float(p["t"])
    elif spec.time_rule.kind == "fixed":
        t = float(spec.time_rule.t)
    else:
        t = spec.time_rule.cycles * 2.0 * math.pi / frame.omega_s
    return params, frame, init, float(p["gamma"]), float(p["gamma_tp"]), t


def _eval_cell(spec: SweepSpec, overrides: dict) -> dict:
    try:
        params, frame, init, gamma, gamma_tp, t = _resolve_cell(spec, overrides)
    except UnstableFrame as exc:
        return {"valid": False, "note": str(exc)}

    out = {"valid": True, "note": "", "s": frame.s, "omega_s": frame.omega_s,
           "g_a_s": frame.g_a_s, "g_b_s": frame.g_b_s, "g_eff": frame.g_eff,
           "t_eval": t}
    if spec.backend in ("analytic", "both"):
        m = partial_transpose_matrix(frame, init, t, gamma, gamma_tp)
        out["en"] = log_negativity_from_partial_transpose(m)
    if spec.backend in ("fock", "both"):
        n = spec.fock_n
        h = fock.build_hamiltonian_squeezed(frame, params.omega_a,
                                            params.omega_b, n)
        psi0 = fock.prepare_initial(init, n, frame)
        psi = fock.ExactPropagator(h).evolve(psi0, t)
        out["en_fock"] = _fock_cell_en(psi, n, t, gamma, gamma_tp)
        if spec.backend == "fock":
            out["en"] = out.pop("en_fock")
    return out


def _fock_cell_en(psi: np.ndarray, n: int, t: float, gamma: float,
                  gamma_tp: float) -> float:
    from .dynamics import apply_dephasing
    from .negativity import partial_trace, partial_transpose

    rho = partial_trace(psi, (2, 2, n), (0, 1))
    rho = apply_dephasing(rho, t, gamma, gamma_tp)
    pt = partial_transpose(rho, (2, 2), 1)
    return log_negativity_from_partial_transpose(pt)


def _cell_worker(payload):
    spec, overrides = payload
    return _eval_cell(spec, overrides)


@dataclass
class SweepResult:
    spec: SweepSpec
    axis_values: tuple[np.ndarray, ...]
    en: np.ndarray
    valid: np.ndarray
    extras: dict[str, np.ndarray]
    invalid_cells: list[tuple[tuple[int, ...], str]]
    meta: dict = field(default_factory=dict)


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Evaluate EN over the grid; deterministic for a fixed spec."""
    axes_vals = tuple(ax.values() for ax in spec.axes)
    shape = tuple(len(v) for v in axes_vals)
    idx_list = list(np.ndindex(*shape))
    jobs = []
    for idx in idx_list:
        overrides = {ax.name: float(axes_vals[k][i])
                     for k, (ax, i) in enumerate(zip(spec.axes, idx))}
        jobs.append((spec, overrides))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            cells = list(ex.map(_cell_worker, jobs))
    else:
        cells = [_eval_cell(spec, ov) for _, ov in jobs]

    en = np.full(shape, np.nan)
    valid = np.zeros(shape, bool)
    extra_names = ("s", "omega_s", "g_a_s", "g_b_s", "g_eff", "t_eval")
    extras = {name: np.full(shape, np.nan) for name in extra_names}
    if spec.backend == "both":
        extras["en_fock"] = np.full(shape, np.nan)
    invalid = []
    for idx, cell in zip(idx_list, cells):
        if not cell["valid"]:
            invalid.append((idx, cell["note"]))
            continue
        valid[idx] = True
        en[idx] = cell["en"]
        for name in extras:
            if name in cell:
                extras[name][idx] = cell[name]
    return SweepResult(spec=spec, axis_values=axes_vals, en=en, valid=valid,
                       extras=extras, invalid_cells=invalid,
                       meta={"backend": spec.backend,
                             "fock_n": spec.fock_n if spec.backend != "analytic" else None})


@dataclass
class RateResult:
    g_values: np.ndarray
    en: np.ndarray
    eta: np.ndarray
    zero_crossings: list[float]
    meta: dict = field(default_factory=dict)


def entanglement_rate(spec: SweepSpec, which: str) -> RateResult:
    """eta = dEN/dg along a coupling axis, central differences.

    Interior points are O(h^2) central stencils, endpoints one-sided.
    Sign changes of eta are bracketed and reported as linear-interpolation
    zeros; they mark the turning points of EN against the coupling.
    """
    if which not in ("g_a", "g_b"):
        raise InvalidAxis(f"rate axis must be g_a or g_b, got {which!r}")
    if len(spec.axes) != 1 or spec.axes[0].name != which:
        raise InvalidAxis(f"spec must have the single axis {which!r}")
    if spec.axes[0].count < 3:
        raise InsufficientPoints("rate extraction needs >= 3 points")

    res = run_sweep(spec)
    g = res.axis_values[0]
    en = res.en
    if not res.valid.all():
        raise UnstableFrame("rate sweep crossed the instability; shrink "
                            "the axis range")
    eta = np.gradient(en, g)
    zeros = []
    for i in range(len(g) - 1):
        if eta[i] == 0.0 and 0 < i:
            zeros.append(float(g[i]))
        elif eta[i] * eta[i + 1] < 0.0:
            frac = eta[i] / (eta[i] - eta[i + 1])
            zeros.append(float(g[i] + frac * (g[i + 1] - g[i])))
    return RateResult(g_values=g, en=en, eta=eta, zero_crossings=zeros,
                      meta={"axis": which})


@dataclass
class TimeseriesResult:
    t: np.ndarray
    curves: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)


def timeseries_figure(spec: SweepSpec, hamiltonian: str = "squeezed",
                      tail_tol: float = 1e-8) -> TimeseriesResult:
    """EN(t) table for one or more parameter variants.

    Spec must carry a single time axis.  The analytic backend contributes
    a TP-qubit column per variant; the Fock backend adds the requested
    bipartitions (mediator cuts are only available here).  Column naming:
    "<label>:<bipartition>:<backend>".
    """
    if len(spec.axes) != 1 or spec.axes[0].name != "t":
        raise InvalidAxis("timeseries needs the single axis 't'")
    ts = spec.axes[0].values()
    variants = spec.variants or (("base", {}),)
    curves: dict[str, np.ndarray] = {}
    meta: dict = {"hamiltonian": hamiltonian, "variants": []}

    for label, overrides in variants:
        cell_spec = replace(spec, fixed=merge_cell(spec.fixed, overrides),
                            time_rule=TimeRule("fixed", t=0.0))
        params, frame, init, gamma, gamma_tp, _ = _resolve_cell(
            cell_spec, {"t": 0.0})
        meta["variants"].append({"label": label, "s": frame.s,
                                 "omega_s": frame.omega_s})
        if spec.backend in ("analytic", "both"):
            en = en_timeseries(frame, init, ts, gamma, gamma_tp)
            curves[f"{label}:tp_qubit:analytic"] = np.array(
                [v for _, v in en])
        if spec.backend in ("fock", "both"):
            n = spec.fock_n
            if hamiltonian == "lab":
                h = fock.build_hamiltonian_lab(params, n)
            else:
                h = fock.build_hamiltonian_squeezed(
                    frame, params.omega_a, params.omega_b, n)
            psi0 = fock.prepare_initial(init, n, frame, tail_tol,
                                        lab_mode=(hamiltonian == "lab"))
            cuts = {name: fock.BIPARTITIONS[name]
                    for name in spec.bipartitions}
            data = fock.en_curves(h, psi0, ts, n, cuts)
            if float(data["tail"].max()) > tail_tol:
                raise fock.CutoffTooSmall(
                    f"trajectory leaks at N = {n}; raise fock_n",
                    float(data["tail"].max()))
            for name in spec.bipartitions:
                curves[f"{label}:{name}:fock"] = data[name]
            meta.setdefault("fock_n", n)
    return TimeseriesResult(t=ts, curves=curves, meta=meta)


__all__ = [
    "AXIS_NAMES", "AxisSpec", "TimeRule", "SweepSpec", "SweepResult",
    "RateResult", "TimeseriesResult", "merge_cell", "run_sweep",
    "entanglement_rate", "timeseries_figure",
]
