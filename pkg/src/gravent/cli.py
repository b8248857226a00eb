"""Command-line entry point.

Subcommands: feasibility (SI pipeline, derived-rate table, regime report,
optional reference comparison), dynamics (EN time series), sweep (1D/2D
EN grids), rate (dEN/dg along a coupling axis), validate (analytic vs
oracle cross-checks).  Each takes a run configuration from --config
<path> or a shipped --preset <name>, writes its tables under --out, and
exits 0 only on full success.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .config import (FeasibilitySection, RunConfig, base_cell, load_config,
                     resolve_si)
from .dynamics import MediatorInit, partial_transpose_matrix
from .errors import ConfigError, GraventError
from .negativity import log_negativity_from_partial_transpose
from .params import regime_report
from .presets import PRESET_NAMES, SEC5_GOLDEN, golden_check, load_preset
from .sweep import (SweepSpec, AxisSpec, entanglement_rate, merge_cell,
                    run_sweep, timeseries_figure)
from .validate import run_validation


def _mediator_init(cfg: RunConfig) -> MediatorInit:
    return MediatorInit(alpha0=cfg.mediator.alpha0,
                        xi_mag=cfg.mediator.xi_mag, theta=cfg.mediator.theta)


def _strip_drive(fixed: dict, axes) -> dict:
    if {ax.name for ax in axes} & {"F", "delta", "s"}:
        fixed = {k: v for k, v in fixed.items()
                 if k not in ("F", "delta", "s")}
    return fixed


def cmd_feasibility(cfg: RunConfig, args) -> int:
    setup, params, frame = resolve_si(cfg)
    fz = cfg.feasibility if cfg.feasibility is not None \
        else FeasibilitySection()
    report = regime_report(setup, frame)
    init = _mediator_init(cfg)
    t_eval = fz.cycles * frame.t_period
    g_lo, g_hi = fz.gamma_window

    def en_at(gamma: float) -> float:
        m = partial_transpose_matrix(frame, init, t_eval, gamma)
        return log_negativity_from_partial_transpose(m)

    en_lo, en_hi = en_at(g_lo), en_at(g_hi)
    derived = {
        "omega_tilde": params.omega_tilde, "omega_a": params.omega_a,
        "F": params.F, "delta": params.delta, "epsilon": params.epsilon,
        "r0": setup.r0, "g_a": params.g_a, "g_b": params.g_b,
        "s": frame.s, "omega_s": frame.omega_s, "g_a_s": frame.g_a_s,
        "g_b_s": frame.g_b_s, "g_eff": frame.g_eff,
        "delta_x": report.delta_x, "t_eval": t_eval,
        "en_gamma_lo": en_lo, "en_gamma_hi": en_hi,
    }
    units = {"s": "", "delta_x": "m", "r0": "m", "t_eval": "s",
             "en_gamma_lo": "", "en_gamma_hi": ""}
    print(f"derived parameters ({cfg.label}):")
    for name, value in derived.items():
        if value is None:
            continue
        unit = units.get(name, "rad/s")
        print(f"  {name:<12} {value: .10e} {unit}")
    print("regime checks:")
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"  [{mark}] {c.name}: {c.value:.4e} vs {c.limit:.4e} "
              f"({c.detail})")

    golden_rows = []
    golden_ok = True
    if args.golden:
        measured = {
            "g_a_abs": abs(params.g_a), "g_b": params.g_b, "s": frame.s,
            "omega_s": frame.omega_s, "g_a_s_abs": abs(frame.g_a_s),
            "g_b_s": frame.g_b_s, "g_eff_abs": abs(frame.g_eff),
            "delta_x": report.delta_x, "en_gamma_lo": en_lo,
            "en_gamma_hi": en_hi,
        }
        print("reference comparison:")
        for key in SEC5_GOLDEN:
            target, dev, ok = golden_check(key, measured[key])
            golden_ok &= ok
            golden_rows.append({"key": key, "value": measured[key],
                                "target": target, "deviation": dev,
                                "passed": ok})
            mark = "PASS" if ok else "FAIL"
            print(f"  [{mark}] {key:<12} {measured[key]: .6e} "
                  f"(reference {target: .6e}, dev {dev:.2e})")

    info = io.provenance(cfg, command="feasibility")
    payload = {"derived": derived, "regime": report.as_dict(),
               "gamma_window": list(fz.gamma_window)}
    if args.golden:
        payload["golden"] = {"all_pass": golden_ok, "rows": golden_rows}
    path = io.write_json(Path(args.out) / f"{cfg.label}_feasibility.json",
                         info, payload)
    print(f"wrote {path}")
    return 0 if golden_ok else 1


def cmd_dynamics(cfg: RunConfig, args) -> int:
    if cfg.dynamics is None:
        raise ConfigError(f"{cfg.label}.dynamics",
                          "this command needs a dynamics section")
    d = cfg.dynamics
    spec = SweepSpec(
        axes=(AxisSpec("t", d.t_start, d.t_stop, d.points),),
        fixed=base_cell(cfg), backend=d.backend, fock_n=d.fock_n,
        variants=d.variants, bipartitions=d.bipartitions)
    result = timeseries_figure(spec, hamiltonian=d.hamiltonian,
                               tail_tol=cfg.tolerances.fock_tail)
    info = io.provenance(cfg, command="dynamics", hamiltonian=d.hamiltonian,
                         backend=d.backend)
    paths = io.write_timeseries(Path(args.out), f"{cfg.label}_dynamics",
                                result, info)
    print(f"{len(result.curves)} curves over {len(result.t)} times")
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_sweep(cfg: RunConfig, args) -> int:
    if cfg.sweep is None:
        raise ConfigError(f"{cfg.label}.sweep",
                          "this command needs a sweep section")
    sw = cfg.sweep
    spec = SweepSpec(axes=sw.axes,
                     fixed=_strip_drive(base_cell(cfg), sw.axes),
                     time_rule=sw.time, backend=sw.backend,
                     fock_n=sw.fock_n)
    result = run_sweep(spec, threads=args.threads)
    info = io.provenance(cfg, command="sweep", backend=sw.backend)
    paths = io.write_sweep(Path(args.out), f"{cfg.label}_sweep", result,
                           info)
    valid = result.valid.sum()
    print(f"grid {result.en.shape}, {valid} valid cells, "
          f"{len(result.invalid_cells)} invalid")
    if valid:
        import numpy as np
        print(f"EN range [{np.nanmin(result.en[result.valid]):.6g}, "
              f"{np.nanmax(result.en[result.valid]):.6g}]")
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_rate(cfg: RunConfig, args) -> int:
    if cfg.rate is None:
        raise ConfigError(f"{cfg.label}.rate",
                          "this command needs a rate section")
    r = cfg.rate
    base = base_cell(cfg)
    results = {}
    for label, overrides in (r.variants or (("base", {}),)):
        fixed = _strip_drive(merge_cell(base, overrides), (r.axis,))
        spec = SweepSpec(axes=(r.axis,), fixed=fixed, time_rule=r.time)
        results[label] = entanglement_rate(spec, r.which)
        zeros = ", ".join(f"{z:.6g}" for z in results[label].zero_crossings)
        print(f"{label}: rate sign changes at {r.which} = [{zeros}]")
    info = io.provenance(cfg, command="rate", axis=r.which)
    paths = io.write_rate(Path(args.out), f"{cfg.label}_rate", results, info)
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_validate(cfg: RunConfig, args) -> int:
    report = run_validation(cfg)
    for c in report.checks:
        mark = "SKIP" if c.skipped else ("PASS" if c.passed else "FAIL")
        dev = "" if c.max_dev is None else \
            f" max dev {c.max_dev:.3e} (tol {c.tol:.1e})"
        note = f" - {c.note}" if c.note else ""
        print(f"[{mark}] {c.name}{dev}{note}")
    info = io.provenance(cfg, command="validate")
    path = io.write_json(Path(args.out) / f"{cfg.label}_validate.json",
                         info, report.as_dict())
    print(f"wrote {path}")
    return 0 if report.all_pass else 1


_COMMANDS = {
    "feasibility": (cmd_feasibility,
                    "derive SI rates, regime checks, EN window"),
    "dynamics": (cmd_dynamics, "EN time series per bipartition"),
    "sweep": (cmd_sweep, "EN over a 1D/2D parameter grid"),
    "rate": (cmd_rate, "entanglement generation rate dEN/dg"),
    "validate": (cmd_validate, "closed form vs Fock oracle cross-checks"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravent",
        description="Entanglement between a two-level test particle and a "
                    "qubit mediated by a squeezed mechanical oscillator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", type=Path,
                        help="path to a JSON run configuration")
        sp.add_argument("--preset", choices=PRESET_NAMES,
                        help="name of a shipped configuration")
        sp.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (default: ./out)")
        sp.add_argument("--golden", action="store_true",
                        help="compare derived values against published "
                             "references")
        sp.add_argument("--threads", type=int, default=1,
                        help="parallel workers for sweep cells")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if (args.config is None) == (args.preset is None):
        parser.error("give exactly one of --config or --preset")
    try:
        cfg = load_config(args.config) if args.config \
            else load_preset(args.preset)
        return _COMMANDS[args.command][0](cfg, args)
    except GraventError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
