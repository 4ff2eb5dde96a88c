"""``hallsim`` command line: sweep, staircase, simulate, edge, quantize."""
from __future__ import annotations

import argparse
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .. import transport
from ..params import ParameterError, magnetic_length
from .config import COMMANDS, FORMATS, ConfigError, parse_config, sim_config
from .io import sidecar, state_snapshot, write_csv, write_json

__all__ = ["main", "parse_config", "ConfigError"]


def worker_count(n_tasks: int) -> int:
    cap = os.environ.get("HALLSIM_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(limit, n_tasks))


def cmd_sweep(cfg, out, fmt):
    from .config import physical_params, thresholds

    p = physical_params(cfg)
    if cfg.get("tau_sweep") and cfg.get("B_sweep"):
        raise ConfigError("give either B_sweep or tau_sweep, not both")
    variable = "tau" if cfg.get("tau_sweep") else "B"
    values = transport.parse_grid(cfg.get(f"{variable}_sweep"))
    if not values:
        raise ParameterError("empty sweep")
    with ThreadPoolExecutor(worker_count(len(values))) as ex:
        rows = transport.sweep(p, values, variable, cfg.get("s_cs"), thresholds(cfg), ex)
    records = [{k: getattr(r, k) for k in transport.SweepRow.FIELDS} for r in rows]
    if fmt == "csv":
        write_csv(out, transport.SweepRow.FIELDS, records)
    else:
        write_json(out, records)


STAIRCASE_FIELDS = ("B", "sigma_H", "sigma_H_quantized")


def cmd_staircase(cfg, out, fmt):
    from .config import physical_params

    values = transport.parse_grid(cfg.get("B_sweep"))
    rows = transport.plateau_staircase(physical_params(cfg), values)
    records = [dict(zip(STAIRCASE_FIELDS, r)) for r in rows]
    if fmt == "csv":
        write_csv(out, STAIRCASE_FIELDS, records)
    else:
        write_json(out, records)


def _simulate(cfg):
    from ..dynamics.runs import run

    sc = sim_config(cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = run(sc)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return sc, report


def _summary(report) -> dict:
    return {
        "kind": report.kind,
        "sigma_H": report.sigma_H,
        "residual": report.residual,
        "residual_absolute": report.absolute,
        "longitudinal_fraction": report.longitudinal_fraction,
        "hall_fraction": report.hall_fraction,
        "S_cs": report.action,
        "action_ratio": report.action_ratio,
        "gauge_balance": report.gauge_balance,
        "t": report.state.t,
        "norm": report.state.norm(),
    }


def cmd_simulate(cfg, out, fmt):
    from ..dynamics.runs import DIAGNOSTIC_FIELDS

    _, report = _simulate(cfg)
    if fmt == "csv":
        write_csv(out, DIAGNOSTIC_FIELDS, report.diagnostics)
        write_json(sidecar(out, ".summary.json"), _summary(report))
    else:
        write_json(out, {"summary": _summary(report), "diagnostics": report.diagnostics})
    write_json(sidecar(out, ".state.json"), state_snapshot(report.state))


def cmd_edge(cfg, out, fmt):
    from ..constraint_edge import (breakdown_check, edge_current_fraction, edge_profile,
                                   gauss_residual)

    sc, report = _simulate(cfg)
    p = sc.params
    magnetic_length(p)
    prof = edge_profile(report.current, report.state, p)
    gauss = gauss_residual(report.state, p, report.sigma_H)
    brk = breakdown_check(report.state, p, report.sigma_H, cfg.get("breakdown_threshold"))
    summary = {
        "fitted_width": prof.fitted_width,
        "l_B": prof.l_B,
        "edge_fraction": edge_current_fraction(prof),
        "gauss_residual": gauss.inf_norm,
        "breakdown": brk.breakdown,
    }
    records = [{"distance": d, "mass": m} for d, m in zip(prof.distances, prof.current_mass)]
    if fmt == "csv":
        write_csv(out, ("distance", "mass"), records)
        write_json(sidecar(out, ".summary.json"), summary)
    else:
        write_json(out, {"summary": summary, "profile": records})


def cmd_quantize(cfg, out, fmt):
    from ..quantization import quantize_report

    rep = quantize_report(cfg.get("sigma"), cfg.get("n_phi"), cfg.get("h"))
    if fmt == "csv":
        write_csv(out, tuple(rep), [rep])
    else:
        write_json(out, rep)


HANDLERS = {"sweep": cmd_sweep, "staircase": cmd_staircase, "simulate": cmd_simulate,
            "edge": cmd_edge, "quantize": cmd_quantize}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hallsim", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--out", required=True, help="output path")
    ap.add_argument("--format", choices=FORMATS, default="csv")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override a config key (repeatable)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, args.set, command=args.command)
        cfg.params_file, cfg.output, cfg.format = args.config, args.out, args.format
        HANDLERS[args.command](cfg, args.out, args.format)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"hallsim {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0

