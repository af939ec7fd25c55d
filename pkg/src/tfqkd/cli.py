"""Command-line front end: ``tfqkd keyrate | simulate | plob | validate``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import channel_model
from .analysis import analyze_experiment, assignment_table
from .dataio import (
    FIXTURES,
    SchemaError,
    emit_curve,
    emit_report,
    load_experiment,
    load_fixture,
    validate_document,
)
from .decoy_bounds import IntensityOrderError, IntensityTriple, SELECTION_MODES
from .fluctuation import FluctuationConfig
from .key_rate import ProtocolParams


class UsageError(Exception):
    pass


def parse_loss_range(text: str):
    """``start:stop:step`` in dB, stop inclusive."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--loss expects start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError("--loss needs step > 0 and stop >= start")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def _read_record(path: str, fmt: str):
    p = Path(path)
    if not p.exists():
        stem = p.name[:-5] if p.name.endswith(".json") else p.name
        if stem in FIXTURES and p.parent == Path("."):
            return load_fixture(stem)
        raise UsageError(f"{path}: no such file")
    try:
        return load_experiment(p.read_bytes(), fmt)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def _write(args, data: bytes):
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _params(args) -> ProtocolParams:
    return ProtocolParams(f_ec=args.f_ec, series_cutoff=args.cutoff)


def cmd_keyrate(args) -> int:
    record = _read_record(args.experiment, args.input_format)
    if args.assignments == "report":
        _write(args, assignment_table(record).encode("utf-8"))
        return 0
    cfg = FluctuationConfig(
        grid=args.grid,
        refine_passes=args.refine,
        mode=args.mode.replace("-", "_"),
        params=_params(args),
        selection=args.selection,
    )
    report = analyze_experiment(record, cfg, fluctuations=not args.no_fluctuations)
    _write(args, emit_report(report, args.format))
    return 0


def cmd_simulate(args) -> int:
    losses = parse_loss_range(args.loss)
    try:
        ch = channel_model.ChannelParams(losses[0], args.dark, args.visibility)
        s = IntensityTriple(args.mu, args.nu, args.omega)
    except (ValueError, IntensityOrderError) as exc:
        raise UsageError(str(exc)) from None
    if args.alpha2 <= 0:
        raise UsageError("--alpha2 must be > 0")
    if losses[0] <= 0:
        raise UsageError("--loss must start above 0 dB")
    points = channel_model.sweep_curve(ch, args.alpha2, s, losses, _params(args), args.nodes, args.selection)
    _write(args, emit_curve(points))
    return 0


def cmd_plob(args) -> int:
    lines = ["loss_db,plob"]
    for loss in args.losses:
        if loss <= 0:
            raise UsageError(f"loss must be > 0 dB (eta = 1 diverges), got {loss}")
        lines.append(f"{loss},{channel_model.plob_bound_db(loss):.4e}")
    _write(args, ("\n".join(lines) + "\n").encode("utf-8"))
    return 0


def cmd_validate(args) -> int:
    p = Path(args.experiment)
    if not p.exists():
        raise UsageError(f"{args.experiment}: no such file")
    text = p.read_text(encoding="utf-8")
    if args.input_format == "csv":
        from .dataio import _doc_from_csv

        try:
            doc = _doc_from_csv(text)
        except SchemaError as exc:
            doc, problems = None, [str(exc)]
    else:
        try:
            doc = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            doc, problems = None, [f"document: invalid JSON ({exc})"]
    if doc is not None:
        problems = validate_document(doc)
    for msg in problems:
        print(f"{args.experiment}: {msg}", file=sys.stderr)
    if not problems:
        print(f"{args.experiment}: ok", file=sys.stderr)
    return 1 if problems else 0


def _add_common(p):
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--f-ec", dest="f_ec", type=float, default=1.16, help="error-correction inefficiency (default 1.16)")
    p.add_argument("--cutoff", type=int, default=60, help="photon-number cutoff of the residual sums (default 60)")
    p.add_argument("--selection", choices=SELECTION_MODES, default="positive",
                   help="how candidate yield bounds are reduced (default positive)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfqkd", description="Twin-field QKD key-rate analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keyrate", help="evaluate an experiment record")
    p.add_argument("experiment", help="experiment file (or a bundled fixture name such as 38dB.json)")
    p.add_argument("--input-format", choices=("json", "csv"), default="json")
    p.add_argument("--format", choices=("json", "table-text", "csv"), default="table-text")
    p.add_argument("--grid", type=int, default=7, help="fluctuation grid points per axis (default 7)")
    p.add_argument("--refine", type=int, default=1, help="halved-step refinement passes (default 1)")
    p.add_argument("--mode", choices=("joint", "per-detector"), default="joint")
    p.add_argument("--no-fluctuations", action="store_true", help="skip the min/max search")
    p.add_argument("--assignments", choices=("report",), help="list every candidate yield bound and exit")
    _add_common(p)
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser("simulate", help="simulated key rate versus loss")
    p.add_argument("--loss", required=True, help="start:stop:step in dB, stop inclusive")
    p.add_argument("--alpha2", type=float, default=0.0256)
    p.add_argument("--mu", type=float, default=0.087)
    p.add_argument("--nu", type=float, default=0.0088)
    p.add_argument("--omega", type=float, default=1.0e-4)
    p.add_argument("--visibility", type=float, default=channel_model.DEFAULT_VISIBILITY)
    p.add_argument("--dark", type=float, default=channel_model.DEFAULT_DARK_COUNT_PROB,
                   help="dark-count probability per detector per gate")
    p.add_argument("--nodes", type=int, default=channel_model.DEFAULT_NODES, help="phase quadrature nodes")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plob", help="PLOB bound for each loss in dB")
    p.add_argument("losses", nargs="+", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plob)

    p = sub.add_parser("validate", help="check an experiment record")
    p.add_argument("experiment")
    p.add_argument("--input-format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tfqkd {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, ValueError) as exc:
        print(f"tfqkd {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
