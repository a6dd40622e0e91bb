"""Command-line entry point: ``ldespin <subcommand> [options]``.

Every option mirrors a RunConfig key; values given on the command line
override those read from ``--config``.  Exit codes: 0 success, 1 bad
configuration, 2 solver failure (some row carries an error), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import scans
from .io import OutputError, emit, read_columns
from .scans import ConfigError, RunConfig

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

# subcommand -> (model, grid keys it accepts)
_GRIDS = {
    "scan-dimer": ("dimer", ("lengths", "deltas", "alphas")),
    "threshold": ("dimer", ("lengths", "alphas", "tol")),
    "scan-spin1": ("spin1", ("lengths", "betas")),
    "scan-probes": ("probes", ("lengths", "ds", "jps")),
    "aklt-check": ("spin1", ("lengths",)),
}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with RunConfig keys")
    p.add_argument("--output", "-o", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int)
    p.add_argument("--verbose", "-v", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldespin", description="Exact-diagonalization scans of end-to-end entanglement in spin chains.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, keys) in _GRIDS.items():
        p = sub.add_parser(name)
        _common(p)
        p.add_argument("--k", type=int, help="eigenpairs per point")
        p.add_argument("--workers", type=int)
        p.add_argument("--high-memory", dest="high_memory", action="store_true", default=None)
        if "lengths" in keys:
            p.add_argument("--lengths", "-L", type=int, nargs="+")
        for key, typ in (("deltas", float), ("alphas", float), ("betas", float), ("jps", float), ("ds", int)):
            if key in keys:
                p.add_argument(f"--{key}", type=typ, nargs="+")
        if "tol" in keys:
            p.add_argument("--tol", type=float, help="bisection bracket width")
    p = sub.add_parser("classify", help="verdicts for (zz, charge) pairs read from a CSV")
    _common(p)
    p.add_argument("input")
    p = sub.add_parser("fit", help="exponential extrapolation of (L, value) data from a CSV")
    _common(p)
    p.add_argument("input")
    p.add_argument("--column", default="value", help="value column name")
    p.add_argument("--alternating", action="store_true")
    return parser


def _load_config(args) -> dict:
    if not args.config:
        return {}
    try:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise OutputError(f"cannot read {args.config}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{args.config}: expected a JSON object")
    return data


def make_config(args) -> RunConfig:
    model, _ = _GRIDS[args.command]
    data = _load_config(args)
    if data.get("model", model) != model:
        raise ConfigError(f"config model {data['model']!r} does not match {args.command}")
    data["model"] = model
    for key in RunConfig.__dataclass_fields__:
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    return RunConfig.from_dict(data)


def _metadata(cfg: RunConfig, command: str) -> dict:
    meta = cfg.to_dict()
    meta["command"] = command
    return meta


def _run_grid(args) -> tuple[list[dict], tuple, dict, str, str | None]:
    cfg = make_config(args)
    cmd = args.command
    if cmd == "scan-dimer":
        rows, cols = scans.scan_dimer(cfg), scans.DIMER_COLUMNS
    elif cmd == "scan-spin1":
        rows, cols = scans.scan_spin1(cfg), scans.SPIN1_COLUMNS
    elif cmd == "scan-probes":
        rows, cols = scans.scan_probes(cfg), scans.PROBE_COLUMNS
    elif cmd == "aklt-check":
        rows, cols = scans.aklt_check(cfg.lengths, cfg.seed), scans.AKLT_COLUMNS
    else:
        rows = []
        for L in cfg.lengths:
            for a in cfg.alphas:
                try:
                    rows.append(scans.find_threshold(a, L, cfg.tol, cfg.seed).row())
                except RuntimeError as exc:
                    rows.append({"alpha": a, "L": L, "found": False, "error": str(exc)})
        cols = scans.THRESHOLD_COLUMNS
    return rows, cols, _metadata(cfg, cmd), cfg.format, cfg.output


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "classify":
            pairs = read_columns(args.input, ("zz", "charge"))
            rows, cols = scans.classify_rows(pairs), scans.CLASSIFY_COLUMNS
            meta, fmt, out = {"command": "classify", "input": args.input}, args.format or "csv", args.output
        elif args.command == "fit":
            pts = read_columns(args.input, ("L", args.column))
            fit = scans.fit_exponential(pts, alternating=args.alternating)
            rows, cols = [fit.row()], scans.FIT_COLUMNS
            meta, fmt, out = {"command": "fit", "input": args.input, "column": args.column}, args.format or "csv", args.output
        else:
            rows, cols, meta, fmt, out = _run_grid(args)
        text = emit(rows, cols, fmt, out, meta)
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if out is None:
        sys.stdout.write(text)
    failed = [r for r in rows if r.get("error")]
    for r in failed:
        print(f"solver failure: {r['error']}", file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
