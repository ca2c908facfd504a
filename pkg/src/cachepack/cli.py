"""Command-line front end.

Subcommands: generate-profile (write a synthetic degradation table),
run (replay one sequence), sweep (run all sequence/alpha combinations
into a summary CSV), compare (greedy vs exhaustive baseline), and
validate (check a config or table file).

Diagnostics go to stderr; data goes to files, or to stdout only when an
output path is given as ``-``. Exit codes: 0 success, 1 validation
error, 2 oversized/infeasible request.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path

from . import scenario
from .errors import CachepackError, SearchSpaceTooLarge, ValidationError
from .presets import DEFAULT_ALPHA, PRESETS, make_server
from .synth import GeneratorParams, load_table, save_table

log = logging.getLogger("cachepack")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2


def _ensure_writable(path: str) -> None:
    if path == "-":
        return
    target = Path(path)
    try:
        with open(target, "a", encoding="utf-8"):
            pass
    except OSError as exc:
        raise ValidationError(f"output path {path!r} is not writable: {exc}") from exc


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _add_config_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="scenario JSON path, or 'builtin'")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument(
        "--no-snapping",
        dest="snapping",
        action="store_const",
        const=False,
        default=None,
        help="reject off-grid sizes instead of snapping them",
    )


def _load_config(args: argparse.Namespace) -> scenario.ScenarioConfig:
    return scenario.load_config(
        args.config,
        seed=args.seed,
        snapping=args.snapping,
        exhaustive_limit=getattr(args, "limit", None),
    )


def cmd_generate_profile(args: argparse.Namespace) -> int:
    _ensure_writable(args.out)
    params = GeneratorParams(
        seed=args.seed,
        baseline_coefficient=args.baseline,
        cache_penalty=args.cache_penalty,
        noise_amplitude=args.noise,
    )
    profile = make_server(args.server, alpha=args.alpha, generator=params)
    if args.out == "-":
        raise ValidationError("generate-profile writes binary-ish bulk data; give a file path")
    save_table(profile.table(), args.out)
    log.info("wrote %s table (%d entries) to %s", args.server, profile.table().values.size, args.out)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    _ensure_writable(args.out)
    if args.trace:
        _ensure_writable(args.trace)
    config = _load_config(args)
    report = scenario.run_scenario(
        config, args.sequence, args.alpha, literal_rule=args.literal_rule
    )
    with _open_out(args.out) as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    if args.trace:
        with _open_out(args.trace) as fh:
            scenario.write_trace_csv(report, fh)
    log.info(
        "sequence %s alpha=%s: %d placed, %d queued, objective %.4f",
        report.sequence,
        report.alpha,
        sum(1 for d in report.decisions if d.placed),
        report.queued_count,
        report.objective.total,
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    _ensure_writable(args.summary)
    config = _load_config(args)
    sequences = args.sequences.split(",") if args.sequences else None
    alphas = [float(a) for a in args.alphas.split(",")] if args.alphas else None
    reports = scenario.run_sweep(config, sequences, alphas)
    with _open_out(args.summary) as fh:
        scenario.write_summary_csv(reports, fh)
    if args.report_dir:
        out_dir = Path(args.report_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for r in reports:
            name = f"report_seq{r.sequence}_alpha{r.alpha}.json"
            (out_dir / name).write_text(json.dumps(r.to_dict(), indent=2) + "\n")
    log.info("swept %d runs", len(reports))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    _ensure_writable(args.out)
    config = _load_config(args)
    comparison = scenario.compare_with_oracle(config, args.sequence, args.alpha)
    payload = {
        "gap": comparison.gap,
        "greedy": comparison.greedy.to_dict(),
        "oracle": comparison.oracle.to_dict(),
    }
    with _open_out(args.out) as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    log.info(
        "greedy %.4f vs oracle %.4f (gap %.2f%%)",
        comparison.greedy.objective.total,
        comparison.oracle.objective.total,
        100 * comparison.gap,
    )
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    if not args.config and not args.table:
        raise ValidationError("give --config and/or --table to validate")
    if args.config:
        config = scenario.load_config(args.config)
        for alpha in config.alpha_sweep or [None]:
            scenario.build_state(config, alpha)
        log.info(
            "config ok: %d servers, %d sequences, alpha sweep %s",
            len(config.servers),
            len(config.sequences),
            config.alpha_sweep,
        )
    if args.table:
        table = load_table(args.table)
        log.info(
            "table ok: %d entries, range [%.6f, %.6f]",
            table.values.size,
            table.values.min(),
            table.values.max(),
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cachepack",
        description="Cache-contention aware workload consolidation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-profile", help="generate a synthetic degradation table")
    p.add_argument("--server", required=True, choices=sorted(PRESETS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    defaults = GeneratorParams()
    p.add_argument("--baseline", type=float, default=defaults.baseline_coefficient)
    p.add_argument("--cache-penalty", type=float, default=defaults.cache_penalty)
    p.add_argument("--noise", type=float, default=defaults.noise_amplitude)
    p.set_defaults(func=cmd_generate_profile)

    p = sub.add_parser("run", help="replay one arrival sequence")
    _add_config_options(p)
    p.add_argument("--sequence", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out", required=True, help="report JSON path, or - for stdout")
    p.add_argument("--trace", default=None, help="optional decision-trace CSV path")
    p.add_argument(
        "--literal-rule",
        action="store_true",
        help="select by the candidate server's own average instead of the global sum",
    )
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run all sequence/alpha combinations")
    _add_config_options(p)
    p.add_argument("--sequences", default=None, help="comma-separated sequence names")
    p.add_argument("--alphas", default=None, help="comma-separated alpha values")
    p.add_argument("--summary", required=True, help="summary CSV path, or - for stdout")
    p.add_argument("--report-dir", default=None, help="directory for per-run JSON reports")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="greedy vs exhaustive baseline")
    _add_config_options(p)
    p.add_argument("--sequence", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--limit", type=int, default=None, help="override the exhaustive-search limit")
    p.add_argument("--out", required=True, help="comparison JSON path, or - for stdout")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="check a config or table file")
    p.add_argument("--config", default=None)
    p.add_argument("--table", default=None)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SearchSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CachepackError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
