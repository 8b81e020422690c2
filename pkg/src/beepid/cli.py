"""Command-line front end.

Four subcommands: ``analyze`` evaluates the closed forms, ``simulate``
runs one parameter point, ``sweep`` covers the configured grid, and
``compare-filter`` reports filtered-vs-unfiltered gains. Simulation
commands read a flat JSON config (same keys as SimConfig.to_dict),
accept ``--set key=value`` overrides (comma lists for grids), and emit
schema-stable CSV.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import false_id_prob, optimal_p, optimal_T, optimal_T_exact
from .montecarlo import (
    ConfigError,
    FilterComparison,
    MetricsRecord,
    SimConfig,
    compare_filtering,
    sweep,
)

METRICS_HEADER = (
    "T_ms,p,interference_rate,filter_len,runs,events,tp,fn,tn,fp,tp_rate,tn_rate"
)
COMPARE_HEADER = (
    "T_ms,p,interference_rate,filter_len,runs,"
    "tp_rate_off,tp_rate_on,tn_rate_off,tn_rate_on,tp_gain,tn_loss,net"
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def metrics_csv(records: list[MetricsRecord]) -> str:
    lines = [METRICS_HEADER]
    for r in records:
        lines.append(
            f"{r.t_ms},{_fmt(r.p)},{_fmt(r.interference_rate)},{r.filter_len},"
            f"{r.runs},{r.events},{r.tp},{r.fn},{r.tn},{r.fp},"
            f"{_fmt(r.tp_rate)},{_fmt(r.tn_rate)}"
        )
    return "\n".join(lines) + "\n"


def compare_csv(records: list[FilterComparison]) -> str:
    lines = [COMPARE_HEADER]
    for r in records:
        lines.append(
            f"{r.t_ms},{_fmt(r.p)},{_fmt(r.interference_rate)},{r.filter_len},"
            f"{r.runs},{_fmt(r.tp_rate_off)},{_fmt(r.tp_rate_on)},"
            f"{_fmt(r.tn_rate_off)},{_fmt(r.tn_rate_on)},"
            f"{_fmt(r.tp_gain)},{_fmt(r.tn_loss)},{_fmt(r.net)}"
        )
    return "\n".join(lines) + "\n"


GNUPLOT_TEMPLATE = """\
# Companion gnuplot script: TP/TN rate against beep probability.
set datafile separator ','
set xlabel 'beep probability p'
set ylabel 'rate'
set yrange [0:1.05]
set key outside
plot '{csv}' using 2:11 with points title 'TP rate', \\
     '{csv}' using 2:12 with points title 'TN rate'
"""


def _parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, _, raw = text.partition("=")
    key = key.strip()
    raw = raw.strip()
    if raw.lower() in ("true", "false"):
        return key, raw.lower() == "true"
    parts = [part for part in raw.split(",") if part != ""]
    values: list[object] = []
    for part in parts:
        try:
            num = float(part)
        except ValueError:
            raise ConfigError(f"override {text!r}: {part!r} is not a number") from None
        values.append(int(num) if num == int(num) else num)
    if not values:
        raise ConfigError(f"override {text!r} carries no value")
    return key, values if len(values) > 1 or "," in raw else values[0]


def load_config(path: str, overrides: list[str], seed: int | None) -> SimConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    for text in overrides:
        key, value = _parse_override(text)
        if key not in SimConfig().to_dict():
            raise ConfigError(f"unknown config key: {key!r}")
        raw[key] = value
    if seed is not None:
        raw["master_seed"] = seed
    return SimConfig.from_dict(raw)


def _write_output(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, newline="")


def _emit_gnuplot(out_path: str | None) -> None:
    if out_path is None:
        return
    csv_name = Path(out_path).name
    script = GNUPLOT_TEMPLATE.format(csv=csv_name)
    Path(out_path).with_suffix(".gp").write_text(script)


def cmd_analyze(args: argparse.Namespace) -> int:
    n = args.n
    if n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.target is not None and not 0.0 < args.target <= 1.0:
        print("error: --target must be in (0, 1]", file=sys.stderr)
        return EXIT_CONFIG
    target = args.target if args.target is not None else 1.0 / n
    if args.p is not None and args.T is not None:
        try:
            prob = false_id_prob(n, args.p, args.T)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"false_id_prob(n={n}, p={args.p}, T={args.T}) = {prob:.12g}")
    elif (args.p is None) != (args.T is None):
        print("error: --p and --T must be given together", file=sys.stderr)
        return EXIT_CONFIG
    print(f"optimal_p(n={n}) = {optimal_p(n):.12g}")
    print(f"optimal_T(n={n}, target={target:.12g}) = {optimal_T(n, target):.12g}")
    print(
        f"optimal_T_exact(n={n}, target={target:.12g}) = "
        f"{optimal_T_exact(n, target):.12g}"
    )
    print(f"false_id target = {target:.12g}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args.set or [], args.seed)
    for grid_name in ("period_ms", "p", "interference_rate"):
        if len(getattr(cfg, grid_name)) != 1:
            raise ConfigError(
                f"simulate needs single-valued grids; {grid_name} has "
                f"{len(getattr(cfg, grid_name))} values (use sweep, or --set "
                f"{grid_name}=<one value>)"
            )
    records = sweep(cfg, threads=args.threads)
    _write_output(metrics_csv(records), args.out)
    _maybe_dump_config(cfg, args)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args.set or [], args.seed)
    records = sweep(cfg, threads=args.threads)
    _write_output(metrics_csv(records), args.out)
    if args.emit_gnuplot:
        _emit_gnuplot(args.out)
    _maybe_dump_config(cfg, args)
    return EXIT_OK


def cmd_compare_filter(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args.set or [], args.seed)
    if args.filter_len is not None:
        cfg.filter_len = args.filter_len
        cfg.validate()
    records = compare_filtering(cfg, threads=args.threads)
    _write_output(compare_csv(records), args.out)
    _maybe_dump_config(cfg, args)
    return EXIT_OK


def _maybe_dump_config(cfg: SimConfig, args: argparse.Namespace) -> None:
    dump = getattr(args, "dump_config", None)
    if dump:
        Path(dump).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beepid",
        description="Beep-pattern device identification: analysis and simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="evaluate the closed-form protocol formulas")
    p_an.add_argument("--n", type=int, required=True, help="number of active stations")
    p_an.add_argument("--p", type=float, default=None, help="beep probability")
    p_an.add_argument("--T", type=int, default=None, help="period length in slots")
    p_an.add_argument(
        "--target",
        type=float,
        default=None,
        help="false-identification target probability (default 1/n)",
    )
    p_an.set_defaults(func=cmd_analyze)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to JSON config")
    common.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override a config key (grids as comma lists); repeatable",
    )
    common.add_argument("--seed", type=int, default=None, help="override master_seed")
    common.add_argument("--out", default=None, help="CSV output path (default stdout)")
    common.add_argument("--threads", type=int, default=1, help="worker processes")
    common.add_argument(
        "--dump-config", default=None, help="write the effective config JSON here"
    )

    p_sim = sub.add_parser(
        "simulate", parents=[common], help="run a single parameter point"
    )
    p_sim.set_defaults(func=cmd_simulate)

    p_sw = sub.add_parser("sweep", parents=[common], help="run the full parameter grid")
    p_sw.add_argument(
        "--emit-gnuplot",
        action="store_true",
        help="write a companion gnuplot script next to the CSV",
    )
    p_sw.set_defaults(func=cmd_sweep)

    p_cf = sub.add_parser(
        "compare-filter",
        parents=[common],
        help="paired filtered-vs-unfiltered comparison",
    )
    p_cf.add_argument(
        "--filter-len", type=int, default=None, help="filter window length m"
    )
    p_cf.set_defaults(func=cmd_compare_filter)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
