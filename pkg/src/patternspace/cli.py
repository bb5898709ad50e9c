"""Command-line entry point: run scenarios, sweep the experiment matrix, build tables.

Subcommands:
  run     one simulation, one record file
  matrix  the full experiment grid (or a slice of it via overrides)
  tables  re-aggregate existing record files into tables, histograms, evolution series
  verify  the cross-module property suite

Exit codes: 0 success, 1 validation failure, 2 I/O failure, 3 verify failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import _verify, analysis, engine

DEFAULT_D_GRID = (1.1, 1.5, 2.0)
DEFAULT_KNOWLEDGE_GRID = (1, 2, 3, 4, 25)
BASELINE_POLICIES = ("epidemic", "opportunistic", "random")
PATTERN_METRICS = ("euclidean", "canberra", "angle", "matching")


class ConfigSyntaxError(ValueError):
    """A config line is not `key = value`."""


class ConfigKeyError(ValueError):
    """A config key is not a scenario field."""


class ConfigValueError(ValueError):
    """A config value fails to parse or is out of range."""


_INT_KEYS = {"n_nodes", "n_locations", "knowledge", "seed", "runs"}
_FLOAT_KEYS = {
    "duration",
    "traffic_horizon",
    "packet_interval",
    "t_min",
    "t_max",
    "delta",
    "time_step",
    "d",
}
_STR_KEYS = {"policy", "metric"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def parse_config(text: str) -> engine.ScenarioConfig:
    """Parse flat `key = value` lines (# starts a comment) into a config.

    Missing keys keep their defaults; range checks run immediately so a bad
    file fails before any simulation starts.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigSyntaxError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, _, literal = line.partition("=")
        key = key.strip()
        literal = literal.strip()
        if not key or not literal:
            raise ConfigSyntaxError(f"line {lineno}: expected `key = value`, got {raw!r}")
        if key not in _ALL_KEYS:
            raise ConfigKeyError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(literal)
            elif key in _FLOAT_KEYS:
                values[key] = float(literal)
            else:
                values[key] = literal
        except ValueError:
            raise ConfigValueError(
                f"line {lineno}: cannot parse value {literal!r} for {key!r}"
            ) from None
    config = engine.ScenarioConfig(**values)  # type: ignore[arg-type]
    try:
        config.validate(strict=False)
    except ValueError as err:
        raise ConfigValueError(str(err)) from None
    return config


def _apply_overrides(config: engine.ScenarioConfig, args: argparse.Namespace) -> engine.ScenarioConfig:
    updates = {}
    for field in ("policy", "metric", "d", "knowledge", "seed", "runs"):
        value = getattr(args, field, None)
        if value is not None:
            updates[field] = value
    if updates:
        config = replace(config, **updates)
    try:
        config.validate(strict=False)
    except ValueError as err:
        raise ConfigValueError(str(err)) from None
    return config


def _load_config(args: argparse.Namespace) -> engine.ScenarioConfig:
    if args.config is not None:
        text = Path(args.config).read_text(encoding="utf-8")
        config = parse_config(text)
    else:
        config = engine.ScenarioConfig()
    return _apply_overrides(config, args)


def records_filename(stats_or_config) -> str:
    """Unique record-file name for one (policy, metric, d, knowledge, seed)."""
    c = stats_or_config
    if c.policy == "pattern":
        middle = f"pattern_{c.metric}_l{c.knowledge}"
    else:
        middle = str(c.policy)
    return f"records_{middle}_d{c.d!r}_s{c.seed}.csv"


def _cell_token(policy: str, metric: str | None, knowledge: int | None, d: float) -> str:
    if policy == "pattern":
        return f"pattern_{metric}_l{knowledge}_d{d!r}"
    return f"{policy}_d{d!r}"


def _matrix_configs(config: engine.ScenarioConfig, args: argparse.Namespace) -> list[engine.ScenarioConfig]:
    """The experiment grid, narrowed by any explicit override."""
    ds = [config.d] if args.d is not None else list(DEFAULT_D_GRID)
    if args.policy is not None:
        policies = [args.policy]
    else:
        policies = list(BASELINE_POLICIES) + ["pattern"]
    metrics = [args.metric] if args.metric is not None else list(PATTERN_METRICS)
    knowledges = [args.knowledge] if args.knowledge is not None else list(DEFAULT_KNOWLEDGE_GRID)
    cells: list[engine.ScenarioConfig] = []
    for d in ds:
        for policy in policies:
            if policy == "pattern":
                for metric in metrics:
                    for knowledge in knowledges:
                        cells.append(
                            replace(
                                config,
                                d=d,
                                policy="pattern",
                                metric=metric,
                                knowledge=min(knowledge, config.n_locations),
                            )
                        )
            else:
                cells.append(
                    replace(config, d=d, policy=policy, metric=None, knowledge=None)
                )
    return cells


def _write_tables_from_records(out_dir: Path) -> list[engine.RunStats]:
    """Re-read every record file and derive tables.csv from them alone."""
    record_paths = sorted(out_dir.glob("records_*.csv"))
    if not record_paths:
        raise ValueError(f"no record files found under {out_dir}")
    runs = [engine.read_records(p) for p in record_paths]
    rows = analysis.aggregate_table(runs)
    (out_dir / "tables.csv").write_text(analysis.format_table(rows), encoding="ascii")
    return runs


def _write_comparisons(out_dir: Path, runs: list[engine.RunStats]) -> None:
    """Histograms against epidemic (counts summed over seeds) and evolution series."""
    epidemics = {
        (r.d, r.seed): r for r in runs if r.policy == "epidemic"
    }
    cells: dict[tuple, list[engine.RunStats]] = {}
    for r in runs:
        cells.setdefault((r.policy, r.metric, r.knowledge, r.d), []).append(r)
    for (policy, metric, knowledge, d), group in sorted(
        cells.items(), key=lambda kv: str(kv[0])
    ):
        token = _cell_token(policy, metric, knowledge, d)
        if policy != "epidemic":
            counts: dict[int, int] = {}
            matched = only_other = only_epi = 0
            complete = True
            for r in group:
                epi = epidemics.get((r.d, r.seed))
                if epi is None:
                    complete = False
                    break
                hist = analysis.delay_vs_epidemic(r, epi)
                for b, c in hist.counts.items():
                    counts[b] = counts.get(b, 0) + c
                matched += hist.matched
                only_other += hist.only_other
                only_epi += hist.only_epidemic
            if complete:
                merged = analysis.DelayHistogram(
                    counts=counts,
                    matched=matched,
                    only_other=only_other,
                    only_epidemic=only_epi,
                )
                (out_dir / f"hist_{token}.csv").write_text(
                    analysis.format_histogram(merged), encoding="ascii"
                )
        # Evolution: unweighted mean over runs of each bucket's per-run mean,
        # consistent with the per-run aggregation used for the tables.
        per_run = [analysis.delay_evolution(r) for r in group]
        width = max((len(s.means) for s in per_run), default=0)
        merged_means: list[float | None] = []
        for b in range(width):
            vals = [s.means[b] for s in per_run if b < len(s.means) and s.means[b] is not None]
            merged_means.append(sum(vals) / len(vals) if vals else None)
        series = analysis.EvolutionSeries(means=tuple(merged_means))
        (out_dir / f"evolution_{token}.csv").write_text(
            analysis.format_evolution(series), encoding="ascii"
        )


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    config.validate(strict=True)
    stats = engine.run(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / records_filename(stats)
    engine.write_records(stats, path)
    delivered = stats.delivered_count()
    if delivered:
        summary = (
            f"mean_delay={analysis.mean_delay(stats):.4f}"
            f" mean_hops={analysis.mean_route_length(stats):.4f}"
        )
    else:
        summary = "mean_delay=- mean_hops=-"
    print(
        f"run policy={stats.policy} metric={stats.metric or '-'} d={stats.d!r}"
        f" l={stats.knowledge if stats.knowledge is not None else '-'}"
        f" seed={stats.seed} generated={stats.generated} delivered={delivered}"
        f" {summary} -> {path}"
    )
    return 0


def cmd_matrix(args: argparse.Namespace) -> int:
    config = _load_config(args)
    cells = _matrix_configs(config, args)
    seeds = [config.seed + i for i in range(config.runs)]
    tasks = [replace(c, seed=s, runs=1) for c in cells for s in seeds]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = engine.run_matrix(tasks, jobs=args.jobs or 1)
    for stats in results:
        engine.write_records(stats, out_dir / records_filename(stats))
    _write_tables_from_records(out_dir)
    print(f"matrix: {len(results)} runs -> {out_dir}/tables.csv")
    return 0


def cmd_tables(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    runs = _write_tables_from_records(out_dir)
    _write_comparisons(out_dir, runs)
    print(f"tables: aggregated {len(runs)} record files under {out_dir}")
    return 0


def cmd_verify(_args: argparse.Namespace) -> int:
    results = _verify.run_all()
    failed = 0
    for name, passed, detail in results:
        if passed:
            print(f"PASS {name}")
        else:
            failed += 1
            print(f"FAIL {name}: {detail}")
    if failed:
        print(f"{failed} of {len(results)} checks failed")
        return 3
    print(f"all {len(results)} checks passed")
    return 0


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for I/O here, so
    # usage problems surface as validation failures instead.
    def error(self, message: str):
        raise ConfigValueError(message)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="scenario config file (flat key = value lines)")
    sub.add_argument("--policy", choices=list(engine.POLICIES), help="forwarding policy")
    sub.add_argument("--metric", choices=list(PATTERN_METRICS), help="pattern similarity metric")
    sub.add_argument("--d", type=float, help="location-preference concentration (>= 1)")
    sub.add_argument("--knowledge", type=int, help="known strongest pattern components")
    sub.add_argument("--seed", type=int, help="master seed (matrix uses seed..seed+runs-1)")
    sub.add_argument("--runs", type=int, help="runs per experiment cell")
    sub.add_argument("--jobs", type=int, default=1, help="concurrent simulations")
    sub.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="patternspace", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)
    for name, handler, blurb in (
        ("run", cmd_run, "simulate one scenario and write its record file"),
        ("matrix", cmd_matrix, "run the experiment grid and aggregate tables"),
        ("tables", cmd_tables, "rebuild tables and comparison files from records"),
    ):
        sub = commands.add_parser(name, help=blurb)
        _add_common_flags(sub)
        sub.set_defaults(handler=handler)
    verify = commands.add_parser("verify", help="run the property suite")
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
