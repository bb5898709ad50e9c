"""Statistical post-processing of run results.

Produces mean delay and route-length summaries with 90% Student-t intervals,
per-bundle delay-difference histograms against the epidemic baseline, and
coarse-grained delay evolution series. Everything here is a pure function of
run results; runs themselves are never touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

# Two-sided 90% Student-t critical values (the 0.95 one-sided quantile) by
# degrees of freedom. Experiments use single-digit run counts, so a small
# embedded table beats a numerics dependency; df above 30 clamps to the last
# entry (under 1% high bias, conservative).
_T_90 = {
    1: 6.314, 2: 2.920, 3: 2.353, 4: 2.132, 5: 2.015,
    6: 1.943, 7: 1.895, 8: 1.860, 9: 1.833, 10: 1.812,
    11: 1.796, 12: 1.782, 13: 1.771, 14: 1.761, 15: 1.753,
    16: 1.746, 17: 1.740, 18: 1.734, 19: 1.729, 20: 1.725,
    21: 1.721, 22: 1.717, 23: 1.714, 24: 1.711, 25: 1.708,
    26: 1.706, 27: 1.703, 28: 1.701, 29: 1.699, 30: 1.697,
}


@dataclass(frozen=True)
class ConfidenceInterval:
    mean: float
    half_width: float
    level: float = 0.90
    n: int = 0


@dataclass(frozen=True)
class DelayHistogram:
    """Counts of (delay_other - delay_epidemic) per 1 s bin over matched bundles.

    A bundle is matched when both runs delivered it; bundles delivered by only
    one side are counted separately and never binned.
    """

    counts: Mapping[int, int]
    matched: int
    only_other: int
    only_epidemic: int
    bin_width: float = 1.0


@dataclass(frozen=True)
class EvolutionSeries:
    """Mean delay of bundles delivered within each fixed-width time bucket.

    means[b] covers deliveries at times in [b*bucket_width, (b+1)*bucket_width)
    and is None for buckets with no deliveries.
    """

    means: tuple[float | None, ...]
    bucket_width: float = 100.0


def mean_delay(stats) -> float:
    """Arithmetic mean delay in seconds over delivered bundles."""
    delays = stats.delays_seconds()
    if not delays:
        raise ValueError("no delivered bundles to average")
    return math.fsum(delays) / len(delays)


def mean_route_length(stats) -> float:
    """Mean number of node-to-node transmissions over delivered bundles."""
    hops = stats.delivered_hops()
    if not hops:
        raise ValueError("no delivered bundles to average")
    return math.fsum(hops) / len(hops)


def student_t_ci(samples: Sequence[float], level: float = 0.90) -> ConfidenceInterval:
    """Two-sided confidence interval for the mean of a small sample."""
    if level != 0.90:
        raise ValueError("only the 90% level has embedded critical values")
    n = len(samples)
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    mean = math.fsum(samples) / n
    variance = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    t = _T_90[min(n - 1, 30)]
    return ConfidenceInterval(
        mean=mean, half_width=t * math.sqrt(variance / n), level=level, n=n
    )


def _require_same_traffic(stats_a, stats_b) -> None:
    if (
        stats_a.generated != stats_b.generated
        or stats_a.source != stats_b.source
        or stats_a.dest != stats_b.dest
        or stats_a.created_tick != stats_b.created_tick
    ):
        raise ValueError(
            "runs do not share a traffic schedule; compare runs with the same master seed"
        )


def delay_vs_epidemic(stats_other, stats_epidemic) -> DelayHistogram:
    """Per-bundle delay difference histogram against the epidemic run.

    Differences are binned at 1 s (floor), computed exactly on the tick grid.
    Both runs must come from the same master seed so bundle ids line up.
    """
    _require_same_traffic(stats_other, stats_epidemic)
    tps = stats_other.ticks_per_second
    if tps != stats_epidemic.ticks_per_second:
        raise ValueError("runs use different tick rates")
    counts: dict[int, int] = {}
    matched = only_other = only_epidemic = 0
    for other_tick, epi_tick in zip(
        stats_other.delivered_tick, stats_epidemic.delivered_tick
    ):
        if other_tick is None and epi_tick is None:
            continue
        if epi_tick is None:
            only_other += 1
            continue
        if other_tick is None:
            only_epidemic += 1
            continue
        matched += 1
        bin_index = (other_tick - epi_tick) // tps
        counts[bin_index] = counts.get(bin_index, 0) + 1
    return DelayHistogram(
        counts=counts,
        matched=matched,
        only_other=only_other,
        only_epidemic=only_epidemic,
    )


def delay_evolution(stats, duration: float | None = None) -> EvolutionSeries:
    """Mean delay per 100 s delivery-time bucket.

    With `duration` the series spans [0, duration]; otherwise it ends at the
    bucket of the last delivery.
    """
    tps = stats.ticks_per_second
    bucket_ticks = 100 * tps
    sums: dict[int, float] = {}
    tallies: dict[int, int] = {}
    for made, done in zip(stats.created_tick, stats.delivered_tick):
        if done is None:
            continue
        bucket = done // bucket_ticks
        sums[bucket] = sums.get(bucket, 0.0) + (done - made) / tps
        tallies[bucket] = tallies.get(bucket, 0) + 1
    if duration is not None:
        n_buckets = math.ceil(duration / 100.0)
    else:
        n_buckets = max(sums) + 1 if sums else 0
    means = tuple(
        (sums[b] / tallies[b]) if b in sums else None for b in range(n_buckets)
    )
    return EvolutionSeries(means=means)


@dataclass(frozen=True)
class TableRow:
    """One experiment cell: per-run means aggregated across seeds."""

    policy: str
    metric: str | None
    d: float
    knowledge: int | None
    n_runs: int
    mean_delay: float | None
    delay_halfwidth: float | None
    mean_hops: float | None
    hops_halfwidth: float | None
    delivery_ratio: float


def _cell_summary(per_run: list[float]) -> tuple[float | None, float | None]:
    """Mean and CI half-width over per-run samples; half-width absent for n < 2."""
    if not per_run:
        return None, None
    if len(per_run) < 2:
        return per_run[0], None
    ci = student_t_ci(per_run)
    return ci.mean, ci.half_width


def aggregate_table(runs: Iterable) -> list[TableRow]:
    """Group runs by (policy, metric, d, knowledge) and summarize each cell.

    Cell statistics are computed over per-run means, never over pooled bundles,
    so the interval widths reflect run-to-run variability. Runs that delivered
    nothing contribute to the delivery ratio but not to delay/hop means.
    """
    cells: dict[tuple, list] = {}
    for stats in runs:
        key = (stats.policy, stats.metric, stats.d, stats.knowledge)
        cells.setdefault(key, []).append(stats)
    rows: list[TableRow] = []
    for key in sorted(
        cells,
        key=lambda k: (k[0], k[1] or "", -(k[3] or 0), k[2]),
    ):
        group = cells[key]
        delays = [mean_delay(s) for s in group if s.delivered_count() > 0]
        hops = [mean_route_length(s) for s in group if s.delivered_count() > 0]
        ratios = [s.delivery_ratio() for s in group]
        d_mean, d_half = _cell_summary(delays)
        h_mean, h_half = _cell_summary(hops)
        rows.append(
            TableRow(
                policy=key[0],
                metric=key[1],
                d=key[2],
                knowledge=key[3],
                n_runs=len(group),
                mean_delay=d_mean,
                delay_halfwidth=d_half,
                mean_hops=h_mean,
                hops_halfwidth=h_half,
                delivery_ratio=math.fsum(ratios) / len(ratios),
            )
        )
    return rows


def format_table(rows: Sequence[TableRow]) -> str:
    """Render table rows as delimited text; absent values render as '-'."""

    def num(v: float | None) -> str:
        return "-" if v is None else f"{v:.4f}"

    lines = ["policy,metric,d,l,mean_delay,delay_halfwidth,mean_hops,hops_halfwidth,delivery_ratio"]
    for r in rows:
        lines.append(
            ",".join(
                (
                    r.policy,
                    r.metric or "-",
                    repr(r.d),
                    "-" if r.knowledge is None else str(r.knowledge),
                    num(r.mean_delay),
                    num(r.delay_halfwidth),
                    num(r.mean_hops),
                    num(r.hops_halfwidth),
                    f"{r.delivery_ratio:.6f}",
                )
            )
        )
    return "\n".join(lines) + "\n"


def format_histogram(hist: DelayHistogram) -> str:
    """Two-column text: bin start (seconds) and count, ascending bins."""
    lines = ["bin_start,count"]
    for b in sorted(hist.counts):
        lines.append(f"{b * hist.bin_width:.0f},{hist.counts[b]}")
    return "\n".join(lines) + "\n"


def format_evolution(series: EvolutionSeries) -> str:
    """Two-column text: bucket start (seconds) and mean delay; empty buckets skipped."""
    lines = ["bucket_start,mean_delay"]
    for b, mean in enumerate(series.means):
        if mean is not None:
            lines.append(f"{b * series.bucket_width:.0f},{mean:.4f}")
    return "\n".join(lines) + "\n"
