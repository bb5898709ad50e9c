"""Similarity and distance measures between location-probability vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

DEFAULT_MATCHING_DELTA = 2e-8

METRIC_NAMES = ("euclidean", "canberra", "angle", "matching")

# Metrics where a larger value means "more similar".
_HIGHER_IS_BETTER = frozenset({"angle", "matching"})


def _require_same_length(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) != len(b):
        raise ValueError(f"vector lengths differ: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ValueError("vectors must be non-empty")


def euclidean_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Plain L2 distance. Lower means more similar."""
    _require_same_length(a, b)
    # fsum keeps the sum independent of coordinate order.
    return math.sqrt(math.fsum((x - y) * (x - y) for x, y in zip(a, b)))


def canberra_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Coordinate-wise relative difference sum_k |a_k-b_k| / (|a_k|+|b_k|).

    Zero handling: a coordinate where exactly one side is zero contributes 1
    (the maximal relative difference); a coordinate where both sides are zero
    contributes 0, so absent-absent agreement is not penalized.
    """
    _require_same_length(a, b)
    terms = []
    for x, y in zip(a, b):
        if x == 0.0 and y == 0.0:
            continue
        if x == 0.0 or y == 0.0:
            terms.append(1.0)
        else:
            terms.append(abs(x - y) / (abs(x) + abs(y)))
    return math.fsum(terms)


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine of the angle between the vectors. Higher means more similar.

    Identical vectors score exactly 1.0 (the dot/norm ratio can miss 1 by a
    rounding ulp in either direction, and downstream comparators treat 1.0 as
    the exact "same direction" value); other values are clamped to at most 1.
    """
    _require_same_length(a, b)
    na = math.sqrt(math.fsum(x * x for x in a))
    nb = math.sqrt(math.fsum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    if tuple(a) == tuple(b):
        return 1.0
    value = math.fsum(x * y for x, y in zip(a, b)) / (na * nb)
    return min(value, 1.0)


def matching_similarity(
    a: Sequence[float], b: Sequence[float], delta: float = DEFAULT_MATCHING_DELTA
) -> int:
    """Number of coordinates agreeing to within delta. Higher means more similar."""
    _require_same_length(a, b)
    if not (delta >= 0.0 and math.isfinite(delta)):
        raise ValueError(f"delta must be a finite non-negative real, got {delta!r}")
    return sum(1 for x, y in zip(a, b) if abs(x - y) <= delta)


@dataclass(frozen=True)
class Score:
    """A metric value tagged with its orientation so comparisons can't flip sign."""

    value: float
    higher_is_better: bool


def better(x: Score, y: Score) -> bool:
    """True when x is strictly more similar than y. Orientations must agree."""
    if x.higher_is_better != y.higher_is_better:
        raise ValueError("cannot compare scores with different orientations")
    return x.value > y.value if x.higher_is_better else x.value < y.value


@dataclass(frozen=True)
class MetricKind:
    """A named similarity measure plus its tolerance parameter when it has one."""

    name: str
    delta: float = DEFAULT_MATCHING_DELTA

    def __post_init__(self) -> None:
        if self.name not in METRIC_NAMES:
            raise ValueError(
                f"unknown metric {self.name!r}; expected one of {', '.join(METRIC_NAMES)}"
            )
        if not (self.delta >= 0.0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be a finite non-negative real, got {self.delta!r}")

    @property
    def higher_is_better(self) -> bool:
        return self.name in _HIGHER_IS_BETTER

    def evaluate(self, a: Sequence[float], b: Sequence[float]) -> float:
        if self.name == "euclidean":
            return euclidean_distance(a, b)
        if self.name == "canberra":
            return canberra_distance(a, b)
        if self.name == "angle":
            return cosine_similarity(a, b)
        return float(matching_similarity(a, b, self.delta))

    def score(self, a: Sequence[float], b: Sequence[float]) -> Score:
        return Score(self.evaluate(a, b), self.higher_is_better)
