"""Location-preference patterns: power-law probability vectors over a fixed location set."""

from __future__ import annotations

import random
from typing import Mapping, Sequence

# A pattern assigns every location a visit probability; entries sum to 1.
Pattern = tuple[float, ...]

# Tolerance for "sums to one" checks on normalized vectors.
SUM_TOLERANCE = 1e-12


def normalization_constant(d: float, n_locations: int) -> float:
    """Normalizer of a geometric preference profile with ratio 1/d over n_locations ranks.

    Equals (1 - 1/d) / (1 - d**-n_locations), the factor that makes
    sum_r K * (1/d)**r = 1 for ranks r = 0 .. n_locations-1.
    """
    if not d > 1:
        raise ValueError(f"concentration d must be > 1 for the closed form, got {d!r}")
    if n_locations < 1:
        raise ValueError(f"n_locations must be >= 1, got {n_locations!r}")
    return (1.0 - 1.0 / d) / (1.0 - d ** -float(n_locations))


def validate_ranks(ranks: Sequence[int]) -> None:
    """Require ranks to be a permutation of 0 .. len(ranks)-1."""
    n = len(ranks)
    if n == 0:
        raise ValueError("ranks must be non-empty")
    if sorted(ranks) != list(range(n)):
        raise ValueError("ranks must be a permutation of 0..n-1")


def build_pattern(d: float, ranks: Sequence[int]) -> Pattern:
    """Probability vector with p[i] = K * (1/d)**ranks[i]; uniform when d == 1.

    ranks[i] is location i's preference rank (0 = most preferred). Larger d
    concentrates mass on low ranks; d == 1 is the uniform special case.
    """
    validate_ranks(ranks)
    if d < 1:
        raise ValueError(f"concentration d must be >= 1, got {d!r}")
    n = len(ranks)
    if d == 1:
        return (1.0 / n,) * n
    k = normalization_constant(d, n)
    inv = 1.0 / d
    return tuple(k * inv ** r for r in ranks)


def random_rank_assignment(n_locations: int, rng: random.Random) -> tuple[int, ...]:
    """Uniformly random rank permutation drawn from rng."""
    if n_locations < 1:
        raise ValueError(f"n_locations must be >= 1, got {n_locations!r}")
    perm = list(range(n_locations))
    rng.shuffle(perm)
    return tuple(perm)


def truncate_pattern(pattern: Sequence[float], keep: int) -> dict[int, float]:
    """Keep the `keep` most-probable entries as a sparse {location: probability} map.

    Probability ties break toward the lower location id so truncation is
    deterministic.
    """
    n = len(pattern)
    if not 1 <= keep <= n:
        raise ValueError(f"keep must be in 1..{n}, got {keep!r}")
    order = sorted(range(n), key=lambda i: (-pattern[i], i))
    return {i: pattern[i] for i in order[:keep]}


def densify(partial: Mapping[int, float], n_locations: int) -> Pattern:
    """Expand a sparse {location: probability} map to a full vector, zeros elsewhere."""
    vec = [0.0] * n_locations
    for loc, prob in partial.items():
        if not 0 <= loc < n_locations:
            raise ValueError(f"location id {loc!r} out of range 0..{n_locations - 1}")
        vec[loc] = prob
    return tuple(vec)
