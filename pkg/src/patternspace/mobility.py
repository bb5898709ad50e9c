"""Node movement: i.i.d. location draws from each node's own pattern, uniform rest times."""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, replace
from itertools import accumulate
from typing import Protocol, Sequence

from .patterns import Pattern


class LocationSampler:
    """Draws locations from a fixed probability vector via its cumulative table."""

    __slots__ = ("_cum", "_last")

    def __init__(self, pattern: Sequence[float]) -> None:
        if len(pattern) == 0:
            raise ValueError("pattern must be non-empty")
        self._cum = list(accumulate(pattern))
        self._last = len(pattern) - 1

    def draw(self, rng: random.Random) -> int:
        # bisect can fall off the end when the cumulative tail rounds below 1.
        return min(bisect_right(self._cum, rng.random()), self._last)


def sample_next_location(pattern: Sequence[float], rng: random.Random) -> int:
    """One location draw from the pattern; consumes exactly one rng.random()."""
    return LocationSampler(pattern).draw(rng)


def sample_rest_time(t_min: float, t_max: float, rng: random.Random) -> float:
    """Rest duration uniform on [t_min, t_max]; consumes exactly one uniform draw."""
    if not 0 < t_min <= t_max:
        raise ValueError(f"need 0 < t_min <= t_max, got {t_min!r}, {t_max!r}")
    return rng.uniform(t_min, t_max)


@dataclass(frozen=True)
class NodeState:
    """One node's mobility state at an instant of simulated time (seconds)."""

    node: int
    pattern: Pattern
    location: int
    next_move_at: float


DEFAULT_REST_MIN = 5.0
DEFAULT_REST_MAX = 15.0


def advance_node(
    state: NodeState,
    now: float,
    rng: random.Random,
    t_min: float = DEFAULT_REST_MIN,
    t_max: float = DEFAULT_REST_MAX,
) -> NodeState:
    """Perform the move due at `now`: draw the new location, then the next rest.

    Draw order (location first, rest second) is part of the contract; anything
    replaying a trace must consume the rng the same way. Transitions are
    instantaneous and the new location may equal the old one.
    """
    if now < state.next_move_at:
        raise ValueError(f"move at t={now!r} is before the scheduled t={state.next_move_at!r}")
    new_loc = sample_next_location(state.pattern, rng)
    rest = sample_rest_time(t_min, t_max, rng)
    return replace(state, location=new_loc, next_move_at=now + rest)


class _World(Protocol):
    def occupants_at(self, location: int) -> Sequence[int]: ...


def colocated_nodes(world: _World, location: int) -> set[int]:
    """Ids of all nodes currently at `location` (contact = shared location)."""
    return set(world.occupants_at(location))
