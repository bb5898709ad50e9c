"""Discrete-event simulation core.

Schedules node moves and traffic generation on an integer tick grid, invokes
the active forwarding policy at every location whose population or custody
changed, and records per-bundle outcomes. Mobility and traffic randomness are
derived from the master seed only, never from the policy, so every policy
faces the identical movement trace and traffic schedule at a fixed seed.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, replace
from typing import Sequence

from .metrics import DEFAULT_MATCHING_DELTA, METRIC_NAMES, MetricKind
from .mobility import LocationSampler, sample_rest_time
from .patterns import Pattern, build_pattern, random_rank_assignment
from .routing import KnowledgeOracle

POLICIES = ("epidemic", "opportunistic", "random", "pattern")

# Relative slack when checking that 1/time_step is an integer tick rate.
_TICK_RATE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one simulation scenario.

    Times are in seconds. `d` is the location-preference concentration
    (1 = uniform), `knowledge` the number of strongest pattern components
    visible to forwarding decisions (defaults to all when building oracles),
    `runs` the number of seeds an experiment spans starting at `seed`.
    """

    n_nodes: int = 50
    n_locations: int = 25
    duration: float = 4000.0
    traffic_horizon: float = 500.0
    packet_interval: float = 30.0
    t_min: float = 5.0
    t_max: float = 15.0
    delta: float = DEFAULT_MATCHING_DELTA
    time_step: float = 0.01
    d: float | None = None
    policy: str | None = None
    metric: str | None = None
    knowledge: int | None = None
    seed: int = 0
    runs: int = 5

    @property
    def ticks_per_second(self) -> int:
        return round(1.0 / self.time_step)

    def validate(self, strict: bool = True) -> None:
        """Check field ranges; with strict, also require the per-run fields.

        strict mode is what run() enforces: d and policy must be set, and the
        pattern policy additionally needs metric and knowledge.
        """
        if self.n_nodes < 2:
            raise ValueError(f"n_nodes must be >= 2, got {self.n_nodes!r}")
        if self.n_locations < 1:
            raise ValueError(f"n_locations must be >= 1, got {self.n_locations!r}")
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration!r}")
        if not 0 < self.traffic_horizon <= self.duration:
            raise ValueError(
                f"traffic_horizon must be in (0, duration], got {self.traffic_horizon!r}"
            )
        if not 0 < self.packet_interval <= self.traffic_horizon:
            raise ValueError(
                f"packet_interval must be in (0, traffic_horizon], got {self.packet_interval!r}"
            )
        if not 0 < self.t_min <= self.t_max:
            raise ValueError(
                f"rest bounds need 0 < t_min <= t_max, got {self.t_min!r}, {self.t_max!r}"
            )
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be a finite non-negative real, got {self.delta!r}")
        if not self.time_step > 0:
            raise ValueError(f"time_step must be positive, got {self.time_step!r}")
        tps = self.ticks_per_second
        if tps < 1 or abs(tps * self.time_step - 1.0) > _TICK_RATE_TOLERANCE:
            raise ValueError(
                f"time_step must divide one second evenly, got {self.time_step!r}"
            )
        if self.d is not None and not self.d >= 1:
            raise ValueError(f"d must be >= 1, got {self.d!r}")
        if self.policy is not None and self.policy not in POLICIES:
            raise ValueError(
                f"unknown policy {self.policy!r}; expected one of {', '.join(POLICIES)}"
            )
        if self.metric is not None and self.metric not in METRIC_NAMES:
            raise ValueError(
                f"unknown metric {self.metric!r}; expected one of {', '.join(METRIC_NAMES)}"
            )
        if self.knowledge is not None and not 1 <= self.knowledge <= self.n_locations:
            raise ValueError(
                f"knowledge must be in 1..{self.n_locations}, got {self.knowledge!r}"
            )
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs!r}")
        if strict:
            if self.d is None:
                raise ValueError("d is required to run a scenario")
            if self.policy is None:
                raise ValueError("policy is required to run a scenario")
            if self.policy == "pattern":
                if self.metric is None:
                    raise ValueError("metric is required for the pattern policy")
                if self.knowledge is None:
                    raise ValueError("knowledge is required for the pattern policy")


@dataclass(frozen=True)
class RunStats:
    """Per-bundle outcomes of one run, in ticks, plus identifying parameters.

    Arrays are indexed by bundle id. delivered_tick/hops hold None for bundles
    still in custody at the end of the run. Delivered + undelivered = generated.
    """

    policy: str
    metric: str | None
    d: float
    knowledge: int | None
    seed: int
    n_nodes: int
    n_locations: int
    ticks_per_second: int
    generated: int
    source: tuple[int, ...]
    dest: tuple[int, ...]
    created_tick: tuple[int, ...]
    delivered_tick: tuple[int | None, ...]
    hops: tuple[int | None, ...]

    def delivered_ids(self) -> list[int]:
        return [b for b in range(self.generated) if self.delivered_tick[b] is not None]

    def delivered_count(self) -> int:
        return sum(1 for t in self.delivered_tick if t is not None)

    def delivery_ratio(self) -> float:
        return self.delivered_count() / self.generated if self.generated else 0.0

    def created_at_seconds(self, bundle: int) -> float:
        return self.created_tick[bundle] / self.ticks_per_second

    def delivered_at_seconds(self, bundle: int) -> float | None:
        tick = self.delivered_tick[bundle]
        return None if tick is None else tick / self.ticks_per_second

    def delays_seconds(self) -> list[float]:
        """Delay of every delivered bundle, in creation order."""
        tps = self.ticks_per_second
        return [
            (done - made) / tps
            for made, done in zip(self.created_tick, self.delivered_tick)
            if done is not None
        ]

    def delivered_hops(self) -> list[int]:
        return [h for h in self.hops if h is not None]


def derive_substreams(seed: int) -> tuple[random.Random, random.Random, random.Random]:
    """Independent named streams (mobility, traffic, policy) from one master seed.

    Seeding by tagged string keeps the streams decoupled: mobility and traffic
    draws never depend on which policy runs, so per-bundle comparisons across
    policies at a fixed seed are meaningful.
    """
    return (
        random.Random(f"{seed}:mobility"),
        random.Random(f"{seed}:traffic"),
        random.Random(f"{seed}:policy"),
    )


def _schedule_ticks(config: ScenarioConfig, rng: random.Random) -> list[tuple[int, int, int]]:
    """Traffic schedule on the tick grid, sorted by (tick, source, dest).

    One uniform first-send offset per ordered node pair, drawn in lexicographic
    (source, dest) order; sends repeat every packet_interval while the send time
    stays at or below traffic_horizon - packet_interval.
    """
    tps = config.ticks_per_second
    interval_ticks = round(config.packet_interval * tps)
    if interval_ticks < 1:
        raise ValueError("packet_interval is below one tick")
    last_allowed = round(config.traffic_horizon * tps) - interval_ticks
    events: list[tuple[int, int, int]] = []
    for src in range(config.n_nodes):
        for dst in range(config.n_nodes):
            if src == dst:
                continue
            first = int(rng.random() * config.packet_interval * tps)
            for tick in range(first, last_allowed + 1, interval_ticks):
                events.append((tick, src, dst))
    events.sort()
    return events


def traffic_schedule(
    config: ScenarioConfig, rng: random.Random
) -> list[tuple[float, int, int]]:
    """Bundle creation events as (time in seconds, source, destination)."""
    config.validate(strict=False)
    tps = config.ticks_per_second
    return [(tick / tps, src, dst) for tick, src, dst in _schedule_ticks(config, rng)]


def _build_patterns(
    config: ScenarioConfig, mob_rng: random.Random
) -> tuple[Pattern, ...]:
    """One pattern per node: a fresh rank permutation each, in node order."""
    assert config.d is not None
    return tuple(
        build_pattern(config.d, random_rank_assignment(config.n_locations, mob_rng))
        for _ in range(config.n_nodes)
    )


# --- policy state ---------------------------------------------------------
#
# Each policy keeps custody grouped by destination: held[node] maps a
# destination id to the set of bundle ids that node is carrying toward it.
# Between events every location is at a policy fixpoint, which is what lets
# the per-event handlers below touch only the state an arrival or a creation
# can actually affect; the naive alternative (re-running the full decision
# procedure at the location until nothing changes) is what the handlers are
# tested against.


class _PolicyState:
    def __init__(self, n_nodes: int, dest: Sequence[int]) -> None:
        self.dest = dest
        self.held: list[dict[int, set[int]]] = [dict() for _ in range(n_nodes)]
        self.hops: dict[int, int] = {}
        self.delivered_tick: dict[int, int] = {}
        self.final_hops: dict[int, int] = {}

    def add_bundle(self, bundle: int, source: int) -> None:
        # custody insertion happens inside pass_at so immediate delivery skips it
        self.hops[bundle] = 0

    def _deliver_group(self, bundles: set[int], tick: int) -> None:
        for b in bundles:
            self.delivered_tick[b] = tick
            self.final_hops[b] = self.hops.pop(b) + 1

    def _deliver_new(self, bundle: int, tick: int) -> None:
        self.delivered_tick[bundle] = tick
        self.final_hops[bundle] = self.hops.pop(bundle) + 1


class _OpportunisticState(_PolicyState):
    """Hold until the destination is met; deliveries are the only transmissions."""

    def pass_at(
        self,
        occupants: set[int],
        arrivals: list[int],
        created: list[tuple[int, int]],
        tick: int,
    ) -> None:
        held = self.held
        for a in arrivals:
            for n in occupants:
                if n != a:
                    group = held[n].pop(a, None)
                    if group:
                        self._deliver_group(group, tick)
            mine = held[a]
            for t in [t for t in mine if t in occupants]:
                self._deliver_group(mine.pop(t), tick)
        for bundle, source in created:
            t = self.dest[bundle]
            if t in occupants:
                self._deliver_new(bundle, tick)
            else:
                self.held[source].setdefault(t, set()).add(bundle)


class _RandomState(_PolicyState):
    """Blind custody walk driven by arrival events.

    An arrival wakes the whole location: resident custodians each offer the
    bundles they were resting with to one occupant drawn uniformly at random,
    and the arrivals then offer everything they hold - carried in and just
    received alike. The one piece of memory is each bundle's previous
    custodian, which is excluded from the draw whenever another receiver
    exists, so custody never bounces straight back.

    Offer order is part of the replay contract: freshly created bundles in
    creation order, then resting custodians in ascending node id, then
    arrivals in ascending node id, each node offering its bundles in
    ascending bundle id; one rng draw per offer that has a receiver.
    """

    def __init__(self, n_nodes: int, dest: Sequence[int], rng: random.Random) -> None:
        super().__init__(n_nodes, dest)
        self.rng = rng
        self.came_from: dict[int, int] = {}

    def _offer(self, bundle: int, custodian: int, occ_sorted: list[int]) -> None:
        eligible = [n for n in occ_sorted if n != custodian]
        back = self.came_from.get(bundle)
        if back is not None and back in eligible and len(eligible) > 1:
            eligible.remove(back)
        if not eligible:
            return
        receiver = eligible[self.rng.randrange(len(eligible))]
        t = self.dest[bundle]
        group = self.held[custodian][t]
        group.discard(bundle)
        if not group:
            del self.held[custodian][t]
        self.held[receiver].setdefault(t, set()).add(bundle)
        self.hops[bundle] += 1
        self.came_from[bundle] = custodian

    def pass_at(
        self,
        occupants: set[int],
        arrivals: list[int],
        created: list[tuple[int, int]],
        tick: int,
    ) -> None:
        held = self.held
        dest = self.dest
        # Deliveries: an arrival either brings bundles to a waiting destination
        # or is itself the destination of resting bundles. Resting bundles whose
        # destination already rested here were delivered when they first met.
        for a in arrivals:
            for n in occupants:
                if n != a:
                    group = held[n].pop(a, None)
                    if group:
                        self._deliver_group(group, tick)
            mine = held[a]
            for t in [t for t in mine if t in occupants]:
                self._deliver_group(mine.pop(t), tick)
        occ_sorted = sorted(occupants)
        for bundle, source in created:
            if dest[bundle] in occupants:
                self._deliver_new(bundle, tick)
            else:
                held[source].setdefault(dest[bundle], set()).add(bundle)
                self._offer(bundle, source, occ_sorted)
        if not arrivals:
            return
        arrived = set(arrivals)
        # Both phases work off a snapshot: a bundle handed around mid-phase is
        # not offered twice, and everything an arrival picks up in phase one
        # goes back into play in phase two.
        phase1 = [
            (b, n)
            for n in occ_sorted
            if n not in arrived
            for b in sorted(x for group in held[n].values() for x in group)
        ]
        for bundle, custodian in phase1:
            self._offer(bundle, custodian, occ_sorted)
        phase2 = [
            (b, a)
            for a in sorted(arrived)
            for b in sorted(x for group in held[a].values() for x in group)
        ]
        for bundle, custodian in phase2:
            self._offer(bundle, custodian, occ_sorted)


class _EpidemicState:
    """Flood on contact: colocated nodes exchange all copies they lack.

    copies[node] maps bundle id -> handling count of that node's copy. The
    source's own copy starts at 1 (taking the bundle in counts as its first
    handling) and every copy gained at a contact counts one more than the best
    colocated holder, the creation-instant spread included. A delivered
    bundle's route length is its destination copy's count. Colocated nodes
    always hold identical live key sets (they just exchanged), which is what
    lets an arrival be handled by diffing against one resident. A delivered
    bundle's copies are dropped everywhere at once so dead keys never pollute
    the diffs.
    """

    def __init__(self, n_nodes: int, dest: Sequence[int]) -> None:
        self.dest = dest
        self.copies: list[dict[int, int]] = [dict() for _ in range(n_nodes)]
        self.delivered_tick: dict[int, int] = {}
        self.final_hops: dict[int, int] = {}

    def add_bundle(self, bundle: int, source: int) -> None:
        self.copies[source][bundle] = 1

    def _deliver(self, bundle: int, tick: int, hops: int) -> None:
        self.delivered_tick[bundle] = tick
        self.final_hops[bundle] = hops
        for node_copies in self.copies:
            node_copies.pop(bundle, None)

    def pass_at(
        self,
        occupants: set[int],
        arrivals: list[int],
        created: list[tuple[int, int]],
        tick: int,
    ) -> None:
        copies = self.copies
        dest = self.dest
        if created and arrivals:
            # A same-tick creation leaves the creator one key ahead of its
            # neighbours, so neither uniformity shortcut below applies; let
            # the general merge absorb both the new bundle and the arrivals.
            if len(occupants) > 1:
                self._merge_all(occupants, tick)
            return
        if len(arrivals) > 1:
            # several nodes arriving at once, with or without residents
            self._merge_all(occupants, tick)
            return
        if arrivals:
            residents = occupants.difference(arrivals)
            if not residents:
                return
            a = arrivals[0]
            rep = next(iter(residents))
            mine = copies[a]
            theirs = copies[rep]
            diff_in = sorted(b for b in mine if b not in theirs)
            diff_out = sorted(b for b in theirs if b not in mine)
            for b in diff_in:
                h = mine[b] + 1
                for r in residents:
                    copies[r][b] = h
                if dest[b] in occupants:
                    self._deliver(b, tick, h)
            for b in diff_out:
                h = min(copies[r][b] for r in residents) + 1
                mine[b] = h
                if dest[b] == a:
                    self._deliver(b, tick, h)
            return
        for bundle, source in created:
            t = dest[bundle]
            for n in occupants:
                if n != source:
                    copies[n][bundle] = 2
            if t in occupants:
                self._deliver(bundle, tick, 2)

    def _merge_all(self, occupants: set[int], tick: int) -> None:
        # Rare case: several nodes arrive at one location in the same tick.
        copies = self.copies
        dest = self.dest
        occ = sorted(occupants)
        union: set[int] = set()
        for n in occ:
            union.update(copies[n])
        for b in sorted(union):
            holders = [n for n in occ if b in copies[n]]
            if len(holders) == len(occ):
                continue
            h = min(copies[n][b] for n in holders) + 1
            for n in occ:
                if b not in copies[n]:
                    copies[n][b] = h
            if dest[b] in occupants and dest[b] not in holders:
                self._deliver(b, tick, h)


class _PatternState(_PolicyState):
    """Greedy forwarding toward the destination's known mobility pattern.

    key[n][t] is node n's similarity to destination t, oriented so larger is
    always better; a custody group moves only to a strictly better candidate
    (ties to the lowest node id). Between events no colocated node is strictly
    better than any group's custodian, so an arrival only needs (a) a full
    choice for the groups it carries and (b) a single comparison against each
    resident group. Strict improvement means a bundle is never offered back
    to a node it already traversed: its past custodians all score worse.
    """

    def __init__(
        self,
        n_nodes: int,
        dest: Sequence[int],
        key: Sequence[Sequence[float]],
    ) -> None:
        super().__init__(n_nodes, dest)
        self.key = key

    def _move(self, giver: int, taker: int, t: int, group: set[int]) -> None:
        del self.held[giver][t]
        existing = self.held[taker].get(t)
        if existing is None:
            self.held[taker][t] = group
        else:
            existing.update(group)
        hops = self.hops
        for b in group:
            hops[b] += 1

    def _best_candidate(self, occ_sorted: list[int], custodian: int, t: int) -> int:
        key = self.key
        best = custodian
        best_key = key[custodian][t]
        for x in occ_sorted:
            if x != custodian and key[x][t] > best_key:
                best = x
                best_key = key[x][t]
        return best

    def pass_at(
        self,
        occupants: set[int],
        arrivals: list[int],
        created: list[tuple[int, int]],
        tick: int,
    ) -> None:
        held = self.held
        key = self.key
        occ_sorted = sorted(occupants)
        if len(arrivals) > 1:
            self._full_pass(occupants, occ_sorted, tick)
        elif arrivals:
            a = arrivals[0]
            for n in occupants:
                if n != a:
                    group = held[n].pop(a, None)
                    if group:
                        self._deliver_group(group, tick)
            mine = held[a]
            for t in [t for t in mine if t in occupants]:
                self._deliver_group(mine.pop(t), tick)
            for t in list(mine):
                best = self._best_candidate(occ_sorted, a, t)
                if best != a:
                    self._move(a, best, t, mine[t])
            key_a = key[a]
            for n in occ_sorted:
                if n == a:
                    continue
                key_n = key[n]
                moving = [t for t in held[n] if key_a[t] > key_n[t]]
                for t in moving:
                    self._move(n, a, t, held[n][t])
        for bundle, source in created:
            t = self.dest[bundle]
            if t in occupants:
                self._deliver_new(bundle, tick)
                continue
            groups = held[source]
            if t in groups:
                groups[t].add(bundle)  # rests with the already-placed group
                continue
            groups[t] = {bundle}
            best = self._best_candidate(occ_sorted, source, t)
            if best != source:
                self._move(source, best, t, groups[t])

    def _full_pass(self, occupants: set[int], occ_sorted: list[int], tick: int) -> None:
        held = self.held
        for n in occ_sorted:
            mine = held[n]
            for t in [t for t in mine if t in occupants]:
                self._deliver_group(mine.pop(t), tick)
        moves: list[tuple[int, int, int, set[int]]] = []
        for n in occ_sorted:
            for t, group in held[n].items():
                best = self._best_candidate(occ_sorted, n, t)
                if best != n:
                    moves.append((n, best, t, group))
        for giver, taker, t, group in moves:
            self._move(giver, taker, t, group)


def _make_policy_state(
    config: ScenarioConfig,
    dest: Sequence[int],
    patterns: Sequence[Pattern],
    policy_rng: random.Random,
):
    if config.policy == "epidemic":
        return _EpidemicState(config.n_nodes, dest)
    if config.policy == "opportunistic":
        return _OpportunisticState(config.n_nodes, dest)
    if config.policy == "random":
        return _RandomState(config.n_nodes, dest, policy_rng)
    assert config.policy == "pattern"
    assert config.metric is not None and config.knowledge is not None
    if config.knowledge >= config.n_locations:
        oracle = KnowledgeOracle.full(patterns)
    else:
        oracle = KnowledgeOracle.truncated(patterns, config.knowledge)
    metric = MetricKind(config.metric, config.delta)
    sign = 1.0 if metric.higher_is_better else -1.0
    key = [
        [
            sign * metric.evaluate(*oracle.projection(n, t))
            for t in range(config.n_nodes)
        ]
        for n in range(config.n_nodes)
    ]
    return _PatternState(config.n_nodes, dest, key)


def run(
    config: ScenarioConfig, *, patterns: Sequence[Pattern] | None = None
) -> RunStats:
    """Simulate one run and return its per-bundle outcomes.

    Deterministic given (config, config.seed). The rng draw order is part of
    the contract: per node in id order, a rank permutation; then per node in id
    order, the initial location and initial rest; then per move event, the new
    location and the next rest; traffic offsets are drawn per ordered (source,
    dest) pair lexicographically from a separate stream. `patterns` overrides
    the generated patterns (rank draws are skipped entirely) for pinned
    micro-scenarios.
    """
    config.validate(strict=True)
    mob_rng, traffic_rng, policy_rng = derive_substreams(config.seed)
    if patterns is None:
        node_patterns = _build_patterns(config, mob_rng)
    else:
        if len(patterns) != config.n_nodes:
            raise ValueError(
                f"need {config.n_nodes} patterns, got {len(patterns)}"
            )
        if any(len(p) != config.n_locations for p in patterns):
            raise ValueError("pattern length must equal n_locations")
        node_patterns = tuple(tuple(p) for p in patterns)

    tps = config.ticks_per_second
    duration_ticks = round(config.duration * tps)
    samplers = [LocationSampler(p) for p in node_patterns]
    loc_of: list[int] = []
    move_heap: list[tuple[int, int]] = []
    for n in range(config.n_nodes):
        loc_of.append(samplers[n].draw(mob_rng))
        rest = sample_rest_time(config.t_min, config.t_max, mob_rng)
        move_heap.append((max(1, round(rest * tps)), n))
    heapq.heapify(move_heap)
    occupants: list[set[int]] = [set() for _ in range(config.n_locations)]
    for n, loc in enumerate(loc_of):
        occupants[loc].add(n)

    traffic = _schedule_ticks(config, traffic_rng)
    generated = len(traffic)
    src = [s for _, s, _ in traffic]
    dst = [t for _, _, t in traffic]
    created = [tick for tick, _, _ in traffic]

    state = _make_policy_state(config, dst, node_patterns, policy_rng)

    t_min, t_max = config.t_min, config.t_max
    ti = 0
    heappush, heappop = heapq.heappush, heapq.heappop
    while True:
        next_tick = move_heap[0][0]
        if ti < generated and created[ti] < next_tick:
            next_tick = created[ti]
        if next_tick > duration_ticks:
            break
        arrivals_at: dict[int, list[int]] = {}
        while move_heap and move_heap[0][0] == next_tick:
            _, n = heappop(move_heap)
            new_loc = samplers[n].draw(mob_rng)
            rest = sample_rest_time(t_min, t_max, mob_rng)
            heappush(move_heap, (next_tick + max(1, round(rest * tps)), n))
            occupants[loc_of[n]].discard(n)
            occupants[new_loc].add(n)
            loc_of[n] = new_loc
            arrivals_at.setdefault(new_loc, []).append(n)
        created_at: dict[int, list[tuple[int, int]]] = {}
        while ti < generated and created[ti] == next_tick:
            s = src[ti]
            state.add_bundle(ti, s)
            created_at.setdefault(loc_of[s], []).append((ti, s))
            ti += 1
        if arrivals_at or created_at:
            for loc in sorted(arrivals_at.keys() | created_at.keys()):
                state.pass_at(
                    occupants[loc],
                    arrivals_at.get(loc, []),
                    created_at.get(loc, []),
                    next_tick,
                )

    delivered = state.delivered_tick
    final_hops = state.final_hops
    return RunStats(
        policy=config.policy or "",
        metric=config.metric if config.policy == "pattern" else None,
        d=float(config.d or 0.0),
        knowledge=config.knowledge if config.policy == "pattern" else None,
        seed=config.seed,
        n_nodes=config.n_nodes,
        n_locations=config.n_locations,
        ticks_per_second=tps,
        generated=generated,
        source=tuple(src),
        dest=tuple(dst),
        created_tick=tuple(created),
        delivered_tick=tuple(delivered.get(b) for b in range(generated)),
        hops=tuple(final_hops.get(b) for b in range(generated)),
    )


def expand_runs(config: ScenarioConfig) -> list[ScenarioConfig]:
    """The `runs` single-run configs an experiment spans: seeds seed..seed+runs-1."""
    return [replace(config, seed=config.seed + i, runs=1) for i in range(config.runs)]


def run_matrix(
    configs: Sequence[ScenarioConfig],
    seeds: Sequence[int] | None = None,
    jobs: int = 1,
) -> list[RunStats]:
    """Run every config (crossed with `seeds` when given) and collect results.

    Runs are independent; with jobs > 1 they execute in a process pool. Result
    order always matches the task order regardless of jobs.
    """
    if seeds is None:
        tasks = list(configs)
    else:
        tasks = [replace(c, seed=s) for c in configs for s in seeds]
    for c in tasks:
        c.validate(strict=True)
    if jobs <= 1 or len(tasks) <= 1:
        return [run(c) for c in tasks]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, tasks))


# --- record files ----------------------------------------------------------

_RECORD_HEADER = "run,policy,metric,d,l,bundle,source,dest,created_at,delivered_at,hops"


def _time_decimals(ticks_per_second: int) -> int:
    """Digits after the point needed to render the tick grid exactly (decimal rates)."""
    return len(str(ticks_per_second - 1)) if ticks_per_second > 1 else 0


def records_text(stats: RunStats) -> str:
    """The per-run record file body: one row per bundle, ascending bundle id.

    Times are seconds on the tick grid; delivered_at and hops stay empty for
    bundles still in custody at the end. The rendering is byte-stable for a
    fixed (config, seed).
    """
    tps = stats.ticks_per_second
    dec = _time_decimals(tps)
    metric = stats.metric if stats.metric is not None else "-"
    knowledge = str(stats.knowledge) if stats.knowledge is not None else "-"
    prefix = f"{stats.seed},{stats.policy},{metric},{stats.d!r},{knowledge},"
    lines = [_RECORD_HEADER]
    for b in range(stats.generated):
        done = stats.delivered_tick[b]
        delivered = "" if done is None else f"{done / tps:.{dec}f}"
        hops = "" if stats.hops[b] is None else str(stats.hops[b])
        lines.append(
            f"{prefix}{b},{stats.source[b]},{stats.dest[b]},"
            f"{stats.created_tick[b] / tps:.{dec}f},{delivered},{hops}"
        )
    return "\n".join(lines) + "\n"


def write_records(stats: RunStats, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(records_text(stats))


def read_records(path) -> RunStats:
    """Rebuild run results from a record file.

    The tick rate is inferred from the decimal places of the time columns, so
    tick-exact comparisons (delay histograms) work on re-read data. Fields a
    record file does not carry (node/location counts) are zero.
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        if header != _RECORD_HEADER:
            raise ValueError(f"not a record file (unexpected header): {path}")
        seed = 0
        policy, metric, knowledge = "", None, None
        d = 0.0
        source: list[int] = []
        dest: list[int] = []
        created: list[int] = []
        delivered: list[int | None] = []
        hops: list[int | None] = []
        tps = 1
        first = True
        for line in fh:
            parts = line.rstrip("\n").split(",")
            if len(parts) != 11:
                raise ValueError(f"malformed record row in {path}: {line!r}")
            if first:
                first = False
                seed = int(parts[0])
                policy = parts[1]
                metric = None if parts[2] == "-" else parts[2]
                d = float(parts[3])
                knowledge = None if parts[4] == "-" else int(parts[4])
                _, frac, *_ = parts[8].split(".") + [""]
                tps = 10 ** len(frac)
            source.append(int(parts[6]))
            dest.append(int(parts[7]))
            created.append(round(float(parts[8]) * tps))
            delivered.append(None if parts[9] == "" else round(float(parts[9]) * tps))
            hops.append(None if parts[10] == "" else int(parts[10]))
    return RunStats(
        policy=policy,
        metric=metric,
        d=d,
        knowledge=knowledge,
        seed=seed,
        n_nodes=0,
        n_locations=0,
        ticks_per_second=tps,
        generated=len(source),
        source=tuple(source),
        dest=tuple(dest),
        created_tick=tuple(created),
        delivered_tick=tuple(delivered),
        hops=tuple(hops),
    )
