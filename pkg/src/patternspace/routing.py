"""Forwarding policies, expressed as pure decision procedures over one location's contacts.

Each decide function inspects a ContactView (who is colocated, who holds what)
and returns the actions the policy takes at that instant: deliver actions
first in ascending bundle id, then transfers in the order the policy decides
them. That ordering, and the rng consumption order inside random_decide, are
part of the contract so that a replay produces identical traces.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .metrics import MetricKind, Score, better
from .patterns import Pattern, truncate_pattern

DELIVER = "deliver"
FORWARD = "forward"
REPLICATE = "replicate"


@dataclass(frozen=True)
class Bundle:
    """A unit of traffic; custody/copy placement lives outside, in the world state."""

    bundle_id: int
    source: int
    destination: int
    created_at: float
    hops: int = 0
    delivered_at: float | None = None

    def __post_init__(self) -> None:
        if self.source == self.destination:
            raise ValueError("bundle source and destination must differ")


@dataclass(frozen=True)
class TransferAction:
    """One policy action: move/copy bundle `bundle_id` from `from_node` to `to_node`."""

    bundle_id: int
    from_node: int
    to_node: int
    kind: str

    def __post_init__(self) -> None:
        if self.from_node == self.to_node:
            raise ValueError("transfer endpoints must differ")
        if self.kind not in (DELIVER, FORWARD, REPLICATE):
            raise ValueError(f"unknown action kind {self.kind!r}")


@dataclass(frozen=True)
class ContactView:
    """What a policy may see at one location when an event wakes it.

    held maps node -> {bundle id -> destination}. For single-custody policies it
    lists each custodian's bundles; for replicating policies it lists copies, and
    copy_hops carries how many handlings each copy accumulated since origination.
    arrivals names the occupants whose move triggered this wake-up, fresh the
    bundles created at this instant (already placed with their sources in held),
    and previous_custodian each bundle's last holder before the current one.
    """

    nodes: tuple[int, ...]
    held: Mapping[int, Mapping[int, int]]
    copy_hops: Mapping[int, Mapping[int, int]] | None = None
    arrivals: tuple[int, ...] = ()
    fresh: tuple[int, ...] = ()
    previous_custodian: Mapping[int, int] | None = None

    def occupants(self) -> frozenset[int]:
        return frozenset(self.nodes)


def _deliveries(view: ContactView) -> tuple[list[TransferAction], set[int]]:
    """Deliver actions for every held bundle whose destination is present."""
    present = view.occupants()
    found: list[tuple[int, int, int]] = []
    for node in sorted(view.nodes):
        for bundle_id, dest in view.held.get(node, {}).items():
            if dest in present and dest != node:
                found.append((bundle_id, node, dest))
    found.sort()
    actions = [TransferAction(b, src, dst, DELIVER) for b, src, dst in found]
    return actions, {b for b, _, _ in found}


def epidemic_decide(view: ContactView) -> list[TransferAction]:
    """Flood: every colocated node ends up with a copy of every bundle present.

    The copy given to a node is attributed to the colocated holder whose own
    copy took the fewest transmissions (ties to the lowest node id), so hop
    counts measure the shortest replication chain. A copy reaching its
    destination is a delivery instead of a plain replication.
    """
    if view.copy_hops is None:
        raise ValueError("epidemic_decide needs copy_hops in the view")
    present = view.occupants()
    holders: dict[int, list[int]] = {}
    for node in view.nodes:
        for bundle_id in view.held.get(node, {}):
            holders.setdefault(bundle_id, []).append(node)
    actions: list[TransferAction] = []
    replications: list[TransferAction] = []
    for bundle_id in sorted(holders):
        have = holders[bundle_id]
        dest = view.held[have[0]][bundle_id]
        lacking = sorted(present - set(have))
        if not lacking:
            continue
        giver = min(have, key=lambda n: (view.copy_hops[n][bundle_id], n))
        for receiver in lacking:
            kind = DELIVER if receiver == dest else REPLICATE
            action = TransferAction(bundle_id, giver, receiver, kind)
            (actions if kind == DELIVER else replications).append(action)
    actions.sort(key=lambda a: a.bundle_id)
    replications.sort(key=lambda a: (a.bundle_id, a.to_node))
    return actions + replications


def opportunistic_decide(view: ContactView) -> list[TransferAction]:
    """Hold until the destination itself is met; the only transmission delivers."""
    actions, _ = _deliveries(view)
    return actions


def random_decide(view: ContactView, rng: random.Random) -> list[TransferAction]:
    """Deliver what reached its destination, then shuffle custody blindly.

    An arrival wakes the location: fresh bundles are offered by their sources,
    resident custodians offer the bundles they were resting with, and the
    arrivals then offer everything they hold, the bundles just received
    included. Each offer hands the bundle to one occupant drawn uniformly from
    the others, excluding the bundle's previous custodian while an alternative
    exists. A wake-up without arrivals offers only the fresh bundles. Offers
    run in a fixed order (fresh bundles, then resting custodians in ascending
    node id, then arrivals, each node's bundles in ascending id), consuming
    one rng draw per offer that has a receiver.
    """
    actions, delivered = _deliveries(view)
    holder: dict[int, int] = {}
    for node in view.nodes:
        for bundle_id in view.held.get(node, {}):
            if bundle_id not in delivered:
                holder[bundle_id] = node
    came_from = dict(view.previous_custodian or {})
    occupants = sorted(view.nodes)

    def offer(bundle_id: int) -> None:
        custodian = holder[bundle_id]
        eligible = [n for n in occupants if n != custodian]
        back = came_from.get(bundle_id)
        if back is not None and back in eligible and len(eligible) > 1:
            eligible.remove(back)
        if not eligible:
            return
        receiver = eligible[rng.randrange(len(eligible))]
        actions.append(TransferAction(bundle_id, custodian, receiver, FORWARD))
        holder[bundle_id] = receiver
        came_from[bundle_id] = custodian

    arrived = set(view.arrivals)

    def snapshot(of_arrivals: bool) -> list[int]:
        # (node, bundle) ascending; a bundle moved mid-phase is not re-offered
        return [
            b
            for n, b in sorted((n, b) for b, n in holder.items())
            if (n in arrived) == of_arrivals
        ]

    for bundle_id in sorted(view.fresh):
        if bundle_id in holder:
            offer(bundle_id)
    if arrived:
        for bundle_id in snapshot(of_arrivals=False):
            offer(bundle_id)
        for bundle_id in snapshot(of_arrivals=True):
            offer(bundle_id)
    return actions


@dataclass(frozen=True)
class KnowledgeOracle:
    """The view of node mobility patterns that forwarding decisions consult.

    Every node measures its own movement, so its own full pattern is always
    available. What circulates about a node is `advertised[node]`: the set of
    locations whose probabilities that node shares, which is every location
    under full knowledge and only the top-l preferred locations when
    dissemination is limited. Similarity toward a destination is judged on the
    destination's advertised locations alone, each side contributing its true
    probabilities there; the unadvertised remainder is simply unknown and
    stays out of the comparison.
    """

    patterns: tuple[Pattern, ...]
    advertised: tuple[tuple[int, ...], ...]

    @classmethod
    def full(cls, patterns: Sequence[Pattern]) -> "KnowledgeOracle":
        kept = tuple(tuple(p) for p in patterns)
        return cls(kept, tuple(tuple(range(len(p))) for p in kept))

    @classmethod
    def truncated(cls, patterns: Sequence[Pattern], keep: int) -> "KnowledgeOracle":
        kept = tuple(tuple(p) for p in patterns)
        shared = tuple(tuple(sorted(truncate_pattern(p, keep))) for p in kept)
        return cls(kept, shared)

    def own(self, node: int) -> Pattern:
        if not 0 <= node < len(self.patterns):
            raise ValueError(f"no known pattern for node {node!r}")
        return self.patterns[node]

    def projection(self, node: int, dest: int) -> tuple[Pattern, Pattern]:
        """The comparison pair: both patterns restricted to dest's advertised set."""
        mine = self.own(node)
        theirs = self.own(dest)
        shared = self.advertised[dest]
        return tuple(mine[i] for i in shared), tuple(theirs[i] for i in shared)


def score_to_destination(
    node: int, dest: int, oracle: KnowledgeOracle, metric: MetricKind
) -> Score:
    """How similar node looks to the destination on what the destination shares."""
    return metric.score(*oracle.projection(node, dest))


def pattern_greedy_decide(
    view: ContactView,
    oracle: KnowledgeOracle,
    metric: MetricKind,
    rng: random.Random | None = None,
) -> list[TransferAction]:
    """Forward each bundle to the colocated node most similar to its destination.

    A transfer happens only on strict improvement over the current custodian's
    own similarity; ties among equally-best candidates break to the lowest node
    id. Strict improvement means a bundle never revisits a past custodian, so
    no handled-before guard is needed. rng is accepted for signature uniformity
    and never used.
    """
    del rng
    actions, delivered = _deliveries(view)
    pending: list[tuple[int, int, int]] = []
    for node in sorted(view.nodes):
        for bundle_id, dest in view.held.get(node, {}).items():
            if bundle_id not in delivered:
                pending.append((bundle_id, node, dest))
    pending.sort()
    for bundle_id, custodian, dest in pending:
        best_node = custodian
        best_score = score_to_destination(custodian, dest, oracle, metric)
        for candidate in sorted(view.nodes):
            if candidate == custodian:
                continue
            cand_score = score_to_destination(candidate, dest, oracle, metric)
            if better(cand_score, best_score):
                best_node = candidate
                best_score = cand_score
        if best_node != custodian:
            actions.append(TransferAction(bundle_id, custodian, best_node, FORWARD))
    return actions
