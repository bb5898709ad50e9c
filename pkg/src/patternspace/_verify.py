"""Self-check property suite behind the verify subcommand.

Each check raises AssertionError (or any exception) on failure; run_all turns
that into (name, passed, detail) tuples. The checks run on small instances in
seconds and are also reused by the test suite, so the CLI and pytest cannot
drift apart.
"""

from __future__ import annotations

import random
from dataclasses import replace

from . import analysis, engine
from .metrics import (
    MetricKind,
    canberra_distance,
    cosine_similarity,
    euclidean_distance,
    matching_similarity,
)
from .patterns import build_pattern, densify, random_rank_assignment, truncate_pattern
from .routing import (
    DELIVER,
    FORWARD,
    ContactView,
    KnowledgeOracle,
    TransferAction,
    pattern_greedy_decide,
)

NORMALIZATION_TOLERANCE = 1e-12
_PAIR_COUNT = 1000


def _random_pattern(rng: random.Random, n: int, d: float):
    return build_pattern(d, random_rank_assignment(n, rng))


def _random_vector_pair(rng: random.Random):
    """A pattern pair for metric checks; sometimes sparse so zero rules fire."""
    n = rng.choice((3, 5, 25))
    a = _random_pattern(rng, n, rng.choice((1, 1.1, 1.5, 2, 5)))
    b = _random_pattern(rng, n, rng.choice((1, 1.1, 1.5, 2, 5)))
    if rng.random() < 0.3:
        a = densify(truncate_pattern(a, rng.randrange(1, n + 1)), n)
    if rng.random() < 0.3:
        b = densify(truncate_pattern(b, rng.randrange(1, n + 1)), n)
    return a, b


def check_pattern_normalization() -> None:
    rng = random.Random(101)
    for d in (1, 1.1, 1.5, 2, 3, 10):
        for n in (1, 2, 5, 25, 100):
            ranks = random_rank_assignment(n, rng)
            p = build_pattern(d, ranks)
            total = sum(p)
            assert abs(total - 1.0) <= NORMALIZATION_TOLERANCE, (
                f"pattern sum off by {total - 1.0!r} for d={d}, n={n}"
            )
            assert all(x > 0 for x in p), f"non-positive entry for d={d}, n={n}"
            by_rank = sorted(range(n), key=lambda i: ranks[i])
            probs = [p[i] for i in by_rank]
            assert probs == sorted(probs, reverse=True), "probability not decreasing in rank"


def check_metric_symmetry_identity() -> None:
    rng = random.Random(102)
    for _ in range(_PAIR_COUNT):
        a, b = _random_vector_pair(rng)
        n = len(a)
        assert euclidean_distance(a, b) == euclidean_distance(b, a)
        assert canberra_distance(a, b) == canberra_distance(b, a)
        assert cosine_similarity(a, b) == cosine_similarity(b, a)
        assert matching_similarity(a, b) == matching_similarity(b, a)
        assert euclidean_distance(a, a) == 0.0
        assert canberra_distance(a, a) == 0.0
        assert cosine_similarity(a, a) == 1.0
        assert matching_similarity(a, a) == n


def check_canberra_bound() -> None:
    rng = random.Random(103)
    for _ in range(_PAIR_COUNT):
        a, b = _random_vector_pair(rng)
        value = canberra_distance(a, b)
        assert 0.0 <= value <= len(a), f"canberra {value!r} outside [0, {len(a)}]"


def check_matching_monotone_in_delta() -> None:
    rng = random.Random(104)
    deltas = (0.0, 1e-10, 2e-8, 1e-4, 1e-2, 0.5, 1.0)
    for _ in range(200):
        a, b = _random_vector_pair(rng)
        counts = [matching_similarity(a, b, delta) for delta in deltas]
        assert counts == sorted(counts), f"matching not monotone in delta: {counts}"
        assert counts[-1] == len(a), "delta covering the whole range must match all"


def check_distance_angle_order_agreement() -> None:
    """Equal-norm vectors: closer in L2 must mean a larger cosine, exactly.

    Patterns with the same d are rank permutations of one vector, so their
    norms agree and the two metrics induce the same candidate ordering; this
    must hold at float precision for full-knowledge decision equivalence.
    """
    rng = random.Random(105)
    for _ in range(_PAIR_COUNT):
        n = rng.choice((5, 25))
        d = rng.choice((1.1, 1.5, 2, 3))
        a = _random_pattern(rng, n, d)
        b = _random_pattern(rng, n, d)
        t = _random_pattern(rng, n, d)
        da, db = euclidean_distance(a, t), euclidean_distance(b, t)
        ca, cb = cosine_similarity(a, t), cosine_similarity(b, t)
        assert (da < db) == (ca > cb) and (da == db) == (ca == cb), (
            f"order disagreement: distances {da!r}/{db!r}, cosines {ca!r}/{cb!r}"
        )


def _brute_force_choice(
    nodes: list[int],
    custodian: int,
    dest: int,
    oracle: KnowledgeOracle,
    metric: MetricKind,
) -> int | None:
    """Exhaustive argbest: the strictly-better candidate, if any."""
    own = metric.evaluate(*oracle.projection(custodian, dest))
    scored = []
    for x in nodes:
        if x == custodian:
            continue
        value = metric.evaluate(*oracle.projection(x, dest))
        scored.append((value, x))
    if metric.higher_is_better:
        strictly_better = [(v, x) for v, x in scored if v > own]
        if not strictly_better:
            return None
        best_value = max(v for v, _ in strictly_better)
    else:
        strictly_better = [(v, x) for v, x in scored if v < own]
        if not strictly_better:
            return None
        best_value = min(v for v, _ in strictly_better)
    return min(x for v, x in strictly_better if v == best_value)


def check_greedy_matches_brute_force() -> None:
    rng = random.Random(106)
    n_nodes = 5
    patterns = [_random_pattern(rng, 5, 1.5) for _ in range(n_nodes)]
    oracles = {
        keep: (
            KnowledgeOracle.full(patterns)
            if keep == 5
            else KnowledgeOracle.truncated(patterns, keep)
        )
        for keep in (5, 2)
    }
    metrics = [MetricKind(name) for name in ("euclidean", "canberra", "angle", "matching")]
    for subset_bits in range(1, 2**n_nodes):
        nodes = [i for i in range(n_nodes) if subset_bits & (1 << i)]
        if len(nodes) < 2:
            continue
        for custodian in nodes:
            for dest in range(n_nodes):
                if dest == custodian:
                    continue
                for keep, oracle in oracles.items():
                    for metric in metrics:
                        view = ContactView(
                            nodes=tuple(nodes),
                            held={custodian: {0: dest}},
                        )
                        got = pattern_greedy_decide(view, oracle, metric)
                        if dest in nodes:
                            want = [TransferAction(0, custodian, dest, DELIVER)]
                        else:
                            choice = _brute_force_choice(
                                nodes, custodian, dest, oracle, metric
                            )
                            want = (
                                []
                                if choice is None
                                else [TransferAction(0, custodian, choice, FORWARD)]
                            )
                        assert got == want, (
                            f"greedy mismatch: nodes={nodes} custodian={custodian} "
                            f"dest={dest} keep={keep} metric={metric.name}: "
                            f"got {got}, want {want}"
                        )


_MICRO = engine.ScenarioConfig(
    n_nodes=5,
    n_locations=4,
    duration=600.0,
    traffic_horizon=120.0,
    packet_interval=30.0,
    d=1.5,
    seed=11,
    runs=1,
)


def check_epidemic_lower_bound_micro() -> None:
    epi = engine.run(replace(_MICRO, policy="epidemic"))
    rivals = [
        {"policy": "opportunistic"},
        {"policy": "random"},
        {"policy": "pattern", "metric": "euclidean", "knowledge": 4},
        {"policy": "pattern", "metric": "matching", "knowledge": 2},
    ]
    assert epi.delivered_count() > 0, "micro-scenario epidemic delivered nothing"
    for extra in rivals:
        other = engine.run(replace(_MICRO, **extra))
        for b in range(other.generated):
            ot, et = other.delivered_tick[b], epi.delivered_tick[b]
            if ot is not None:
                assert et is not None and et <= ot, (
                    f"epidemic later than {extra} on bundle {b}: {et} vs {ot}"
                )
        hist = analysis.delay_vs_epidemic(other, epi)
        assert all(b >= 0 for b in hist.counts), f"negative bins against {extra}"


def check_always_colocated_micro() -> None:
    base = engine.ScenarioConfig(
        n_nodes=2,
        n_locations=2,
        duration=200.0,
        traffic_horizon=60.0,
        packet_interval=30.0,
        d=1.5,
        seed=3,
        runs=1,
    )
    together = ((1.0, 0.0), (1.0, 0.0))
    # Direct delivery is one carry for opportunistic; epidemic counts the
    # origination too, so the destination's copy sits at two handlings.
    for policy, direct in (("epidemic", 2), ("opportunistic", 1)):
        stats = engine.run(
            replace(base, policy=policy),
            patterns=together,
        )
        assert stats.generated > 0
        assert stats.delivered_count() == stats.generated, f"{policy} left bundles"
        assert all(t == c for t, c in zip(stats.delivered_tick, stats.created_tick)), (
            f"{policy} delay not zero under permanent colocation"
        )
        assert all(h == direct for h in stats.hops), f"{policy} hops not {direct}"
    apart = ((1.0, 0.0), (0.0, 1.0))
    stats = engine.run(
        replace(base, policy="opportunistic"),
        patterns=apart,
    )
    assert stats.delivered_count() == 0, "disjoint nodes must never deliver"


def check_config_validation() -> None:
    cases = [
        ({"delta": -1e-9}, "delta"),
        ({"t_min": 20.0, "t_max": 10.0}, "t_min"),
        ({"d": 0.5}, "d must"),
        ({"policy": "flooding"}, "unknown policy"),
        ({"metric": "manhattan"}, "unknown metric"),
        ({"knowledge": 0}, "knowledge"),
        ({"time_step": 0.007}, "time_step"),
        ({"traffic_horizon": 9000.0}, "traffic_horizon"),
        ({"runs": 0}, "runs"),
    ]
    for overrides, needle in cases:
        cfg = engine.ScenarioConfig(**{"d": 1.5, "policy": "epidemic", **overrides})
        try:
            cfg.validate(strict=False)
        except ValueError as err:
            assert needle in str(err), f"message {err} lacks {needle!r}"
        else:
            raise AssertionError(f"config {overrides} was not rejected")
    incomplete = engine.ScenarioConfig(d=1.5, policy="pattern")
    try:
        incomplete.validate(strict=True)
    except ValueError as err:
        assert "metric" in str(err)
    else:
        raise AssertionError("pattern policy without metric was not rejected")


def check_record_determinism() -> None:
    cfg = replace(_MICRO, policy="random")
    first = engine.run(cfg)
    second = engine.run(cfg)
    assert first == second, "identical config and seed produced different results"
    assert engine.records_text(first) == engine.records_text(second)


CHECKS = (
    ("pattern-normalization", check_pattern_normalization),
    ("metric-symmetry-identity", check_metric_symmetry_identity),
    ("canberra-bound", check_canberra_bound),
    ("matching-monotone-in-delta", check_matching_monotone_in_delta),
    ("distance-angle-order-agreement", check_distance_angle_order_agreement),
    ("greedy-matches-brute-force", check_greedy_matches_brute_force),
    ("epidemic-lower-bound-micro", check_epidemic_lower_bound_micro),
    ("always-colocated-micro", check_always_colocated_micro),
    ("config-validation", check_config_validation),
    ("record-determinism", check_record_determinism),
)


def run_all() -> list[tuple[str, bool, str]]:
    results = []
    for name, func in CHECKS:
        try:
            func()
        except Exception as err:  # noqa: BLE001 - any failure is a finding
            results.append((name, False, f"{type(err).__name__}: {err}"))
        else:
            results.append((name, True, ""))
    return results
