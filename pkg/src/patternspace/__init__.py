"""Delay-tolerant routing simulator driven by mobility-pattern similarity.

Nodes move between a fixed set of locations according to individual power-law
location preferences; bundles are forwarded on colocation by one of several
policies, including greedy forwarding toward the node whose known mobility
pattern is most similar to the destination's.
"""

from .analysis import (
    ConfidenceInterval,
    DelayHistogram,
    EvolutionSeries,
    TableRow,
    aggregate_table,
    delay_evolution,
    delay_vs_epidemic,
    format_evolution,
    format_histogram,
    format_table,
    mean_delay,
    mean_route_length,
    student_t_ci,
)
from .engine import (
    POLICIES,
    RunStats,
    ScenarioConfig,
    derive_substreams,
    expand_runs,
    read_records,
    records_text,
    run,
    run_matrix,
    traffic_schedule,
    write_records,
)
from .metrics import (
    DEFAULT_MATCHING_DELTA,
    METRIC_NAMES,
    MetricKind,
    Score,
    better,
    canberra_distance,
    cosine_similarity,
    euclidean_distance,
    matching_similarity,
)
from .mobility import (
    LocationSampler,
    NodeState,
    advance_node,
    colocated_nodes,
    sample_next_location,
    sample_rest_time,
)
from .patterns import (
    Pattern,
    build_pattern,
    densify,
    normalization_constant,
    random_rank_assignment,
    truncate_pattern,
)
from .routing import (
    Bundle,
    ContactView,
    KnowledgeOracle,
    TransferAction,
    epidemic_decide,
    opportunistic_decide,
    pattern_greedy_decide,
    random_decide,
    score_to_destination,
)

__version__ = "0.1.0"
