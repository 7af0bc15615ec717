"""Steady-state information accuracy in timeliness-based gossip networks.

A fully-connected network of n nodes tracks an M-state CTMC source through
rate-limited source pushes and freshness-gated gossip.  The package computes
the steady-state accuracy metrics three independent ways: exact analytic
recursions (binary and general M), an exact lumped chain for two-node
networks, and an event-driven simulator, plus tooling to cross-validate them
and render the headline figures.
"""

from .binary import (
    BinaryAccuracyReport,
    BinaryFreshnessProfile,
    ModeTaggedPair,
    average_accuracy,
    boundary_fn,
    freshness_recursion,
    limit_accuracy,
    symmetric_accuracy,
    symmetric_freshness,
)
from .errors import GossipAccuracyError
from .markov import (
    GeneratorMatrix,
    NetworkParams,
    RateTriple,
    StationaryDistribution,
    generator_from_json,
    load_generator,
    rate_triple,
    solve_linear,
    stationary_distribution,
    validate_generator,
)
from .multistate import (
    BackwardProfile,
    JointStationary,
    backward_construct,
    build_out_component,
    build_push_component,
    build_src_component,
    conditional_content,
    joint_index,
    mode_tagged_accuracy,
    node_count_content,
)
from .oracle import (
    CompressedChain,
    CompressedState,
    OracleResult,
    build_compressed_chain,
    oracle_solve,
)
from .sim import (
    Estimate,
    SimConfig,
    SimEvent,
    SimReport,
    WorldState,
    batch_stderr,
    init_state,
    report_rows,
    run,
    sim_config_from_json,
    sim_config_to_json,
    step,
)
from .split import (
    FreshnessOccupancy,
    SplitReport,
    fresh_accurate_fraction,
    g_limits,
    g_recursion,
)
from .sweep import ComparisonRow, SweepSpec, max_abs_z, run_sweep

__version__ = "0.1.0"
