"""Localization games on graphs and binary matrices.

Resolving sets and metric dimension, the adaptive distance-query game and
its MAX-GAIN heuristic, Erdos-Renyi bound calculators, Bernoulli-matrix
warm-ups, and a deterministic Monte Carlo harness.
"""

from .ermodel import (
    BoundPrediction,
    ErParameters,
    bound_prediction,
    er_parameters,
    predicted_level_fractions,
    sample_gnp,
)
from .experiments import (
    TRIAL_CSV_FIELDS,
    ExperimentConfig,
    ExperimentError,
    LevelFractionRow,
    SummaryRow,
    ThresholdRow,
    TrialRecord,
    derive_trial_seed,
    run_experiment,
    run_level_fractions,
    run_md_smd_sweep,
    run_threshold_sweep,
    summary_path_for,
    write_csv,
)
from .game import (
    AdversaryPolicy,
    GameState,
    Player1Policy,
    Transcript,
    TranscriptStep,
    adversary_answer,
    distance_partition,
    f_separator_exists,
    initial_state,
    max_gain_query,
    play_game,
    reducer_score,
    smd_exact,
    smd_maxgain_worstcase,
)
from .graphs import (
    UNREACHABLE,
    DisconnectedGraphError,
    DistanceMatrix,
    Graph,
    GraphFormatError,
    bfs_distances,
    diameter,
    distance_matrix,
    distances_from_sources,
    is_connected,
    level_set,
    read_edge_list,
    write_edge_list,
)
from .localization import (
    CapExceededError,
    QuerySet,
    candidate_targets,
    is_resolving,
    md_exact,
    md_greedy,
    observation_vector,
)
from .matrices import (
    BinaryMatrix,
    CollisionStats,
    MatrixFormatError,
    UndefinedQueryComplexityError,
    collision_stats,
    columns_pairwise_distinct,
    gamma_qc_sqc,
    qc_exact,
    qc_greedy,
    qc_threshold,
    read_matrix,
    sample_bernoulli,
    sqc_exact,
    sqc_maxgain_worstcase,
    sqc_play,
    write_matrix,
)

__version__ = "0.1.0"
