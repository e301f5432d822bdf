"""Hierarchical Thompson sampling for clustered Gaussian bandits."""

from .core import (
    ArmSpec,
    BanditInstance,
    ClusterPartition,
    GapSummary,
    InstanceError,
    PosteriorState,
    compute_gaps,
    dump_instance,
    is_unimodal,
    load_instance,
    neighbors,
    posterior_sample,
    posterior_update,
    save_instance,
    validate_strong_dominance,
    validate_unimodality,
    validate_unique_optimum,
)
from .environments import (
    GaussianEnvironment,
    MmWaveScenario,
    build_mmwave_instance,
    build_portfolio_instance,
    path_loss_db,
    preset_instance,
    rss_mean_mw,
)
from .policies import POLICIES, TLP, TSCG, TSG, UCB1, UTSCG, Policy, make_policy
from .rng import RandomStream, child_seed
from .simulation import (
    BoundNotApplicable,
    ExperimentReport,
    Trajectory,
    optimal_rate,
    run_episode,
    run_experiment,
    theorem1_bound,
    theorem2_bound,
    theorem3_bound,
    theorem3_constant,
)

__version__ = "0.1.0"
