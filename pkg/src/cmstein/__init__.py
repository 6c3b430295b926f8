"""Local statistics of the configuration model: sampling, exploration,
Stein couplings, explicit normal-approximation bounds and Monte Carlo
checks of giant-component fluctuations."""

from .bounds import BoundInputs, gamma_bound, intersection_bounds, kv_tail_bound, theorem1_bound
from .config import Configuration, restrict, sample_configuration
from .degseq import (
    DegreeDistribution,
    DegreeSequence,
    check_conditions,
    empirical_distribution,
    moment,
    sample_degree_sequence,
    size_bias,
    threshold_margin,
    tv_distance,
    validate,
)
from .explore import components, explore_many, explore_truncated
from .mc import ExperimentConfig, run_clt_experiment, variance_scaling_study, wasserstein_to_std_normal
from .stats import (
    LocalStatistic,
    capped_component_size,
    degree_indicator,
    evaluate_statistic,
    small_component_indicator,
)
from .stein import coupling_draw, estimate_variance_identity, rebuild_independent

__version__ = "0.1.0"
