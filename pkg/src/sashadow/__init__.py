"""MAP estimation for Gibbs point-process parameters by simulated annealing
on ABC Shadow dynamics.

The likelihood normalizing constant is never evaluated: the shadow
acceptance ratio only needs sufficient statistics of the data and of an
auxiliary pattern simulated at the current parameter.
"""
from ._backend import BACKEND
from .anneal import (
    AnnealSchedule,
    MapEstimate,
    RunConfig,
    TraceRecord,
    delta_at,
    proxy_score,
    run_multistart,
    run_sa,
    temperature_at,
)
from .models import DEFAULT_PRIOR, ModelError, PoissonModel, PriorBox, StraussModel
from .pattern import (
    UNIT_SQUARE,
    GridIndex,
    PatternError,
    Point,
    PointPattern,
    Window,
    count_close_pairs,
    count_close_pairs_bruteforce,
    read_pattern_csv,
    stat_delta_insert,
    stat_delta_remove,
    suff_stats,
    write_pattern_csv,
)
from .sampler import MhConfig, RngStream, mh_step, reference_samples, reference_stats, sample_auxiliary
from .shadow import (
    ShadowConfig,
    ShadowState,
    acceptance_probability,
    log_acceptance_probability,
    propose,
    sample_posterior,
    shadow_log_ratio,
    shadow_sweep,
)

__version__ = "0.1.0"
