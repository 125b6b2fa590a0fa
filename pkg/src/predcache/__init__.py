"""Caching and task-system algorithms that consult predictions sparingly.

The package simulates cache eviction under several prediction regimes
(full cache-content predictions, next-arrival predictions, and
furthest-in-future oracles), provides the offline optimum and classical
baselines for comparison, and extends the same follow-or-recover idea to
general metrical task systems. A benchmark harness reproduces the
experimental protocol on public check-in and bike-trip datasets and on
synthetic traces.
"""

from .core import (
    INFINITY,
    CacheState,
    CostLedger,
    EagerPolicy,
    EvictionPolicy,
    LazifiedPolicy,
    NextArrivalIndex,
    PhaseTracker,
    RecencyTracker,
    RequestSequence,
    SimulationError,
    build_next_arrival_index,
    lazify,
    simulate,
)
from .offline import (
    BeladyRun,
    BeladySchedule,
    FurthestFirstCache,
    belady_prefix_fault,
    belady_restart,
    belady_schedule,
)
from .baselines import (
    ftp_policy,
    ftpm_policy,
    lru_policy,
    marker_policy,
)
from .predictors import (
    ActionPrediction,
    ActionPredictor,
    PredictionErrorMeter,
    adversarial_predictor,
    belady_predictor,
    fitf_probabilistic,
    next_arrival_to_action,
    popu_predictor,
    synthetic_next_arrival,
)
from .fnr import (
    EvictionLedger,
    FnrEager,
    PhasePlan,
    WindowPlan,
    fnr_policy,
    follower_step,
    growth_function,
    robust_phase,
    synchronize_with_prediction,
    window_plan,
)
from .fitf import (
    FitfBudget,
    FitfEager,
    fitf_follower,
    fitf_policy,
    fitf_robust,
)
from .mts import (
    FtspResult,
    MtsInstance,
    OfflineResult,
    PredictionTrack,
    WorkFunctionTable,
    brute_force_offline,
    emek_cycle,
    format_instance,
    ftsp_run,
    parse_instance,
    random_instance,
    support_point,
    window_work_function,
    work_function_step,
)
from .traces import cycling_trace, uniform_trace, walk_trace, zipf_trace
from .harness import (
    DataError,
    ExperimentConfig,
    ResultRow,
    derive_seed,
    ingest_brightkite,
    ingest_citibike,
    read_results_csv,
    run_benchmark,
    write_results_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
