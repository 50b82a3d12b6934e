"""Radar spectrum-sharing simulator: when does learned waveform selection
beat a fixed sense-and-avoid rule on a Markov interference channel?"""

from .channel import (
    ChannelError,
    ChannelSpec,
    ConvergenceError,
    MarkovChannel,
    ObservationModel,
    build_channel,
    stationary_distribution,
    stationary_distribution_cesaro,
)
from .dominance import (
    DominanceOrder,
    EmpiricalCdf,
    LinearityDiagnostic,
    RegretCurve,
    TransitionClasses,
    analytic_average_cost,
    classify_transitions,
    empirical_cdf,
    first_order_dominates,
    linearity_diagnostic,
    regret_curve,
    saa_state_map,
    second_order_dominates,
    statewise_dominates,
)
from .harness import (
    AggregateStats,
    ConfigError,
    EpisodeTrace,
    ExperimentConfig,
    SweepRow,
    default_states,
    run_dominance,
    run_episode,
    run_trials,
    short_horizon,
    sweep_joint,
    sweep_miss,
    sweep_p12,
)
from .metrics import (
    LossParams,
    PriOutcome,
    collision_count,
    loss,
    missed_opportunity_count,
    score_pri,
    sinr_db,
)
from .policies import (
    BellmanOraclePolicy,
    BellmanTable,
    FixedWaveformPolicy,
    GeniePolicy,
    Policy,
    SenseAndAvoidPolicy,
    ThompsonSamplingPolicy,
    bellman_build,
    make_policy,
)
from .waveforms import (
    Waveform,
    enumerate_waveforms,
    widest_vacancy,
    widest_vacancy_width,
    zero_runs,
)

__version__ = "0.1.0"
