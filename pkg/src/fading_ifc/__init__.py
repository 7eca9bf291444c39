"""Sum-capacity tooling for two-user ergodic fading Gaussian interference channels."""

from .channel import (
    POWER_TOL,
    ChannelFormatError,
    ConvergenceError,
    FadingProcess,
    FadingState,
    PolicyFeasibility,
    PowerBudget,
    PowerPolicy,
    PreconditionError,
    channel_from_dict,
    channel_to_dict,
    expect,
    load_channel_json,
    make_discrete_channel,
    sample_rayleigh_channel,
    shannon_bits,
    validate_policy,
)
from .allocate import (
    OptimizerReport,
    PerStateMinRate,
    RateObjective,
    WaterfillResult,
    kkt_residual,
    kkt_residual_bundle,
    mac_opportunistic_waterfill,
    maximize_min_concave,
    waterfill,
)
from .classify import (
    ChannelSubclass,
    ClassificationReport,
    EvsCheck,
    NoisyInterferenceCheck,
    Sidedness,
    StateLabel,
    channel_sidedness,
    classify_channel,
    classify_state,
    evs_condition,
    noisy_interference_condition,
    um_orientation,
)
from .cmac import (
    CASE_EQ_TOL,
    CaseLabel,
    CaseSumRates,
    MacPentagon,
    WeightPair,
    case_sum_rates,
    identify_case,
    mac_bounds,
    region_boundary,
    sum_capacity,
    sum_rate_fixed_policy,
    weighted_max_fixed_policy,
)
from .ifc import (
    HkAllocation,
    MinimaxCase,
    NotEVS,
    NotUniformlyMixed,
    NotUniformlyStrong,
    NotUniformlyWeak,
    evs_sum_capacity,
    hk_optimize,
    hk_region_bounds,
    hk_sum_rates,
    interference_free_outer_bound,
    separable_one_sided_baseline,
    tdm_baseline,
    um_sum_capacity,
    us_separable_sum_rate,
    us_sum_capacity,
    uw1_sum_capacity,
    uw2_upper_bound,
)
