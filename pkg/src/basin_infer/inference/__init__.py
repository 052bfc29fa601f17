from .basin import (
    BetaParams,
    PolyDensityParams,
    PolyTailBound,
    basin_eta_bound,
    basin_tail_bound_beta,
    basin_tail_bound_poly,
    basin_tail_exact,
    basin_tail_log,
    beta_posterior_update,
    poly_params_for_beta,
    prior_mass_below,
)
from .empirical_bayes import (
    CalibrationResult,
    empirical_bayes_calibrate,
    log_marginal_likelihood,
    simulate_mfm_counts,
    tally_counts,
)
from .mfm import (
    MfmPosterior,
    MfmPrior,
    dirichlet_coarsen_params,
    log_component_likelihood,
    mfm_component_likelihood,
    mfm_K1_bounds,
    mfm_Lk_bounds,
    mfm_partition_likelihood,
    mfm_posterior_K,
)
from .spike_slab import (
    SpikeSlabPrior,
    beta_tail_constants,
    moment_tail_bound,
    poly_tail_rate_bound,
    slab_moment,
    slab_near_one_cdf,
    spike_slab_posterior,
)
from .summary import PosteriorSummary
