"""Bayesian signal estimation under the l-infinity error metric.

Thin Python layer over the C++ core: signal/channel sampling, closed-form and
grid posteriors for scalar Gaussian channels, Wiener and minimum-mean-lp
estimators, the GAMP decoupling solver, and extreme-value checks.
"""

from ._core import (
    ChannelSpec,
    ConfigError,
    DegeneratePosteriorError,
    DomainError,
    GampConfig,
    GampResult,
    Moments,
    NumericError,
    ParameterError,
    PriorSpec,
    ScalarPosterior,
    apply_channel,
    berman_ratio,
    error_report,
    gamp_run,
    gaussian_channel,
    lp_norm,
    lp_scalar_estimate,
    lp_vector_estimate,
    mixture_gaussian,
    output_denoiser_gaussian,
    output_denoiser_poisson,
    poisson_channel,
    posterior_gaussian_mixture,
    posterior_grid,
    posterior_mean_estimate,
    run_experiment_json,
    sample_matrix,
    sample_signal,
    sigma_pattern,
    snr_to_noise_variance,
    sparse_gaussian,
    sparse_weibull,
    support_dominance,
    wiener_mixture,
    wiener_sparse,
    __version__,
)

__all__ = [
    "ChannelSpec",
    "ConfigError",
    "DegeneratePosteriorError",
    "DomainError",
    "GampConfig",
    "GampResult",
    "Moments",
    "NumericError",
    "ParameterError",
    "PriorSpec",
    "ScalarPosterior",
    "apply_channel",
    "berman_ratio",
    "error_report",
    "gamp_run",
    "gaussian_channel",
    "lp_norm",
    "lp_scalar_estimate",
    "lp_vector_estimate",
    "mixture_gaussian",
    "output_denoiser_gaussian",
    "output_denoiser_poisson",
    "poisson_channel",
    "posterior_gaussian_mixture",
    "posterior_grid",
    "posterior_mean_estimate",
    "run_experiment_json",
    "sample_matrix",
    "sample_signal",
    "sigma_pattern",
    "snr_to_noise_variance",
    "sparse_gaussian",
    "sparse_weibull",
    "support_dominance",
    "wiener_mixture",
    "wiener_sparse",
    "__version__",
]
