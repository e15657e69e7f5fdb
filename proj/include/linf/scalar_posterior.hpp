#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "linf/prior.hpp"

namespace linf {

// Decoupled parallel scalar Gaussian channels q = x + v, v ~ N(0, noise_variance).
struct EffectiveChannel {
  Eigen::VectorXd pseudo_observations;
  double noise_variance = 0.0;
};

struct PosteriorComponent {
  double weight = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

// Mixture-of-Gaussians posterior with an exact point mass at 0. The spike is
// never smeared into a narrow Gaussian; lp objectives are sensitive to that.
struct ClosedFormPosterior {
  double spike_weight = 0.0;
  std::vector<PosteriorComponent> components;
};

// Discretized posterior: probability masses on strictly increasing abscissae,
// plus an exact spike at 0 for sparse priors.
struct GridPosterior {
  double spike_weight = 0.0;
  Eigen::ArrayXd abscissae;
  Eigen::ArrayXd masses;
};

using ScalarPosterior = std::variant<ClosedFormPosterior, GridPosterior>;

struct GridPolicy {
  // PriorWide covers everything the prior and channel jointly reach;
  // LikelihoodAdapted covers only the window the likelihood N(q; x, mu_v)
  // leaves open, which is what a solver inner loop wants when mu_v is small.
  enum class Span { PriorWide, LikelihoodAdapted };
  int resolution = 4096;
  double span_sigmas = 8.0;
  Span span = Span::PriorWide;
  std::optional<std::pair<double, double>> explicit_span;
};

// Exact posterior for mixture/sparse Gaussian priors under q = x + N(0, mu_v):
// component k gets weight ∝ s_k N(q; 0, mu_k + mu_v), mean mu_k q/(mu_k+mu_v),
// variance mu_k mu_v/(mu_k+mu_v); spike weight ∝ (1-s) N(q; 0, mu_v).
// Weights are computed in the log domain to survive tiny mu_v.
ClosedFormPosterior posterior_gaussian_mixture(const PriorSpec& prior, double q, double mu_v);

// Quadrature posterior for any prior. Weibull slab mass per cell uses the
// exact prior CDF increment; the density diverges at 0 for shape < 1.
GridPosterior posterior_grid(const PriorSpec& prior, double q, double mu_v,
                             const GridPolicy& policy = {});

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments posterior_moments(const ScalarPosterior& posterior);
Moments posterior_moments(const ClosedFormPosterior& posterior);
Moments posterior_moments(const GridPosterior& posterior);

// Closed form for Gaussian-family priors, grid for Weibull.
ScalarPosterior posterior_for_channel(const PriorSpec& prior, double q, double mu_v,
                                      int weibull_grid_resolution = 1024);

// Per-index posterior moments under a fixed prior; precomputes what it can
// per noise level so solver loops stay cheap.
class InputDenoiser {
 public:
  explicit InputDenoiser(const PriorSpec& prior, int weibull_grid_resolution = 1024);

  void set_noise_variance(double mu_v);
  Moments moments(double q) const;

 private:
  PriorSpec prior_;
  int grid_resolution_;
  double mu_v_ = 0.0;
  bool gaussian_family_ = true;
  SpikeSlabView view_;
  // Per-noise-level constants for the Gaussian-family closed form.
  std::vector<double> log_prefactor_;
  std::vector<double> inv_total_var_;
  std::vector<double> gain_;
  std::vector<double> cond_var_;
  double spike_log_prefactor_ = 0.0;
  double spike_inv_var_ = 0.0;
};

double log_normal_pdf(double x, double mean, double variance);

}  // namespace linf
