#include "linf/scalar_posterior.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "linf/errors.hpp"

namespace linf {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kWeibullOrigin = 1e-12;  // grid abscissae for Weibull slabs start here
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_noise_variance(double mu_v) {
  if (!(mu_v > 0.0)) throw DomainError("posterior: channel noise variance must be > 0");
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log of the Weibull CDF increment over [a, b], 0 <= a <= b.
double log_weibull_cdf_increment(double a, double b, double scale, double shape) {
  const double ta = std::pow(a / scale, shape);
  const double tb = std::pow(b / scale, shape);
  if (!(tb > ta)) return kNegInf;
  // F(b) - F(a) = e^{-ta} (1 - e^{-(tb-ta)})
  const double tail = -std::expm1(-(tb - ta));
  return tail > 0.0 ? -ta + std::log(tail) : kNegInf;
}

struct SpanLimits {
  double lo;
  double hi;
};

SpanLimits grid_span(const PriorSpec& prior, double q, double mu_v, const GridPolicy& policy) {
  if (policy.explicit_span) return {policy.explicit_span->first, policy.explicit_span->second};
  double lo, hi;
  if (policy.span == GridPolicy::Span::LikelihoodAdapted) {
    const double half = policy.span_sigmas * std::sqrt(mu_v);
    lo = q - half;
    hi = q + half;
  } else {
    double slab_power;  // widest scale the slab part of the prior can reach
    if (const auto* w = std::get_if<SparseWeibullPrior>(&prior)) {
      slab_power = w->scale * w->scale * std::tgamma(1.0 + 2.0 / w->shape);
    } else {
      slab_power = max_component_variance(prior);
    }
    const double half = policy.span_sigmas * std::sqrt(mu_v + slab_power);
    lo = std::min(0.0, q) - half;
    hi = std::max(0.0, q) + half;
  }
  if (std::holds_alternative<SparseWeibullPrior>(prior)) {
    lo = std::max(lo, kWeibullOrigin);
    hi = std::max(hi, lo);  // window may fall entirely below the support
  }
  return {lo, hi};
}

}  // namespace

double log_normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (d * d / variance + std::log(variance) + kLog2Pi);
}

ClosedFormPosterior posterior_gaussian_mixture(const PriorSpec& prior, double q, double mu_v) {
  check_noise_variance(mu_v);
  const SpikeSlabView view = spike_slab_view(prior);  // rejects Weibull priors

  const std::size_t n_slabs = view.slab_weights.size();
  std::vector<double> log_w(n_slabs + 1, kNegInf);
  if (view.spike_weight > 0.0)
    log_w[0] = std::log(view.spike_weight) + log_normal_pdf(q, 0.0, mu_v);
  for (std::size_t k = 0; k < n_slabs; ++k) {
    log_w[k + 1] =
        std::log(view.slab_weights[k]) + log_normal_pdf(q, 0.0, view.slab_variances[k] + mu_v);
  }

  double log_max = kNegInf;
  for (double lw : log_w) log_max = std::max(log_max, lw);
  if (log_max == kNegInf)
    throw DegeneratePosteriorError("posterior_gaussian_mixture: all weights underflowed");

  double total = 0.0;
  std::vector<double> w(n_slabs + 1, 0.0);
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    w[k] = std::exp(log_w[k] - log_max);
    total += w[k];
  }

  ClosedFormPosterior post;
  post.spike_weight = w[0] / total;
  post.components.reserve(n_slabs);
  for (std::size_t k = 0; k < n_slabs; ++k) {
    const double mu_k = view.slab_variances[k];
    PosteriorComponent comp;
    comp.weight = w[k + 1] / total;
    comp.mean = mu_k * q / (mu_k + mu_v);
    comp.variance = mu_k * mu_v / (mu_k + mu_v);
    post.components.push_back(comp);
  }
  return post;
}

GridPosterior posterior_grid(const PriorSpec& prior, double q, double mu_v,
                             const GridPolicy& policy) {
  check_noise_variance(mu_v);
  validate(prior);
  if (policy.resolution < 64) throw ParameterError("posterior_grid: resolution must be >= 64");

  const auto [lo, hi] = grid_span(prior, q, mu_v, policy);
  const int n = policy.resolution;
  const double width = hi - lo;
  const double cell = width / n;

  GridPosterior post;
  post.abscissae.resize(n);
  Eigen::ArrayXd log_mass(n);

  double spike_prior_weight = 0.0;
  if (const auto* w = std::get_if<SparseWeibullPrior>(&prior)) {
    spike_prior_weight = 1.0 - w->sparsity;
    const double log_s = w->sparsity > 0.0 ? std::log(w->sparsity) : kNegInf;
    for (int g = 0; g < n; ++g) {
      const double a = lo + g * cell;
      const double b = a + cell;
      const double x = 0.5 * (a + b);
      post.abscissae[g] = x;
      log_mass[g] = width > 0.0
                        ? log_s + log_weibull_cdf_increment(a, b, w->scale, w->shape) +
                              log_normal_pdf(q, x, mu_v)
                        : kNegInf;
    }
  } else {
    const SpikeSlabView view = spike_slab_view(prior);
    spike_prior_weight = view.spike_weight;
    const double log_cell = cell > 0.0 ? std::log(cell) : kNegInf;
    for (int g = 0; g < n; ++g) {
      const double x = lo + (g + 0.5) * cell;
      post.abscissae[g] = x;
      // log of sum_k s_k N(x; 0, mu_k)
      double log_density = kNegInf;
      for (std::size_t k = 0; k < view.slab_weights.size(); ++k) {
        log_density = log_add(log_density, std::log(view.slab_weights[k]) +
                                               log_normal_pdf(x, 0.0, view.slab_variances[k]));
      }
      log_mass[g] = log_density + log_normal_pdf(q, x, mu_v) + log_cell;
    }
  }

  const double log_spike = spike_prior_weight > 0.0
                               ? std::log(spike_prior_weight) + log_normal_pdf(q, 0.0, mu_v)
                               : kNegInf;
  double log_max = std::max(log_spike, log_mass.maxCoeff());
  if (log_max == kNegInf || !std::isfinite(log_max))
    throw DegeneratePosteriorError("posterior_grid: all masses underflowed; grid misplaced");

  post.masses = (log_mass - log_max).exp();
  const double spike_raw = std::exp(log_spike - log_max);
  const double total = post.masses.sum() + spike_raw;
  post.masses /= total;
  post.spike_weight = spike_raw / total;
  return post;
}

Moments posterior_moments(const ClosedFormPosterior& post) {
  double mean = 0.0;
  double second = 0.0;
  for (const auto& comp : post.components) {
    mean += comp.weight * comp.mean;
    second += comp.weight * (comp.variance + comp.mean * comp.mean);
  }
  return {mean, std::max(second - mean * mean, 0.0)};
}

Moments posterior_moments(const GridPosterior& post) {
  const double mean = (post.masses * post.abscissae).sum();
  const double second = (post.masses * post.abscissae.square()).sum();
  return {mean, std::max(second - mean * mean, 0.0)};
}

Moments posterior_moments(const ScalarPosterior& post) {
  return std::visit([](const auto& p) { return posterior_moments(p); }, post);
}

ScalarPosterior posterior_for_channel(const PriorSpec& prior, double q, double mu_v,
                                      int weibull_grid_resolution) {
  if (is_gaussian_family(prior)) return posterior_gaussian_mixture(prior, q, mu_v);
  GridPolicy policy;
  policy.resolution = weibull_grid_resolution;
  policy.span = GridPolicy::Span::LikelihoodAdapted;
  return posterior_grid(prior, q, mu_v, policy);
}

InputDenoiser::InputDenoiser(const PriorSpec& prior, int weibull_grid_resolution)
    : prior_(prior), grid_resolution_(weibull_grid_resolution) {
  validate(prior_);
  gaussian_family_ = is_gaussian_family(prior_);
  if (gaussian_family_) view_ = spike_slab_view(prior_);
}

void InputDenoiser::set_noise_variance(double mu_v) {
  check_noise_variance(mu_v);
  mu_v_ = mu_v;
  if (!gaussian_family_) return;
  const std::size_t n = view_.slab_weights.size();
  log_prefactor_.resize(n);
  inv_total_var_.resize(n);
  gain_.resize(n);
  cond_var_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double total_var = view_.slab_variances[k] + mu_v;
    log_prefactor_[k] = std::log(view_.slab_weights[k]) - 0.5 * (std::log(total_var) + kLog2Pi);
    inv_total_var_[k] = 1.0 / total_var;
    gain_[k] = view_.slab_variances[k] / total_var;
    cond_var_[k] = view_.slab_variances[k] * mu_v / total_var;
  }
  spike_log_prefactor_ = view_.spike_weight > 0.0
                             ? std::log(view_.spike_weight) - 0.5 * (std::log(mu_v) + kLog2Pi)
                             : kNegInf;
  spike_inv_var_ = 1.0 / mu_v;
}

Moments InputDenoiser::moments(double q) const {
  if (!gaussian_family_) {
    GridPolicy policy;
    policy.resolution = grid_resolution_;
    policy.span = GridPolicy::Span::LikelihoodAdapted;
    return posterior_moments(posterior_grid(prior_, q, mu_v_, policy));
  }
  const double q_sq = q * q;
  const std::size_t n = view_.slab_weights.size();
  const double log_spike = view_.spike_weight > 0.0
                               ? spike_log_prefactor_ - 0.5 * q_sq * spike_inv_var_
                               : kNegInf;
  double log_max = log_spike;
  double lw_buf[8];
  std::vector<double> lw_heap;
  double* lw = n <= 8 ? lw_buf : (lw_heap.resize(n), lw_heap.data());
  for (std::size_t k = 0; k < n; ++k) {
    lw[k] = log_prefactor_[k] - 0.5 * q_sq * inv_total_var_[k];
    if (lw[k] > log_max) log_max = lw[k];
  }
  if (log_max == kNegInf)
    throw DegeneratePosteriorError("input denoiser: posterior weights underflowed");
  double total = log_spike == kNegInf ? 0.0 : std::exp(log_spike - log_max);
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = std::exp(lw[k] - log_max);
    const double m = gain_[k] * q;
    total += w;
    mean += w * m;
    second += w * (cond_var_[k] + m * m);
  }
  mean /= total;
  second /= total;
  return {mean, std::max(second - mean * mean, 0.0)};
}

}  // namespace linf
