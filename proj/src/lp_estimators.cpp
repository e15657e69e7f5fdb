#include "linf/lp_estimators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "linf/errors.hpp"
#include "linf/quadrature.hpp"

namespace linf {

namespace {

constexpr int kHermiteNodes = 64;
constexpr double kMaxExponent = 700.0;  // exp() overflows just above this

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("lp estimator: p must be >= 1");
}

[[noreturn]] void throw_overflow(double t) {
  throw NumericError("lp objective overflow at t = " + std::to_string(t));
}

}  // namespace

LpObjective::LpObjective(const ScalarPosterior& posterior, double p) : p_(p) {
  check_p(p);
  std::vector<double> nodes;
  std::vector<double> weights;
  if (const auto* cf = std::get_if<ClosedFormPosterior>(&posterior)) {
    const QuadratureRule& rule = gauss_hermite(kHermiteNodes);
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    nodes.reserve(cf->components.size() * kHermiteNodes + 1);
    weights.reserve(nodes.capacity());
    if (cf->spike_weight > 0.0) {
      nodes.push_back(0.0);
      weights.push_back(cf->spike_weight);
    }
    for (const auto& comp : cf->components) {
      if (comp.weight == 0.0) continue;
      const double spread = std::sqrt(2.0 * comp.variance);
      for (int j = 0; j < kHermiteNodes; ++j) {
        nodes.push_back(comp.mean + spread * rule.nodes[j]);
        weights.push_back(comp.weight * rule.weights[j] * inv_sqrt_pi);
      }
    }
  } else {
    const auto& grid = std::get<GridPosterior>(posterior);
    nodes.reserve(std::size_t(grid.abscissae.size()) + 1);
    weights.reserve(nodes.capacity());
    if (grid.spike_weight > 0.0) {
      nodes.push_back(0.0);
      weights.push_back(grid.spike_weight);
    }
    for (Eigen::Index g = 0; g < grid.abscissae.size(); ++g) {
      if (grid.masses[g] > 0.0) {
        nodes.push_back(grid.abscissae[g]);
        weights.push_back(grid.masses[g]);
      }
    }
  }
  if (nodes.empty()) throw ParameterError("lp objective: posterior carries no mass");
  nodes_ = Eigen::Map<Eigen::ArrayXd>(nodes.data(), Eigen::Index(nodes.size()));
  weights_ = Eigen::Map<Eigen::ArrayXd>(weights.data(), Eigen::Index(weights.size()));
  node_min_ = nodes_.minCoeff();
  node_max_ = nodes_.maxCoeff();
  scratch_.resize(nodes_.size());

  if (p == 1.0) {
    if (const auto* cf = std::get_if<ClosedFormPosterior>(&posterior)) {
      exact_median_ = true;
      spike_weight_ = cf->spike_weight;
      for (const auto& comp : cf->components) {
        if (comp.weight == 0.0) continue;
        comp_weight_.push_back(comp.weight);
        comp_mean_.push_back(comp.mean);
        comp_sd_.push_back(std::sqrt(comp.variance));
      }
    }
  }
}

double LpObjective::value(double t) const {
  scratch_ = (t - nodes_).abs().log() * p_;
  if (scratch_.maxCoeff() > kMaxExponent) throw_overflow(t);
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < scratch_.size(); ++i) {
    if (scratch_[i] != -std::numeric_limits<double>::infinity())
      total += (long double)weights_[i] * std::exp((long double)scratch_[i]);
  }
  return double(total);
}

double LpObjective::derivative_sign_sum(double t) const {
  long double total = 0.0L;
  if (p_ == 1.0) {
    if (exact_median_) {
      // E[sign(t - X)] = spike sign(t) + sum_k w_k (2 Phi((t-m_k)/sd_k) - 1)
      total = (long double)spike_weight_ * (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0));
      for (std::size_t k = 0; k < comp_weight_.size(); ++k) {
        const double z = (t - comp_mean_[k]) / comp_sd_[k];
        total += (long double)comp_weight_[k] * (-std::erfc(z / std::numbers::sqrt2) + 1.0);
      }
      return double(total);
    }
    for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
      const double d = t - nodes_[i];
      total += (long double)weights_[i] * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
    }
    return double(total);
  }
  scratch_ = (t - nodes_).abs().log() * (p_ - 1.0);
  if (scratch_.maxCoeff() > kMaxExponent) throw_overflow(t);
  for (Eigen::Index i = 0; i < scratch_.size(); ++i) {
    if (scratch_[i] == -std::numeric_limits<double>::infinity()) continue;
    const double mag = std::exp(scratch_[i]);
    total += (long double)weights_[i] * (t > nodes_[i] ? mag : -mag);
  }
  return double(total);
}

namespace {

// Boundary of {t : pred(D(t))} inside [lo, hi] by bisection, assuming pred
// holds at lo and fails at hi; returns the bracket midpoint at tolerance.
template <typename Pred>
double bisect_boundary(const LpObjective& obj, double lo, double hi, Pred pred) {
  if (!pred(obj.derivative_sign_sum(lo))) return lo;
  if (pred(obj.derivative_sign_sum(hi))) return hi;
  const double tol = 1e-10 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(obj.derivative_sign_sum(mid)))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double lp_scalar_estimate(const ScalarPosterior& posterior, double p) {
  check_p(p);
  LpObjective obj(posterior, p);
  const double lo = obj.node_min();
  const double hi = obj.node_max();
  if (lo == hi) return lo;  // point mass
  // The minimizer lies in the node hull: the derivative is <= 0 at the left
  // end and >= 0 at the right end, and is nondecreasing in between.
  if (p > 1.0) {  // strictly convex: unique root
    return bisect_boundary(obj, lo, hi, [](double d) { return d < 0.0; });
  }
  // p = 1 sign sums plateau over whole intervals; resolve set-valued
  // minimizers to the interval midpoint, absorbing summation roundoff.
  constexpr double kFlat = 1e-12;
  const double left = bisect_boundary(obj, lo, hi, [](double d) { return d < -kFlat; });
  const double right = bisect_boundary(obj, lo, hi, [](double d) { return d <= kFlat; });
  return 0.5 * (left + right);
}

Eigen::VectorXd wiener_sparse(const Eigen::VectorXd& r, double mu_x, double mu_z) {
  if (mu_x < 0.0) throw ParameterError("wiener_sparse: signal variance must be >= 0");
  if (!(mu_z > 0.0)) throw DomainError("wiener_sparse: noise variance must be > 0");
  return (mu_x / (mu_x + mu_z)) * r;
}

Eigen::VectorXd wiener_mixture(const Eigen::VectorXd& r, const MixtureGaussianPrior& prior,
                               double mu_z) {
  validate(PriorSpec(prior));
  if (!(mu_z > 0.0)) throw DomainError("wiener_mixture: noise variance must be > 0");
  double mu_max = 0.0;
  for (double v : prior.variances) mu_max = std::max(mu_max, v);
  return (mu_max / (mu_max + mu_z)) * r;
}

Eigen::VectorXd lp_vector_estimate(const EffectiveChannel& channel, const PriorSpec& prior,
                                   double p, int weibull_grid_resolution) {
  check_p(p);
  const Eigen::VectorXd& q = channel.pseudo_observations;
  Eigen::VectorXd estimate(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    estimate[i] = lp_scalar_estimate(
        posterior_for_channel(prior, q[i], channel.noise_variance, weibull_grid_resolution), p);
  }
  return estimate;
}

Eigen::VectorXd posterior_mean_estimate(const EffectiveChannel& channel, const PriorSpec& prior,
                                        int weibull_grid_resolution) {
  InputDenoiser denoiser(prior, weibull_grid_resolution);
  denoiser.set_noise_variance(channel.noise_variance);
  const Eigen::VectorXd& q = channel.pseudo_observations;
  Eigen::VectorXd estimate(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) estimate[i] = denoiser.moments(q[i]).mean;
  return estimate;
}

double lp_norm(const Eigen::VectorXd& diff, double p) {
  check_p(p);
  if (diff.size() < 1) throw ParameterError("lp_norm: empty vector");
  const double peak = diff.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < diff.size(); ++i) {
    const double ratio = std::abs(diff[i]) / peak;
    if (ratio > 0.0) total += std::exp((long double)(p * std::log(ratio)));
  }
  return peak * double(std::pow(total, (long double)(1.0 / p)));
}

std::string EstimatorSpec::label() const {
  switch (kind) {
    case Kind::Wiener: return "wiener";
    case Kind::WienerComponent: return "W" + std::to_string(component + 1);
    case Kind::PosteriorMean: return "pm";
    case Kind::LpOptimal: return "lp";
  }
  return "?";
}

Eigen::VectorXd apply_estimator(const EstimatorSpec& spec, const EffectiveChannel& channel,
                                const PriorSpec& prior, int weibull_grid_resolution) {
  const Eigen::VectorXd& q = channel.pseudo_observations;
  const double mu_v = channel.noise_variance;
  switch (spec.kind) {
    case EstimatorSpec::Kind::Wiener:
      if (const auto* mix = std::get_if<MixtureGaussianPrior>(&prior))
        return wiener_mixture(q, *mix, mu_v);
      if (const auto* sparse = std::get_if<SparseGaussianPrior>(&prior))
        return wiener_sparse(q, sparse->variance, mu_v);
      throw ParameterError("wiener estimator does not apply to Weibull priors");
    case EstimatorSpec::Kind::WienerComponent: {
      const auto* mix = std::get_if<MixtureGaussianPrior>(&prior);
      if (mix == nullptr || spec.component < 0 ||
          std::size_t(spec.component) >= mix->variances.size())
        throw ParameterError("component wiener estimator needs a mixture prior component");
      return wiener_sparse(q, mix->variances[std::size_t(spec.component)], mu_v);
    }
    case EstimatorSpec::Kind::PosteriorMean:
      return posterior_mean_estimate(channel, prior, weibull_grid_resolution);
    case EstimatorSpec::Kind::LpOptimal:
      return lp_vector_estimate(channel, prior, spec.p, weibull_grid_resolution);
  }
  throw ParameterError("unknown estimator kind");
}

ErrorReport error_report(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth,
                         const std::vector<double>& ps) {
  if (estimate.size() != truth.size() || estimate.size() < 1)
    throw ParameterError("error_report: vectors must be nonempty and equal-length");
  ErrorReport report;
  report.abs_errors = (estimate - truth).cwiseAbs();
  report.linf = report.abs_errors.maxCoeff();
  report.lp.reserve(ps.size());
  for (double p : ps) report.lp.emplace_back(p, lp_norm(estimate - truth, p));
  return report;
}

}  // namespace linf
