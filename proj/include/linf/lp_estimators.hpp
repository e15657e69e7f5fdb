#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "linf/prior.hpp"
#include "linf/scalar_posterior.hpp"

namespace linf {

// x_hat = mu_x/(mu_x + mu_z) * r, elementwise.
Eigen::VectorXd wiener_sparse(const Eigen::VectorXd& r, double mu_x, double mu_z);

// Same gain with mu_max, the largest mixture component variance.
Eigen::VectorXd wiener_mixture(const Eigen::VectorXd& r, const MixtureGaussianPrior& prior,
                               double mu_z);

// Minimizer of g(t) = pi0 |t|^p + sum_k w_k E|t - X_k|^p over t, for p >= 1.
// Gaussian slabs are integrated by 64-node Gauss-Hermite quadrature; the
// convex objective is solved by bisection on its derivative to ~1e-9 in t,
// with set-valued minimizers (p = 1 plateaus) resolved to the interval
// midpoint.
double lp_scalar_estimate(const ScalarPosterior& posterior, double p);

// Componentwise lp_scalar_estimate under the per-index posterior.
Eigen::VectorXd lp_vector_estimate(const EffectiveChannel& channel, const PriorSpec& prior,
                                   double p, int weibull_grid_resolution = 1024);

// Componentwise posterior mean (the p = 2 special case, computed in closed form).
Eigen::VectorXd posterior_mean_estimate(const EffectiveChannel& channel, const PriorSpec& prior,
                                        int weibull_grid_resolution = 1024);

// (sum_i |d_i|^p)^(1/p), factored around max|d_i| so p up to a few hundred is
// exact rather than overflowing.
double lp_norm(const Eigen::VectorXd& diff, double p);

struct ErrorReport {
  double linf = 0.0;
  std::vector<std::pair<double, double>> lp;  // (p, ||.||_p)
  Eigen::VectorXd abs_errors;
};

ErrorReport error_report(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth,
                         const std::vector<double>& ps);

struct EstimatorSpec {
  // Wiener resolves to the sparse-prior gain mu_x/(mu_x+mu_v) or the mixture
  // gain mu_max/(mu_max+mu_v); WienerComponent pins the gain to one mixture
  // component's variance (the W1/W2/W3 family).
  enum class Kind { Wiener, WienerComponent, PosteriorMean, LpOptimal };
  Kind kind = Kind::Wiener;
  int component = -1;  // 0-based mixture component, WienerComponent only
  double p = 2.0;      // LpOptimal only

  std::string label() const;
};

Eigen::VectorXd apply_estimator(const EstimatorSpec& spec, const EffectiveChannel& channel,
                                const PriorSpec& prior, int weibull_grid_resolution = 1024);

// The 1-D objective behind lp_scalar_estimate, exposed for convexity checks.
// At p = 1 the closed-form derivative uses the exact mixture CDF, so the
// minimizer is the true posterior median rather than a quadrature-node one.
class LpObjective {
 public:
  LpObjective(const ScalarPosterior& posterior, double p);

  double value(double t) const;
  double derivative_sign_sum(double t) const;  // g'(t) / p
  double node_min() const { return node_min_; }
  double node_max() const { return node_max_; }

 private:
  double p_;
  Eigen::ArrayXd nodes_;
  Eigen::ArrayXd weights_;
  double node_min_ = 0.0;
  double node_max_ = 0.0;
  mutable Eigen::ArrayXd scratch_;
  // p = 1 closed-form path: spike weight plus (weight, mean, sd) per slab
  bool exact_median_ = false;
  double spike_weight_ = 0.0;
  std::vector<double> comp_weight_, comp_mean_, comp_sd_;
};

}  // namespace linf
