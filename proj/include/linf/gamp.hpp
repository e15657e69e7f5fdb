#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "linf/prior.hpp"
#include "linf/scalar_posterior.hpp"

namespace linf {

struct GampConfig {
  int max_iterations = 200;
  double damping = 0.7;      // convex-combination weight on the new x_hat / s_hat
  double tolerance = 1e-8;   // relative change of x_hat
  double variance_floor = 1e-12;
  int weibull_grid_resolution = 1024;
  // Run the recursion on the augmented system
  //   [ Phi - rbar 1^T   rbar ] [x]   [y]
  //   [ c 1^T            -c   ] [u] = [0]   (c = 1/sqrt(N+1), near-noiseless row)
  // where u carries a flat prior, so u = sum(x) is enforced and the model is
  // algebraically the original one. Nonzero-mean measurement matrices (the
  // Bernoulli ensemble here) otherwise couple every index through the common
  // mean direction, which the Onsager correction does not cancel, and the
  // iteration drifts or diverges.
  bool mean_removal = true;
};

struct GampIterationStat {
  int iteration = 0;
  double residual = 0.0;             // relative change of x_hat
  double input_noise_variance = 0.0; // mu_r at this iteration
};

struct GampResult {
  EffectiveChannel channel;           // q = r_hat, mu_v = mu_r at the last iteration
  Eigen::VectorXd posterior_mean;
  Eigen::VectorXd posterior_variance;
  std::vector<GampIterationStat> trace;
  bool converged = false;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& msg, std::vector<GampIterationStat> trace)
      : std::runtime_error(msg), trace_(std::move(trace)) {}
  const std::vector<GampIterationStat>& trace() const { return trace_; }

 private:
  std::vector<GampIterationStat> trace_;
};

// Sum-product generalized AMP with scalar (index-averaged) variances.
// Decouples y = channel(Phi x) into q = x + N(0, mu_v) for the downstream
// scalar estimators.
GampResult gamp_run(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, const PriorSpec& prior,
                    const ChannelSpec& channel, const GampConfig& config = {});

// Output-channel denoisers: given the prior p ~ N(p_hat, mu_p) on a noiseless
// measurement and the observed y, return (s_hat, mu_s).
std::pair<double, double> output_denoiser_gaussian(double p_hat, double mu_p, double y,
                                                   double mu_z);
std::pair<double, double> output_denoiser_poisson(double p_hat, double mu_p, double y,
                                                  double alpha, double variance_floor = 1e-12);

}  // namespace linf
