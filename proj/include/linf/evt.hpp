#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "linf/prior.hpp"

namespace linf {

// Wiener-filter error statistics split by support: errors on nonzero inputs
// are N(0, c^2 mu_z + (1-c)^2 mu_x), errors on zero inputs are N(0, c^2 mu_z),
// with c = mu_x/(mu_x + mu_z).
struct ErrorPatternStats {
  double gain = 0.0;
  double sigma_support = 0.0;  // sigma_1
  double sigma_zero = 0.0;     // sigma_2
};

ErrorPatternStats sigma_pattern(double mu_x, double mu_z);

// max(sample) / sqrt(2 ln n); 0 for an all-zero sample.
double max_over_sqrt_2logn(const Eigen::VectorXd& sample);

struct BermanResult {
  Eigen::Index n = 0;
  int trials = 0;
  double mean_ratio = 0.0;
  double stddev_ratio = 0.0;
};

// Distribution of max of n i.i.d. standard Gaussians, normalized by
// sqrt(2 ln n); the normalized maximum tends to 1 almost surely.
BermanResult berman_ratio(Eigen::Index n, int trials, std::uint64_t seed);

struct DominanceResult {
  int evaluated = 0;
  int skipped = 0;             // trials with an empty support or zero set
  double fraction = 1.0;       // share of evaluated trials where the support max wins
  double mean_norm_support = 0.0;  // mean of max_I |e| / (sigma_1 sqrt(2 ln |I|))
  double mean_norm_zero = 0.0;     // mean of max_J |e| / (sigma_2 sqrt(2 ln |J|))
};

// Samples x from the prior, passes it through a Gaussian channel, applies the
// asymptotically-optimal Wiener filter, and counts how often the largest
// absolute error lands on the support set (the largest-variance component for
// mixture priors). Support sets come from latent labels, not thresholding.
DominanceResult support_dominance(const PriorSpec& prior, double mu_z, Eigen::Index n, int trials,
                                  std::uint64_t seed);

}  // namespace linf
