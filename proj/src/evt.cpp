#include "linf/evt.hpp"

#include <cmath>
#include <limits>

#include "linf/errors.hpp"
#include "linf/rng.hpp"
#include "linf/signal_model.hpp"

namespace linf {

ErrorPatternStats sigma_pattern(double mu_x, double mu_z) {
  if (mu_x < 0.0) throw ParameterError("sigma_pattern: signal variance must be >= 0");
  if (!(mu_z > 0.0)) throw DomainError("sigma_pattern: noise variance must be > 0");
  const double c = mu_x / (mu_x + mu_z);
  ErrorPatternStats stats;
  stats.gain = c;
  stats.sigma_support = std::sqrt(c * c * mu_z + (1.0 - c) * (1.0 - c) * mu_x);
  stats.sigma_zero = std::sqrt(c * c * mu_z);
  return stats;
}

double max_over_sqrt_2logn(const Eigen::VectorXd& sample) {
  if (sample.size() < 2) throw ParameterError("max_over_sqrt_2logn: need at least 2 values");
  return sample.maxCoeff() / std::sqrt(2.0 * std::log(double(sample.size())));
}

BermanResult berman_ratio(Eigen::Index n, int trials, std::uint64_t seed) {
  if (n < 2) throw ParameterError("berman_ratio: n must be >= 2");
  if (trials < 1) throw ParameterError("berman_ratio: trials must be >= 1");
  const double norm = std::sqrt(2.0 * std::log(double(n)));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, std::uint64_t(t));
    double peak = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) peak = std::max(peak, rng.normal());
    const double ratio = peak / norm;
    sum += ratio;
    sum_sq += ratio * ratio;
  }
  BermanResult result;
  result.n = n;
  result.trials = trials;
  result.mean_ratio = sum / trials;
  result.stddev_ratio =
      trials > 1 ? std::sqrt(std::max(sum_sq - trials * result.mean_ratio * result.mean_ratio, 0.0) /
                             (trials - 1))
                 : 0.0;
  return result;
}

DominanceResult support_dominance(const PriorSpec& prior, double mu_z, Eigen::Index n, int trials,
                                  std::uint64_t seed) {
  validate(prior);
  if (!(mu_z > 0.0)) throw DomainError("support_dominance: noise variance must be > 0");
  if (n < 1 || trials < 1) throw ParameterError("support_dominance: n and trials must be >= 1");

  double gain, sigma_support, sigma_zero;
  std::int32_t support_label = 0;
  if (const auto* sparse = std::get_if<SparseGaussianPrior>(&prior)) {
    if (!(sparse->sparsity > 0.0))
      throw ParameterError("support_dominance: sparse prior needs sparsity > 0");
    const ErrorPatternStats stats = sigma_pattern(sparse->variance, mu_z);
    gain = stats.gain;
    sigma_support = stats.sigma_support;
    sigma_zero = stats.sigma_zero;
  } else if (const auto* mix = std::get_if<MixtureGaussianPrior>(&prior)) {
    // Support set = the largest-variance component; errors elsewhere are
    // normalized by the next-largest error-pattern deviation.
    std::size_t k_max = 0;
    for (std::size_t k = 1; k < mix->variances.size(); ++k)
      if (mix->variances[k] > mix->variances[k_max]) k_max = k;
    const double mu_max = mix->variances[k_max];
    gain = mu_max / (mu_max + mu_z);
    const double c2z = gain * gain * mu_z;
    const double shrink = (1.0 - gain) * (1.0 - gain);
    sigma_support = std::sqrt(c2z + shrink * mu_max);
    double second = 0.0;
    for (std::size_t k = 0; k < mix->variances.size(); ++k) {
      if (k == k_max) continue;
      if (mix->variances[k] == mu_max)
        throw ParameterError("support_dominance: mixture variances must be distinct");
      second = std::max(second, mix->variances[k]);
    }
    if (mix->variances.size() < 2)
      throw ParameterError("support_dominance: mixture needs at least 2 components");
    sigma_zero = std::sqrt(c2z + shrink * second);
    support_label = std::int32_t(k_max);
  } else {
    throw ParameterError("support_dominance: prior must be sparse or mixture Gaussian");
  }

  DominanceResult result;
  int dominant = 0;
  double norm_support_sum = 0.0, norm_zero_sum = 0.0;
  int norm_count = 0;
  const GaussianChannel channel{mu_z};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, std::uint64_t(t));
    const LabeledSignal sig = sample_signal_labeled(prior, n, trial_seed);
    const Eigen::VectorXd r = apply_channel(ChannelSpec(channel), sig.values, trial_seed);

    double max_support = -1.0, max_zero = -1.0;
    Eigen::Index count_support = 0, count_zero = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double err = std::abs(gain * r[i] - sig.values[i]);
      if (sig.labels[std::size_t(i)] == support_label) {
        max_support = std::max(max_support, err);
        ++count_support;
      } else {
        max_zero = std::max(max_zero, err);
        ++count_zero;
      }
    }
    if (count_support == 0 || count_zero == 0) {
      ++result.skipped;
      continue;
    }
    ++result.evaluated;
    if (max_support > max_zero) ++dominant;  // ties count as non-dominant
    if (count_support >= 2 && count_zero >= 2) {
      norm_support_sum +=
          max_support / (sigma_support * std::sqrt(2.0 * std::log(double(count_support))));
      norm_zero_sum += max_zero / (sigma_zero * std::sqrt(2.0 * std::log(double(count_zero))));
      ++norm_count;
    }
  }
  result.fraction = result.evaluated > 0 ? double(dominant) / result.evaluated : 1.0;
  if (norm_count > 0) {
    result.mean_norm_support = norm_support_sum / norm_count;
    result.mean_norm_zero = norm_zero_sum / norm_count;
  }
  return result;
}

}  // namespace linf
