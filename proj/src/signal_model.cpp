#include "linf/signal_model.hpp"

#include <cmath>

#include "linf/errors.hpp"
#include "linf/rng.hpp"

namespace linf {

namespace {

// Sub-stream ids so signal, matrix and channel draws never overlap for a
// shared seed.
constexpr std::uint64_t kSignalStream = 1;
constexpr std::uint64_t kMatrixStream = 2;
constexpr std::uint64_t kChannelStream = 3;

std::int32_t pick_component(const std::vector<double>& weights, double u) {
  double cum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    cum += weights[k];
    if (u <= cum) return std::int32_t(k);
  }
  return std::int32_t(weights.size()) - 1;
}

}  // namespace

LabeledSignal sample_signal_labeled(const PriorSpec& prior, Eigen::Index n, std::uint64_t seed) {
  validate(prior);
  if (n < 1) throw ParameterError("sample_signal: length must be >= 1");
  LabeledSignal out;
  out.values.resize(n);
  out.labels.resize(std::size_t(n));
  CounterRng rng(seed, kSignalStream);

  if (const auto* m = std::get_if<MixtureGaussianPrior>(&prior)) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::int32_t k = pick_component(m->weights, rng.uniform01());
      const double sd = std::sqrt(m->variances[std::size_t(k)]);
      out.values[i] = sd > 0.0 ? rng.normal(0.0, sd) : 0.0;
      out.labels[std::size_t(i)] = k;
    }
  } else if (const auto* s = std::get_if<SparseGaussianPrior>(&prior)) {
    const double sd = std::sqrt(s->variance);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (rng.uniform01() <= s->sparsity) {
        out.values[i] = sd > 0.0 ? rng.normal(0.0, sd) : 0.0;
        out.labels[std::size_t(i)] = 0;
      } else {
        out.values[i] = 0.0;
        out.labels[std::size_t(i)] = -1;
      }
    }
  } else {
    const auto& w = std::get<SparseWeibullPrior>(prior);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (rng.uniform01() <= w.sparsity) {
        out.values[i] = rng.weibull(w.scale, w.shape);
        out.labels[std::size_t(i)] = 0;
      } else {
        out.values[i] = 0.0;
        out.labels[std::size_t(i)] = -1;
      }
    }
  }
  return out;
}

Eigen::VectorXd sample_signal(const PriorSpec& prior, Eigen::Index n, std::uint64_t seed) {
  return sample_signal_labeled(prior, n, seed).values;
}

Eigen::MatrixXd sample_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ParameterError("sample_matrix: dimensions must be >= 1");
  CounterRng rng(seed, kMatrixStream);
  Eigen::MatrixXd phi(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double e = rng.uniform01() < 0.5 ? 0.0 : 1.0;
        phi(i, j) = e;
        norm_sq += e;
      }
    } while (norm_sq == 0.0);
    phi.row(i) /= std::sqrt(norm_sq);
  }
  return phi;
}

Eigen::VectorXd apply_channel(const ChannelSpec& channel, const Eigen::VectorXd& w,
                              std::uint64_t seed) {
  validate(channel);
  CounterRng rng(seed, kChannelStream);
  Eigen::VectorXd y(w.size());
  if (const auto* g = std::get_if<GaussianChannel>(&channel)) {
    const double sd = std::sqrt(g->noise_variance);
    for (Eigen::Index i = 0; i < w.size(); ++i) y[i] = w[i] + rng.normal(0.0, sd);
  } else {
    const double alpha = std::get<PoissonChannel>(channel).scale;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double rate = alpha * w[i];
      if (rate < -1e-9) throw DomainError("apply_channel: negative Poisson rate");
      y[i] = double(rng.poisson(std::max(rate, 0.0)));
    }
  }
  return y;
}

double snr_to_noise_variance(const PriorSpec& prior, double snr_db) {
  validate(prior);
  const double power = prior_second_moment(prior);
  if (!(power > 0.0)) throw DomainError("snr_to_noise_variance: prior has zero power");
  return power / std::pow(10.0, snr_db / 10.0);
}

LinearMixingInstance make_lms_instance(const PriorSpec& prior, const ChannelSpec& channel,
                                       Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  LinearMixingInstance inst;
  inst.signal = sample_signal(prior, n, seed);
  inst.matrix = sample_matrix(m, n, seed);
  inst.measurements = inst.matrix * inst.signal;
  inst.observations = apply_channel(channel, inst.measurements, seed);
  return inst;
}

}  // namespace linf
