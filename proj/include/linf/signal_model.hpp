#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "linf/prior.hpp"

namespace linf {

// A signal together with the latent component of each entry: the mixture
// component index for mixture priors, 0 (slab) or -1 (zero atom) for sparse
// priors. Consumers that need exact support sets read the labels instead of
// thresholding values.
struct LabeledSignal {
  Eigen::VectorXd values;
  std::vector<std::int32_t> labels;
};

// i.i.d. draw of length n from the prior; deterministic given (prior, n, seed).
Eigen::VectorXd sample_signal(const PriorSpec& prior, Eigen::Index n, std::uint64_t seed);
LabeledSignal sample_signal_labeled(const PriorSpec& prior, Eigen::Index n, std::uint64_t seed);

// Bernoulli(0.5) {0,1} entries, rows rescaled to unit Euclidean norm. A row
// that comes out all-zero is resampled from the next draws of the stream.
Eigen::MatrixXd sample_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed);

// Pushes noiseless measurements w through the channel. Poisson rates are
// clamped at 0; a rate below -1e-9 throws DomainError.
Eigen::VectorXd apply_channel(const ChannelSpec& channel, const Eigen::VectorXd& w,
                              std::uint64_t seed);

// Noise variance giving the requested SNR against the prior's power
// E[x^2]: returns E[x^2] / 10^(snr_db/10). Throws DomainError when E[x^2] = 0.
double snr_to_noise_variance(const PriorSpec& prior, double snr_db);

// One linear mixing draw: y = channel(Phi x) with Phi the row-normalized
// Bernoulli matrix.
struct LinearMixingInstance {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd signal;
  Eigen::VectorXd measurements;   // Phi * signal
  Eigen::VectorXd observations;   // channel output
};

LinearMixingInstance make_lms_instance(const PriorSpec& prior, const ChannelSpec& channel,
                                       Eigen::Index m, Eigen::Index n, std::uint64_t seed);

}  // namespace linf
