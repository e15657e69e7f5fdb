#pragma once

#include <string>
#include <variant>
#include <vector>

namespace linf {

// x_i ~ sum_k weights[k] * N(0, variances[k]). A zero-variance component is a
// point mass at the origin.
struct MixtureGaussianPrior {
  std::vector<double> weights;
  std::vector<double> variances;
};

// x_i ~ sparsity * N(0, variance) + (1 - sparsity) * delta_0.
struct SparseGaussianPrior {
  double sparsity = 0.0;
  double variance = 1.0;
};

// x_i is 0 with probability 1 - sparsity, otherwise Weibull(scale, shape).
struct SparseWeibullPrior {
  double sparsity = 0.0;
  double scale = 1.0;
  double shape = 1.0;
};

using PriorSpec = std::variant<MixtureGaussianPrior, SparseGaussianPrior, SparseWeibullPrior>;

// Throws ParameterError unless weights sum to 1 (within 1e-12), weights and
// variances are nonnegative, sparsity is in [0,1], and scale/shape are > 0.
void validate(const PriorSpec& prior);

double prior_mean(const PriorSpec& prior);
double prior_second_moment(const PriorSpec& prior);
double prior_variance(const PriorSpec& prior);

bool is_gaussian_family(const PriorSpec& prior);
std::string prior_name(const PriorSpec& prior);

// A Gaussian-family prior reduced to an explicit point mass at zero plus
// positive-variance slab components with normalized weights.
struct SpikeSlabView {
  double spike_weight = 0.0;
  std::vector<double> slab_weights;
  std::vector<double> slab_variances;
};

// Throws ParameterError for Weibull priors.
SpikeSlabView spike_slab_view(const PriorSpec& prior);

// Largest slab variance of a Gaussian-family prior.
double max_component_variance(const PriorSpec& prior);

// Additive noise y = w + N(0, noise_variance).
struct GaussianChannel {
  double noise_variance = 1.0;
};

// y ~ Poisson(scale * w), elementwise.
struct PoissonChannel {
  double scale = 1.0;
};

using ChannelSpec = std::variant<GaussianChannel, PoissonChannel>;

void validate(const ChannelSpec& channel);
std::string channel_name(const ChannelSpec& channel);

}  // namespace linf
