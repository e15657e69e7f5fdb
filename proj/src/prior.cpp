#include "linf/prior.hpp"

#include <cmath>
#include <cstdlib>

#include "linf/errors.hpp"

namespace linf {

namespace {

void validate_mixture(const MixtureGaussianPrior& p) {
  if (p.weights.empty() || p.weights.size() != p.variances.size())
    throw ParameterError("mixture prior: weights and variances must be nonempty and equal-length");
  double total = 0.0;
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    if (p.weights[k] < 0.0) throw ParameterError("mixture prior: negative weight");
    if (p.variances[k] < 0.0) throw ParameterError("mixture prior: negative variance");
    total += p.weights[k];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ParameterError("mixture prior: weights must sum to 1");
}

void validate_sparse_gaussian(const SparseGaussianPrior& p) {
  if (p.sparsity < 0.0 || p.sparsity > 1.0)
    throw ParameterError("sparse gaussian prior: sparsity must be in [0,1]");
  if (p.variance < 0.0) throw ParameterError("sparse gaussian prior: negative variance");
}

void validate_sparse_weibull(const SparseWeibullPrior& p) {
  if (p.sparsity < 0.0 || p.sparsity > 1.0)
    throw ParameterError("sparse weibull prior: sparsity must be in [0,1]");
  if (!(p.scale > 0.0) || !(p.shape > 0.0))
    throw ParameterError("sparse weibull prior: scale and shape must be > 0");
}

}  // namespace

void validate(const PriorSpec& prior) {
  std::visit([](const auto& p) {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, MixtureGaussianPrior>) validate_mixture(p);
    else if constexpr (std::is_same_v<T, SparseGaussianPrior>) validate_sparse_gaussian(p);
    else validate_sparse_weibull(p);
  }, prior);
}

double prior_mean(const PriorSpec& prior) {
  if (const auto* w = std::get_if<SparseWeibullPrior>(&prior))
    return w->sparsity * w->scale * std::tgamma(1.0 + 1.0 / w->shape);
  return 0.0;  // Gaussian-family priors are symmetric about 0.
}

double prior_second_moment(const PriorSpec& prior) {
  return std::visit([](const auto& p) -> double {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, MixtureGaussianPrior>) {
      double m2 = 0.0;
      for (std::size_t k = 0; k < p.weights.size(); ++k) m2 += p.weights[k] * p.variances[k];
      return m2;
    } else if constexpr (std::is_same_v<T, SparseGaussianPrior>) {
      return p.sparsity * p.variance;
    } else {
      return p.sparsity * p.scale * p.scale * std::tgamma(1.0 + 2.0 / p.shape);
    }
  }, prior);
}

double prior_variance(const PriorSpec& prior) {
  const double mean = prior_mean(prior);
  return prior_second_moment(prior) - mean * mean;
}

bool is_gaussian_family(const PriorSpec& prior) {
  return !std::holds_alternative<SparseWeibullPrior>(prior);
}

std::string prior_name(const PriorSpec& prior) {
  if (std::holds_alternative<MixtureGaussianPrior>(prior)) return "mixture-gaussian";
  if (std::holds_alternative<SparseGaussianPrior>(prior)) return "sparse-gaussian";
  return "sparse-weibull";
}

SpikeSlabView spike_slab_view(const PriorSpec& prior) {
  validate(prior);
  SpikeSlabView view;
  if (const auto* m = std::get_if<MixtureGaussianPrior>(&prior)) {
    for (std::size_t k = 0; k < m->weights.size(); ++k) {
      if (m->weights[k] == 0.0) continue;
      if (m->variances[k] > 0.0) {
        view.slab_weights.push_back(m->weights[k]);
        view.slab_variances.push_back(m->variances[k]);
      } else {
        view.spike_weight += m->weights[k];
      }
    }
  } else if (const auto* s = std::get_if<SparseGaussianPrior>(&prior)) {
    view.spike_weight = 1.0 - s->sparsity;
    if (s->sparsity > 0.0) {
      if (s->variance > 0.0) {
        view.slab_weights.push_back(s->sparsity);
        view.slab_variances.push_back(s->variance);
      } else {
        view.spike_weight = 1.0;
      }
    }
  } else {
    throw ParameterError("spike_slab_view: prior is not Gaussian-family");
  }
  return view;
}

double max_component_variance(const PriorSpec& prior) {
  const auto view = spike_slab_view(prior);
  double mu_max = 0.0;
  for (double v : view.slab_variances) mu_max = std::max(mu_max, v);
  return mu_max;
}

void validate(const ChannelSpec& channel) {
  if (const auto* g = std::get_if<GaussianChannel>(&channel)) {
    if (!(g->noise_variance > 0.0))
      throw ParameterError("gaussian channel: noise variance must be > 0");
  } else {
    if (!(std::get<PoissonChannel>(channel).scale > 0.0))
      throw ParameterError("poisson channel: scale must be > 0");
  }
}

std::string channel_name(const ChannelSpec& channel) {
  return std::holds_alternative<GaussianChannel>(channel) ? "gaussian" : "poisson";
}

}  // namespace linf
