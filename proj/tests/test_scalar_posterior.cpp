#include <doctest.h>

#include <cmath>

#include "linf/errors.hpp"
#include "linf/rng.hpp"
#include "linf/scalar_posterior.hpp"

using namespace linf;

namespace {

// Trapezoid-rule oracle for posterior moments under a Gaussian-family prior:
// integrates x^k f_X(x) N(q; x, mu_v) on [lo, hi].
Moments quadrature_moments(const SpikeSlabView& view, double q, double mu_v, double lo, double hi,
                           int cells) {
  const double h = (hi - lo) / cells;
  long double mass = 0.0L, first = 0.0L, second = 0.0L;
  for (int i = 0; i <= cells; ++i) {
    const double x = lo + i * h;
    double density = 0.0;
    for (std::size_t k = 0; k < view.slab_weights.size(); ++k) {
      density += view.slab_weights[k] * std::exp(log_normal_pdf(x, 0.0, view.slab_variances[k]));
    }
    double value = density * std::exp(log_normal_pdf(q, x, mu_v));
    if (i == 0 || i == cells) value *= 0.5;
    mass += value;
    first += value * x;
    second += value * x * x;
  }
  // the spike contributes mass at x = 0 only
  const long double spike = view.spike_weight * std::exp(log_normal_pdf(q, 0.0, mu_v)) / h;
  mass += spike;
  const double mean = double(first / mass);
  const double ex2 = double(second / mass);
  return {mean, ex2 - mean * mean};
}

}  // namespace

TEST_CASE("single gaussian prior reduces to the wiener-gain posterior") {
  const PriorSpec prior = MixtureGaussianPrior{{1.0}, {2.0}};
  const ClosedFormPosterior post = posterior_gaussian_mixture(prior, 1.3, 0.5);
  CHECK(post.spike_weight == 0.0);
  REQUIRE(post.components.size() == 1);
  CHECK(post.components[0].weight == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(post.components[0].mean == doctest::Approx(2.0 * 1.3 / 2.5).epsilon(1e-12));
  CHECK(post.components[0].variance == doctest::Approx(2.0 * 0.5 / 2.5).epsilon(1e-12));
}

TEST_CASE("spike-slab posterior at q = 0") {
  // spike ~ (1-s) N(0;0,mu_v), slab ~ s N(0;0,mu_x+mu_v): ratio is sqrt(2)
  const PriorSpec prior = SparseGaussianPrior{0.5, 1.0};
  const ClosedFormPosterior post = posterior_gaussian_mixture(prior, 0.0, 1.0);
  const double expected_spike = std::sqrt(2.0) / (std::sqrt(2.0) + 1.0);
  CHECK(post.spike_weight == doctest::Approx(expected_spike).epsilon(1e-9));
  REQUIRE(post.components.size() == 1);
  CHECK(post.components[0].weight == doctest::Approx(1.0 - expected_spike).epsilon(1e-9));
  CHECK(post.components[0].mean == 0.0);
  CHECK(post.components[0].variance == doctest::Approx(0.5).epsilon(1e-12));

  const Moments mom = posterior_moments(ScalarPosterior(post));
  CHECK(mom.mean == 0.0);
  CHECK(mom.variance == doctest::Approx(0.4142135624 * 0.5).epsilon(1e-6));
}

TEST_CASE("three-component mixture matches a quadrature oracle") {
  const PriorSpec prior = MixtureGaussianPrior{{0.2, 0.3, 0.5}, {10.0, 1.0, 0.5}};
  const double q = 3.0, mu_v = 0.1;
  const ClosedFormPosterior post = posterior_gaussian_mixture(prior, q, mu_v);
  const Moments closed = posterior_moments(ScalarPosterior(post));
  const Moments oracle =
      quadrature_moments(spike_slab_view(prior), q, mu_v, q - 4.0, q + 4.0, 4000000);
  CHECK(closed.mean == doctest::Approx(oracle.mean).epsilon(1e-8));
  CHECK(closed.variance == doctest::Approx(oracle.variance).epsilon(1e-7));
}

TEST_CASE("posterior weights are normalized even at extreme snr") {
  CounterRng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const double mu_v = std::pow(10.0, -6.0 + 6.0 * rng.uniform01());
    const double q = rng.normal(0.0, 2.0);
    const PriorSpec prior = SparseGaussianPrior{0.05, 1.0};
    const ClosedFormPosterior post = posterior_gaussian_mixture(prior, q, mu_v);
    double total = post.spike_weight;
    for (const auto& c : post.components) total += c.weight;
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("grid posterior agrees with the closed form for gaussian priors") {
  CounterRng rng(77);
  const PriorSpec sparse = SparseGaussianPrior{0.1, 1.0};
  const PriorSpec mix = MixtureGaussianPrior{{0.2, 0.3, 0.5}, {10.0, 1.0, 0.5}};
  for (const PriorSpec& prior : {sparse, mix}) {
    const double mu_max = max_component_variance(prior);
    for (int rep = 0; rep < 25; ++rep) {
      const double mu_v = std::pow(10.0, -3.0 + 3.0 * rng.uniform01());
      const double q = rng.normal(0.0, std::sqrt(mu_max + mu_v) * 2.0);
      const Moments a = posterior_moments(
          ScalarPosterior(posterior_gaussian_mixture(prior, q, mu_v)));
      const Moments b = posterior_moments(ScalarPosterior(posterior_grid(prior, q, mu_v)));
      CHECK(std::abs(a.mean - b.mean) < 1e-6);
      CHECK(std::abs(a.variance - b.variance) < 1e-6);
    }
  }
}

TEST_CASE("grid normalization includes the spike") {
  const GridPosterior post = posterior_grid(SparseGaussianPrior{0.05, 1.0}, 0.03, 5e-4);
  CHECK(std::abs(post.masses.sum() + post.spike_weight - 1.0) < 1e-8);
  CHECK(post.spike_weight > 0.0);
  bool increasing = true;
  for (Eigen::Index g = 1; g < post.abscissae.size(); ++g)
    increasing = increasing && post.abscissae[g] > post.abscissae[g - 1];
  CHECK(increasing);
}

TEST_CASE("weibull grid posterior matches an importance-sampling oracle") {
  const SparseWeibullPrior prior{0.05, 1.0, 0.5};
  const double q = 2.0, mu_v = 0.01;
  const GridPosterior post = posterior_grid(PriorSpec(prior), q, mu_v);
  const double grid_mean = posterior_moments(post).mean;

  // self-normalized importance sampling with the prior as proposal
  CounterRng rng(123456);
  const int draws = 10000000;
  long double wsum = 0.0L, wx = 0.0L;
  std::vector<double> xs, ws;
  xs.reserve(draws / 10);
  ws.reserve(draws / 10);
  for (int i = 0; i < draws; ++i) {
    const double x = rng.uniform01() <= prior.sparsity ? rng.weibull(prior.scale, prior.shape)
                                                       : 0.0;
    const double w = std::exp(log_normal_pdf(q, x, mu_v));
    wsum += w;
    wx += w * x;
    if (w > 0.0) {
      xs.push_back(x);
      ws.push_back(w);
    }
  }
  const double oracle_mean = double(wx / wsum);
  long double se_num = 0.0L;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const long double d = ws[i] * (xs[i] - oracle_mean);
    se_num += d * d;
  }
  const double oracle_se = double(std::sqrt(se_num) / wsum);
  CHECK(std::abs(grid_mean - oracle_mean) < 2.0 * oracle_se + 1e-6);
}

TEST_CASE("flat prior times flat likelihood gives equal grid masses") {
  GridPolicy policy;
  policy.resolution = 64;
  policy.explicit_span = {{-1.0, 1.0}};
  const PriorSpec prior = MixtureGaussianPrior{{1.0}, {1e12}};
  const GridPosterior post = posterior_grid(prior, 0.0, 1e12, policy);
  const double lo = post.masses.minCoeff();
  const double hi = post.masses.maxCoeff();
  CHECK(hi / lo - 1.0 < 1e-8);
  CHECK(post.masses.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("posterior moments identities") {
  ClosedFormPosterior single;
  single.components = {{1.0, 2.0, 3.0}};
  const Moments a = posterior_moments(single);
  CHECK(a.mean == 2.0);
  CHECK(a.variance == 3.0);

  ClosedFormPosterior two_point;
  two_point.spike_weight = 0.5;
  two_point.components = {{0.5, 2.0, 0.0}};
  const Moments b = posterior_moments(two_point);
  CHECK(b.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.variance == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("vanishing effective noise pins the posterior to the observation") {
  const PriorSpec prior = SparseGaussianPrior{0.5, 1.0};
  const double q = 0.7;
  const Moments mom =
      posterior_moments(ScalarPosterior(posterior_gaussian_mixture(prior, q, 1e-12)));
  CHECK(std::abs(mom.mean - q) < 1e-5);
}

TEST_CASE("symmetric priors give mirror-image posteriors") {
  CounterRng rng(8);
  const PriorSpec prior = MixtureGaussianPrior{{0.4, 0.6}, {3.0, 0.2}};
  for (int rep = 0; rep < 50; ++rep) {
    const double q = rng.normal(0.0, 2.0);
    const double mu_v = 0.01 + rng.uniform01();
    const ClosedFormPosterior a = posterior_gaussian_mixture(prior, q, mu_v);
    const ClosedFormPosterior b = posterior_gaussian_mixture(prior, -q, mu_v);
    CHECK(std::abs(a.spike_weight - b.spike_weight) < 1e-12);
    for (std::size_t k = 0; k < a.components.size(); ++k) {
      CHECK(std::abs(a.components[k].weight - b.components[k].weight) < 1e-12);
      CHECK(std::abs(a.components[k].mean + b.components[k].mean) < 1e-12);
      CHECK(std::abs(a.components[k].variance - b.components[k].variance) < 1e-12);
    }
  }
}

TEST_CASE("posterior error paths") {
  const PriorSpec prior = SparseGaussianPrior{0.5, 1.0};
  CHECK_THROWS_AS(posterior_gaussian_mixture(prior, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(posterior_gaussian_mixture(prior, 0.0, -1.0), DomainError);
  CHECK_THROWS_AS(posterior_gaussian_mixture(SparseWeibullPrior{0.5, 1.0, 0.5}, 0.0, 1.0),
                  ParameterError);

  GridPolicy coarse;
  coarse.resolution = 32;
  CHECK_THROWS_AS(posterior_grid(prior, 0.0, 1.0, coarse), ParameterError);

  // all-slab prior with the grid forced far enough away that every log mass
  // underflows to -inf
  GridPolicy lost;
  lost.explicit_span = {{1e160, 1e160 + 1.0}};
  const PriorSpec pure_slab = MixtureGaussianPrior{{1.0}, {1.0}};
  CHECK_THROWS_AS(posterior_grid(pure_slab, 0.0, 1e-4, lost), DegeneratePosteriorError);
}

TEST_CASE("likelihood-adapted grids resolve tiny noise variances") {
  const PriorSpec prior = SparseWeibullPrior{0.05, 1.0, 0.5};
  GridPolicy policy;
  policy.resolution = 512;
  policy.span = GridPolicy::Span::LikelihoodAdapted;
  const double q = 1.7, mu_v = 1e-4;
  const GridPosterior post = posterior_grid(prior, q, mu_v, policy);
  const Moments mom = posterior_moments(post);
  // the slab dominates at q >> noise scale, so the mean must track q closely
  CHECK(post.spike_weight < 1e-10);
  CHECK(std::abs(mom.mean - q) < 0.05);
}
