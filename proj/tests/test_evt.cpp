#include <doctest.h>

#include <cmath>
#include <numbers>

#include "linf/errors.hpp"
#include "linf/evt.hpp"

using namespace linf;

TEST_CASE("sigma pattern closed forms") {
  const ErrorPatternStats zero = sigma_pattern(0.0, 1.0);
  CHECK(zero.gain == 0.0);
  CHECK(zero.sigma_support == 0.0);
  CHECK(zero.sigma_zero == 0.0);

  const ErrorPatternStats even = sigma_pattern(1.0, 1.0);
  CHECK(even.gain == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(even.sigma_support == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(even.sigma_zero == doctest::Approx(0.5).epsilon(1e-12));

  const ErrorPatternStats paper = sigma_pattern(1.0, 5e-4);
  CHECK(paper.gain == doctest::Approx(1.0 / 1.0005).epsilon(1e-12));
  CHECK(paper.sigma_zero == doctest::Approx(paper.gain * std::sqrt(5e-4)).epsilon(1e-12));
  CHECK(paper.sigma_zero == doctest::Approx(0.022350).epsilon(1e-4));
  CHECK(paper.sigma_support > paper.sigma_zero);

  CHECK_THROWS_AS(sigma_pattern(1.0, 0.0), DomainError);
}

TEST_CASE("sigma_support strictly dominates sigma_zero for positive variances") {
  for (double mu_x : {0.1, 1.0, 7.5}) {
    for (double mu_z : {1e-4, 0.3, 2.0}) {
      const ErrorPatternStats stats = sigma_pattern(mu_x, mu_z);
      CHECK(stats.sigma_support > stats.sigma_zero);
    }
  }
}

TEST_CASE("normalized maximum of a zero sample is zero") {
  CHECK(max_over_sqrt_2logn(Eigen::VectorXd::Zero(16)) == 0.0);
  CHECK_THROWS_AS(max_over_sqrt_2logn(Eigen::VectorXd::Zero(1)), ParameterError);
}

TEST_CASE("berman ratio at n=2 matches the closed-form expectation") {
  // E[max of two standard normals] = 1/sqrt(pi)
  const BermanResult result = berman_ratio(2, 100000, 17);
  const double expected = (1.0 / std::sqrt(std::numbers::pi)) / std::sqrt(2.0 * std::log(2.0));
  const double se = result.stddev_ratio / std::sqrt(double(result.trials));
  CHECK(std::abs(result.mean_ratio - expected) < 4.0 * se);
  CHECK(expected == doctest::Approx(0.479).epsilon(2e-3));
}

TEST_CASE("berman ratio concentrates near 1 for large n") {
  const BermanResult result = berman_ratio(1000000, 10, 23);
  CHECK(result.mean_ratio > 0.9);
  CHECK(result.mean_ratio < 1.0);
  CHECK_THROWS_AS(berman_ratio(1, 10, 1), ParameterError);
  CHECK_THROWS_AS(berman_ratio(10, 0, 1), ParameterError);
}

TEST_CASE("berman ratio mean is nondecreasing in n within 2 standard errors") {
  double prev_mean = -1.0, prev_se = 0.0;
  for (Eigen::Index n : {100, 1000, 10000, 100000}) {
    const BermanResult result = berman_ratio(n, 50, 29);
    const double se = result.stddev_ratio / std::sqrt(50.0);
    if (prev_mean >= 0.0)
      CHECK(result.mean_ratio >= prev_mean - 2.0 * std::sqrt(se * se + prev_se * prev_se));
    prev_mean = result.mean_ratio;
    prev_se = se;
  }
}

TEST_CASE("support errors dominate when the noise is strong") {
  // sigma_1/sigma_2 = sqrt(1 + mu_z/mu_x) = sqrt(5) here, far above the
  // finite-n log-ratio correction, so the support max should win essentially
  // always.
  const PriorSpec prior = SparseGaussianPrior{0.05, 1.0};
  const DominanceResult result = support_dominance(prior, 4.0, 10000, 100, 37);
  CHECK(result.evaluated == 100);
  CHECK(result.skipped == 0);
  CHECK(result.fraction >= 0.95);
  CHECK(result.mean_norm_support > 0.7);
  CHECK(result.mean_norm_support < 1.2);
  CHECK(result.mean_norm_zero > 0.7);
  CHECK(result.mean_norm_zero < 1.2);
}

TEST_CASE("all-support prior skips every trial and reports vacuous dominance") {
  const PriorSpec prior = SparseGaussianPrior{1.0, 1.0};
  const DominanceResult result = support_dominance(prior, 0.5, 100, 20, 5);
  CHECK(result.evaluated == 0);
  CHECK(result.skipped == 20);
  CHECK(result.fraction == 1.0);
}

TEST_CASE("mixture dominance uses the largest-variance component") {
  const PriorSpec prior = MixtureGaussianPrior{{0.3, 0.7}, {10.0, 0.1}};
  const DominanceResult result = support_dominance(prior, 10.0, 20000, 50, 11);
  CHECK(result.evaluated == 50);
  CHECK(result.fraction >= 0.9);
}

TEST_CASE("dominance parameter validation") {
  CHECK_THROWS_AS(support_dominance(SparseGaussianPrior{0.0, 1.0}, 1.0, 10, 5, 1),
                  ParameterError);
  CHECK_THROWS_AS(support_dominance(SparseWeibullPrior{0.5, 1.0, 0.5}, 1.0, 10, 5, 1),
                  ParameterError);
  CHECK_THROWS_AS(support_dominance(MixtureGaussianPrior{{0.5, 0.5}, {1.0, 1.0}}, 1.0, 10, 5, 1),
                  ParameterError);
  CHECK_THROWS_AS(support_dominance(SparseGaussianPrior{0.5, 1.0}, 0.0, 10, 5, 1), DomainError);
}

TEST_CASE("dominance fraction does not decay as n grows") {
  const PriorSpec prior = SparseGaussianPrior{0.05, 1.0};
  double prev = -1.0;
  for (Eigen::Index n : {1000, 10000, 100000}) {
    const DominanceResult result = support_dominance(prior, 1.0, n, 100, 41);
    const double se = std::sqrt(result.fraction * (1.0 - result.fraction) / 100.0) + 1e-9;
    if (prev >= 0.0) CHECK(result.fraction >= prev - 2.5 * se);
    prev = result.fraction;
  }
}
