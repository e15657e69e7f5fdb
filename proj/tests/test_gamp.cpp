#include <doctest.h>

#include <cmath>

#include "linf/errors.hpp"
#include "linf/gamp.hpp"
#include "linf/rng.hpp"
#include "linf/signal_model.hpp"

using namespace linf;

TEST_CASE("gaussian output denoiser arithmetic") {
  auto [s0, mu0] = output_denoiser_gaussian(2.0, 0.5, 2.0, 0.5);
  CHECK(s0 == 0.0);
  CHECK(mu0 == 1.0);

  auto [s1, mu1] = output_denoiser_gaussian(1.0, 0.5, 2.0, 0.5);
  CHECK(s1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mu1 == doctest::Approx(1.0).epsilon(1e-14));

  auto [s2, mu2] = output_denoiser_gaussian(1.0, 0.5, 2.0, 1e12);
  CHECK(std::abs(s2) < 1e-11);
  CHECK(mu2 < 1e-11);

  CHECK_THROWS_AS(output_denoiser_gaussian(0.0, 0.0, 1.0, 1.0), DomainError);
}

TEST_CASE("poisson output denoiser limits") {
  // near-zero rate scale: the posterior is the (untruncated) gaussian prior
  auto [s, mu_s] = output_denoiser_poisson(5.0, 1e-4, 0.0, 1e-12);
  CHECK(std::abs(s) < 1e-6);
  CHECK(mu_s > 0.0);

  // y = 0 with a large scale pulls the mean below the prior mean
  auto [s_down, mu_down] = output_denoiser_poisson(0.5, 0.01, 0.0, 100.0);
  CHECK(s_down < 0.0);
  CHECK(mu_down > 0.0);

  CHECK_THROWS_AS(output_denoiser_poisson(0.5, 0.01, -1.0, 100.0), ParameterError);
  CHECK_THROWS_AS(output_denoiser_poisson(0.5, 0.01, 0.5, 100.0), ParameterError);
  CHECK_THROWS_AS(output_denoiser_poisson(0.5, 0.0, 0.0, 100.0), DomainError);
}

TEST_CASE("poisson output denoiser matches a dense trapezoid oracle") {
  const double p_hat = 0.5, mu_p = 0.01, alpha = 100.0, y = 50.0;
  // oracle: 1e6-point trapezoid of the posterior on w in [0, 2]
  const int cells = 1000000;
  const double lo = 0.0, hi = 2.0, h = (hi - lo) / cells;
  long double mass = 0.0L, first = 0.0L;
  const double log_scale = y * std::log(alpha) - std::lgamma(y + 1.0);
  for (int i = 0; i <= cells; ++i) {
    const double w = lo + i * h;
    double logv = -0.5 * (w - p_hat) * (w - p_hat) / mu_p - alpha * w + log_scale;
    logv += w > 0.0 ? y * std::log(w) : -std::numeric_limits<double>::infinity();
    double v = std::exp(logv);
    if (i == 0 || i == cells) v *= 0.5;
    mass += v;
    first += v * w;
  }
  const double oracle_mean = double(first / mass);
  const auto [s_hat, mu_s] = output_denoiser_poisson(p_hat, mu_p, y, alpha);
  const double mean = p_hat + mu_p * s_hat;
  CHECK(std::abs(mean - oracle_mean) < 1e-6);
  CHECK(mu_s > 0.0);
}

TEST_CASE("identity mixing with a concentrated prior returns the raw channel") {
  // For Phi = I and a prior much tighter than the channel noise, the
  // decoupled channel collapses onto the observations themselves.
  const Eigen::Index n = 40;
  const double mu_z = 1e-2, mu_prior = 1e-12;
  const PriorSpec prior = MixtureGaussianPrior{{1.0}, {mu_prior}};
  const Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(n, n);
  CounterRng rng(3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.normal(0.0, 0.5);

  GampConfig cfg;
  cfg.damping = 1.0;
  cfg.mean_removal = false;  // identity mixing has no mean component to strip
  const GampResult result = gamp_run(phi, y, prior, GaussianChannel{mu_z}, cfg);
  CHECK(result.converged);
  CHECK(result.trace.size() <= 3);
  CHECK((result.channel.pseudo_observations - y).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(result.channel.noise_variance - mu_z) < 1e-6);
}

TEST_CASE("gamp fixed point solves the linear-mmse normal equations") {
  const Eigen::Index n = 200, m = 100;
  const double mu1 = 1.0, mu_z = 0.01;
  const PriorSpec prior = MixtureGaussianPrior{{1.0}, {mu1}};
  const LinearMixingInstance inst =
      make_lms_instance(prior, GaussianChannel{mu_z}, m, n, 2027);

  GampConfig cfg;
  cfg.damping = 1.0;
  cfg.max_iterations = 500;
  const GampResult result = gamp_run(inst.matrix, inst.observations, prior,
                                     GaussianChannel{mu_z}, cfg);
  CHECK(result.converged);

  const Eigen::MatrixXd gram =
      mu1 * inst.matrix * inst.matrix.transpose() + mu_z * Eigen::MatrixXd::Identity(m, m);
  const Eigen::VectorXd lmmse =
      mu1 * inst.matrix.transpose() * gram.llt().solve(inst.observations);
  CHECK((result.posterior_mean - lmmse).norm() / lmmse.norm() < 1e-6);
}

TEST_CASE("permuting columns permutes the outputs") {
  const Eigen::Index n = 60, m = 24;
  const PriorSpec prior = SparseGaussianPrior{0.2, 1.0};
  const LinearMixingInstance inst = make_lms_instance(prior, GaussianChannel{0.01}, m, n, 31);

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[std::size_t(i)] = (i * 7 + 3) % n;
  Eigen::MatrixXd phi_p(m, n);
  for (Eigen::Index j = 0; j < n; ++j) phi_p.col(perm[std::size_t(j)]) = inst.matrix.col(j);

  const GampResult base = gamp_run(inst.matrix, inst.observations, prior, GaussianChannel{0.01});
  const GampResult permuted = gamp_run(phi_p, inst.observations, prior, GaussianChannel{0.01});
  CHECK(std::abs(base.channel.noise_variance - permuted.channel.noise_variance) < 1e-12);
  for (Eigen::Index j = 0; j < n; ++j) {
    CHECK(std::abs(base.channel.pseudo_observations[j] -
                   permuted.channel.pseudo_observations[perm[std::size_t(j)]]) < 1e-12);
    CHECK(std::abs(base.posterior_mean[j] - permuted.posterior_mean[perm[std::size_t(j)]]) <
          1e-12);
  }
}

TEST_CASE("trace keeps variances positive and residuals settle monotonically") {
  const PriorSpec prior = SparseGaussianPrior{0.05, 1.0};
  const double mu_z = snr_to_noise_variance(prior, 20.0);
  const LinearMixingInstance inst = make_lms_instance(prior, GaussianChannel{mu_z}, 150, 500, 5);
  GampConfig cfg;
  cfg.damping = 0.85;  // light damping reaches the tolerance instead of a ~1e-7 limit cycle
  const GampResult result =
      gamp_run(inst.matrix, inst.observations, prior, GaussianChannel{mu_z}, cfg);
  CHECK(result.converged);
  bool positive = true;
  for (const auto& stat : result.trace) positive = positive && stat.input_noise_variance > 0.0;
  CHECK(positive);
  const std::size_t count = result.trace.size();
  const std::size_t window = std::min<std::size_t>(10, count - 1);
  bool monotone = true;
  for (std::size_t i = count - window; i < count; ++i)
    monotone = monotone && result.trace[i].residual <= result.trace[i - 1].residual;
  CHECK(monotone);
}

TEST_CASE("effective noise variance is consistent with the realized errors") {
  // var(q - x) should track the reported mu_v on a mid-size instance
  const PriorSpec prior = SparseGaussianPrior{0.05, 1.0};
  const double mu_z = snr_to_noise_variance(prior, 20.0);
  double ratio_sum = 0.0;
  const int seeds = 5;
  for (int seed = 0; seed < seeds; ++seed) {
    const LinearMixingInstance inst =
        make_lms_instance(prior, GaussianChannel{mu_z}, 300, 1000, 100 + seed);
    const GampResult result =
        gamp_run(inst.matrix, inst.observations, prior, GaussianChannel{mu_z});
    const Eigen::VectorXd v = inst.signal - result.channel.pseudo_observations;
    const double var = (v.array() - v.mean()).square().sum() / double(v.size());
    ratio_sum += var / result.channel.noise_variance;
  }
  CHECK(std::abs(ratio_sum / seeds - 1.0) < 0.25);
}

TEST_CASE("dimension mismatches are rejected") {
  const Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(gamp_run(phi, y, SparseGaussianPrior{0.5, 1.0}, GaussianChannel{0.1}),
                  ParameterError);
  GampConfig bad;
  bad.damping = 0.0;
  CHECK_THROWS_AS(gamp_run(phi, Eigen::VectorXd::Zero(4), SparseGaussianPrior{0.5, 1.0},
                           GaussianChannel{0.1}, bad),
                  ParameterError);
}

TEST_CASE("weibull prior runs through the poisson pipeline") {
  const PriorSpec prior = SparseWeibullPrior{0.05, 1.0, 0.5};
  const LinearMixingInstance inst = make_lms_instance(prior, PoissonChannel{100.0}, 60, 200, 9);
  const GampResult result =
      gamp_run(inst.matrix, inst.observations, prior, PoissonChannel{100.0});
  CHECK(result.channel.noise_variance > 0.0);
  CHECK(result.posterior_mean.size() == 200);
  // estimates stay in the nonnegative support of the prior
  CHECK(result.posterior_mean.minCoeff() > -1e-9);
}
