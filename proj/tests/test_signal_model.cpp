#include <doctest.h>

#include <cmath>

#include "linf/errors.hpp"
#include "linf/signal_model.hpp"

using namespace linf;

TEST_CASE("zero-sparsity and zero-variance priors produce the zero signal") {
  const Eigen::VectorXd a = sample_signal(SparseGaussianPrior{0.0, 1.0}, 5, 1);
  CHECK(a.cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd b = sample_signal(MixtureGaussianPrior{{1.0}, {0.0}}, 5, 1);
  CHECK(b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sparse gaussian second moment obeys the law of large numbers") {
  const double s = 0.05;
  const Eigen::Index n = 1000000;
  const Eigen::VectorXd x = sample_signal(SparseGaussianPrior{s, 1.0}, n, 2024);
  const double second_moment = x.squaredNorm() / double(n);
  CHECK(std::abs(second_moment - s) < s * 3.0 / std::sqrt(double(n) * s));
}

TEST_CASE("sparse signals hit the binomial support band and exact zeros") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const double s = 0.05;
    const Eigen::Index n = 100000;
    const LabeledSignal sig = sample_signal_labeled(SparseGaussianPrior{s, 1.0}, n, seed);
    Eigen::Index nonzero = 0;
    bool labels_consistent = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (sig.labels[std::size_t(i)] == 0) {
        labels_consistent = labels_consistent && sig.values[i] != 0.0;
        ++nonzero;
      } else {
        labels_consistent = labels_consistent && sig.values[i] == 0.0;
      }
    }
    CHECK(labels_consistent);
    const double fraction = double(nonzero) / double(n);
    CHECK(std::abs(fraction - s) <= 3.0 * std::sqrt(s * (1.0 - s) / double(n)));
  }
}

TEST_CASE("weibull slab draws are positive and labeled") {
  const LabeledSignal sig = sample_signal_labeled(SparseWeibullPrior{0.5, 1.0, 0.5}, 10000, 7);
  bool consistent = true;
  for (Eigen::Index i = 0; i < sig.values.size(); ++i) {
    if (sig.labels[std::size_t(i)] == 0)
      consistent = consistent && sig.values[i] > 0.0;
    else
      consistent = consistent && sig.values[i] == 0.0;
  }
  CHECK(consistent);
}

TEST_CASE("sampling is deterministic in the seed") {
  const PriorSpec prior = SparseGaussianPrior{0.3, 2.0};
  const Eigen::VectorXd a = sample_signal(prior, 512, 99);
  const Eigen::VectorXd b = sample_signal(prior, 512, 99);
  const Eigen::VectorXd c = sample_signal(prior, 512, 100);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("measurement matrices have unit rows and binary support") {
  const Eigen::MatrixXd one = sample_matrix(1, 1, 3);
  CHECK(one(0, 0) == 1.0);

  for (std::uint64_t seed : {11ull, 12ull}) {
    const Eigen::MatrixXd phi = sample_matrix(40, 64, seed);
    for (Eigen::Index i = 0; i < phi.rows(); ++i)
      CHECK(std::abs(phi.row(i).norm() - 1.0) < 1e-9);
  }

  const Eigen::MatrixXd big = sample_matrix(100, 1000, 5);
  const double fraction = double((big.array() != 0.0).count()) / double(big.size());
  CHECK(fraction > 0.45);
  CHECK(fraction < 0.55);

  CHECK_THROWS_AS(sample_matrix(0, 5, 1), ParameterError);
}

TEST_CASE("gaussian channel examples") {
  Eigen::VectorXd w(3);
  w << 1, 2, 3;
  const Eigen::VectorXd y = apply_channel(GaussianChannel{1e-30}, w, 4);
  CHECK((y - w).cwiseAbs().maxCoeff() < 1e-10);

  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(1000000);
  const Eigen::VectorXd noisy = apply_channel(GaussianChannel{0.1}, zeros, 8);
  const double var = noisy.squaredNorm() / double(noisy.size());
  CHECK(std::abs(var - 0.1) < 0.001);
}

TEST_CASE("poisson channel examples and rate clamping") {
  const Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd y = apply_channel(PoissonChannel{100.0}, zero2, 4);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);

  Eigen::VectorXd tiny_negative(1);
  tiny_negative << -1e-12;  // rate -1e-10, inside the clamping tolerance
  CHECK(apply_channel(PoissonChannel{100.0}, tiny_negative, 4)[0] == 0.0);

  Eigen::VectorXd bad(1);
  bad << -1.0;
  CHECK_THROWS_AS(apply_channel(PoissonChannel{100.0}, bad, 4), DomainError);
}

TEST_CASE("snr calibration") {
  CHECK(snr_to_noise_variance(SparseGaussianPrior{0.05, 1.0}, 20.0) ==
        doctest::Approx(5e-4).epsilon(1e-12));
  const PriorSpec mix = MixtureGaussianPrior{{0.2, 0.3, 0.5}, {10.0, 1.0, 0.5}};
  CHECK(snr_to_noise_variance(mix, 0.0) == doctest::Approx(2.55).epsilon(1e-12));
  // sparse Weibull: E X^2 = s lambda^2 Gamma(1 + 2/k), Gamma(5) = 24
  CHECK(snr_to_noise_variance(SparseWeibullPrior{0.05, 1.0, 0.5}, 20.0) ==
        doctest::Approx(0.012).epsilon(1e-12));
  CHECK_THROWS_AS(snr_to_noise_variance(SparseGaussianPrior{0.0, 1.0}, 20.0), DomainError);
}

TEST_CASE("linear mixing instances satisfy their construction invariants") {
  const PriorSpec prior = SparseWeibullPrior{0.05, 1.0, 0.5};
  const LinearMixingInstance inst = make_lms_instance(prior, PoissonChannel{100.0}, 30, 100, 21);
  CHECK((inst.measurements - inst.matrix * inst.signal).norm() <=
        1e-9 * std::max(1.0, inst.measurements.norm()));
  for (Eigen::Index i = 0; i < inst.matrix.rows(); ++i)
    CHECK(std::abs(inst.matrix.row(i).norm() - 1.0) < 1e-9);
  bool counts_ok = true;
  for (Eigen::Index i = 0; i < inst.observations.size(); ++i) {
    counts_ok = counts_ok && inst.observations[i] >= 0.0 &&
                inst.observations[i] == std::floor(inst.observations[i]);
  }
  CHECK(counts_ok);
}

TEST_CASE("invalid prior parameters are rejected") {
  CHECK_THROWS_AS(sample_signal(MixtureGaussianPrior{{0.5, 0.4}, {1.0, 1.0}}, 4, 1),
                  ParameterError);
  CHECK_THROWS_AS(sample_signal(SparseGaussianPrior{1.5, 1.0}, 4, 1), ParameterError);
  CHECK_THROWS_AS(sample_signal(SparseWeibullPrior{0.5, -1.0, 0.5}, 4, 1), ParameterError);
  CHECK_THROWS_AS(sample_signal(SparseGaussianPrior{0.5, 1.0}, 0, 1), ParameterError);
}
