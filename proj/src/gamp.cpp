#include "linf/gamp.hpp"

#include <cmath>
#include <limits>

#include "linf/errors.hpp"
#include "linf/quadrature.hpp"

namespace linf {

namespace {

constexpr int kPoissonQuadratureNodes = 257;

void check_gamp_config(const GampConfig& cfg) {
  if (cfg.max_iterations < 1) throw ParameterError("gamp: max_iterations must be >= 1");
  if (!(cfg.damping > 0.0) || cfg.damping > 1.0)
    throw ParameterError("gamp: damping must be in (0, 1]");
  if (!(cfg.tolerance > 0.0)) throw ParameterError("gamp: tolerance must be > 0");
  if (!(cfg.variance_floor > 0.0)) throw ParameterError("gamp: variance floor must be > 0");
}

}  // namespace

std::pair<double, double> output_denoiser_gaussian(double p_hat, double mu_p, double y,
                                                   double mu_z) {
  if (!(mu_p > 0.0) || !(mu_z > 0.0))
    throw DomainError("gaussian output denoiser: variances must be > 0");
  const double total = mu_p + mu_z;
  return {(y - p_hat) / total, 1.0 / total};
}

std::pair<double, double> output_denoiser_poisson(double p_hat, double mu_p, double y,
                                                  double alpha, double variance_floor) {
  if (!(mu_p > 0.0)) throw DomainError("poisson output denoiser: mu_p must be > 0");
  if (!(alpha > 0.0)) throw DomainError("poisson output denoiser: alpha must be > 0");
  if (y < 0.0 || std::abs(y - std::round(y)) > 1e-9)
    throw ParameterError("poisson output denoiser: y must be a nonnegative integer");

  // Posterior on w >= 0 is proportional to N(w; p_hat, mu_p) * Poisson(y; alpha w).
  // Its log density is strictly concave, so the mode solves a quadratic and the
  // mass lives within a few curvature widths of it.
  double mode;
  if (y > 0.0) {
    const double shift = alpha * mu_p - p_hat;
    mode = 0.5 * (-shift + std::sqrt(shift * shift + 4.0 * mu_p * y));
  } else {
    mode = std::max(p_hat - alpha * mu_p, 0.0);
  }
  const double curvature = 1.0 / mu_p + (mode > 0.0 && y > 0.0 ? y / (mode * mode) : 0.0);
  const double width = 15.0 / std::sqrt(curvature);
  const double lo = std::max(0.0, mode - width);
  const double hi = mode + width;
  if (!(hi > lo)) throw DegeneratePosteriorError("poisson output denoiser: empty window");

  const QuadratureRule& rule = gauss_legendre(kPoissonQuadratureNodes);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);

  double log_max = -std::numeric_limits<double>::infinity();
  Eigen::ArrayXd log_values(kPoissonQuadratureNodes);
  Eigen::ArrayXd w_values(kPoissonQuadratureNodes);
  for (int i = 0; i < kPoissonQuadratureNodes; ++i) {
    const double w = mid + half * rule.nodes[i];
    w_values[i] = w;
    double log_density = -0.5 * (w - p_hat) * (w - p_hat) / mu_p - alpha * w;
    if (y > 0.0) log_density += w > 0.0 ? y * std::log(w) : -std::numeric_limits<double>::infinity();
    log_values[i] = log_density + std::log(rule.weights[i] * half);
    log_max = std::max(log_max, log_values[i]);
  }
  if (!std::isfinite(log_max))
    throw DegeneratePosteriorError("poisson output denoiser: quadrature mass underflowed");

  double mass = 0.0, first = 0.0, second = 0.0;
  for (int i = 0; i < kPoissonQuadratureNodes; ++i) {
    const double v = std::exp(log_values[i] - log_max);
    mass += v;
    first += v * w_values[i];
    second += v * w_values[i] * w_values[i];
  }
  if (!(mass > 0.0))
    throw DegeneratePosteriorError("poisson output denoiser: quadrature mass underflowed");
  const double mean = first / mass;
  const double variance = std::max(second / mass - mean * mean, 0.0);
  const double s_hat = (mean - p_hat) / mu_p;
  const double mu_s = std::max((1.0 - variance / mu_p) / mu_p, variance_floor);
  return {s_hat, mu_s};
}

GampResult gamp_run(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, const PriorSpec& prior,
                    const ChannelSpec& channel, const GampConfig& config) {
  check_gamp_config(config);
  validate(prior);
  validate(channel);
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  if (y.size() != m) throw ParameterError("gamp: observation length must match matrix rows");
  if (m < 1 || n < 1) throw ParameterError("gamp: empty system");

  // With mean removal the working system gains one unknown u (flat prior)
  // and one near-noiseless row enforcing u = sum(x); see GampConfig.
  const bool augmented = config.mean_removal;
  const Eigen::Index n_all = augmented ? n + 1 : n;
  const Eigen::Index m_all = augmented ? m + 1 : m;
  constexpr double kConstraintVariance = 1e-12;
  Eigen::MatrixXd a(m_all, n_all);
  Eigen::VectorXd observations(m_all);
  if (augmented) {
    const Eigen::VectorXd row_means = phi.rowwise().mean();
    a.topLeftCorner(m, n) = phi.colwise() - row_means;
    a.col(n).head(m) = row_means;
    const double c = 1.0 / std::sqrt(double(n + 1));
    a.row(m).head(n).setConstant(c);
    a(m, n) = -c;
    observations.head(m) = y;
    observations[m] = 0.0;
  } else {
    a = phi;
    observations = y;
  }
  const Eigen::VectorXd column_sq = a.array().square().colwise().sum().matrix().transpose();
  const double column_sq_total = column_sq.sum();

  InputDenoiser denoiser(prior, config.weibull_grid_resolution);
  const double beta = config.damping;

  Eigen::VectorXd x_hat = Eigen::VectorXd::Constant(n_all, prior_mean(prior));
  Eigen::VectorXd mu_x = Eigen::VectorXd::Constant(n_all, std::max(prior_variance(prior),
                                                                   config.variance_floor));
  if (augmented) {
    x_hat[n] = double(n) * prior_mean(prior);
    mu_x[n] = std::max(double(n) * prior_variance(prior), config.variance_floor);
  }
  Eigen::VectorXd s_hat = Eigen::VectorXd::Zero(m_all);
  Eigen::VectorXd r_hat = x_hat;
  Eigen::VectorXd post_mean = x_hat;
  Eigen::VectorXd post_var = mu_x;
  double mu_r = 0.0;

  GampResult result;
  result.trace.reserve(std::size_t(config.max_iterations));

  const auto* gaussian = std::get_if<GaussianChannel>(&channel);
  const auto* poisson = std::get_if<PoissonChannel>(&channel);

  double initial_residual = 0.0;
  int growth_streak = 0;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const double mu_p = std::max(column_sq.dot(mu_x) / double(m_all), config.variance_floor);
    const Eigen::VectorXd p_hat = a * x_hat - mu_p * s_hat;

    double mu_s_sum = 0.0;
    Eigen::VectorXd s_new(m_all);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto [s, mu_s] =
          gaussian ? output_denoiser_gaussian(p_hat[i], mu_p, observations[i],
                                              gaussian->noise_variance)
                   : output_denoiser_poisson(p_hat[i], mu_p, observations[i], poisson->scale,
                                             config.variance_floor);
      s_new[i] = s;
      mu_s_sum += mu_s;
    }
    if (augmented) {
      const auto [s, mu_s] =
          output_denoiser_gaussian(p_hat[m], mu_p, observations[m], kConstraintVariance);
      s_new[m] = s;
      mu_s_sum += mu_s;
    }
    const double mu_s_bar = std::max(mu_s_sum / double(m_all), config.variance_floor);
    s_hat = (1.0 - beta) * s_hat + beta * s_new;

    mu_r = std::max(double(n_all) / (mu_s_bar * column_sq_total), config.variance_floor);
    r_hat = x_hat + mu_r * (a.transpose() * s_hat);

    denoiser.set_noise_variance(mu_r);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Moments mom = denoiser.moments(r_hat[j]);
      post_mean[j] = mom.mean;
      post_var[j] = std::max(mom.variance, config.variance_floor);
    }
    if (augmented) {
      // flat prior on the sum coordinate: the channel is the posterior
      post_mean[n] = r_hat[n];
      post_var[n] = mu_r;
    }

    const Eigen::VectorXd x_prev = x_hat;
    x_hat = (1.0 - beta) * x_hat + beta * post_mean;
    mu_x = (1.0 - beta) * mu_x + beta * post_var;

    const double scale = std::max(x_hat.norm(), 1e-300);
    const double residual = (x_hat - x_prev).norm() / scale;
    result.trace.push_back({iter, residual, mu_r});
    if (iter == 1) initial_residual = residual;

    if (residual <= config.tolerance) {
      result.converged = true;
      break;
    }
    growth_streak = residual > 10.0 * initial_residual ? growth_streak + 1 : 0;
    if (growth_streak >= 5)
      throw DivergenceError("gamp: residual grew 10x above initial for 5 iterations",
                            result.trace);
  }

  result.channel = {r_hat.head(n), mu_r};
  result.posterior_mean = post_mean.head(n);
  result.posterior_variance = post_var.head(n);
  return result;
}

}  // namespace linf
