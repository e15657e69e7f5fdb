#include "linf/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "linf/errors.hpp"

namespace linf {

namespace {

// Eigendecomposition of the symmetric tridiagonal Jacobi matrix with zero
// diagonal and the given off-diagonal. Nodes are the eigenvalues; weights are
// moment * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double zeroth_moment) {
  const int n = int(offdiag.size()) + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    jacobi(i, i + 1) = offdiag[i];
    jacobi(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw NumericError("quadrature: eigensolver failed");
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues().array();
  rule.weights = zeroth_moment * solver.eigenvectors().row(0).array().square().transpose();
  return rule;
}

void symmetrize(QuadratureRule& rule) {
  const int n = int(rule.nodes.size());
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
}

template <typename Maker>
const QuadratureRule& cached(std::map<int, QuadratureRule>& cache, std::mutex& mutex, int n,
                             Maker make) {
  if (n < 1) throw ParameterError("quadrature: order must be >= 1");
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

}  // namespace

const QuadratureRule& gauss_hermite(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, [](int order) {
    Eigen::VectorXd offdiag(order - 1);
    for (int i = 1; i < order; ++i) offdiag[i - 1] = std::sqrt(i / 2.0);
    QuadratureRule rule = golub_welsch(offdiag, std::sqrt(std::numbers::pi));
    symmetrize(rule);
    return rule;
  });
}

const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, [](int order) {
    Eigen::VectorXd offdiag(order - 1);
    for (int i = 1; i < order; ++i) offdiag[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
    QuadratureRule rule = golub_welsch(offdiag, 2.0);
    symmetrize(rule);
    return rule;
  });
}

}  // namespace linf
