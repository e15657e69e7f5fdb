#pragma once

#include <Eigen/Dense>

namespace linf {

struct QuadratureRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

// Nodes/weights for integrals of f(x) e^{-x^2} over the real line
// (Golub-Welsch on the Hermite Jacobi matrix; nodes symmetrized exactly).
const QuadratureRule& gauss_hermite(int n);

// Nodes/weights on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

}  // namespace linf
