#include "onebit/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace onebit {

QuadratureRule gauss_hermite_rule(std::size_t n) {
  if (n == 0) throw std::invalid_argument("quadrature needs at least one node");
  // Jacobi matrix of the monic probabilists' Hermite recurrence:
  // He_{k+1} = x He_k - k He_{k-1}
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double off = std::sqrt(static_cast<double>(k));
    jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
    jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Gauss-Hermite eigensolver failed");

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    rule.nodes[i] = solver.eigenvalues()(idx);
    const double v0 = solver.eigenvectors()(0, idx);
    rule.weights[i] = v0 * v0;
  }
  // symmetrize: the exact rule is symmetric about zero
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (auto& w : rule.weights) w /= total;
  return rule;
}

}  // namespace onebit
