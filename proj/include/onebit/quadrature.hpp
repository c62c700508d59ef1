#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace onebit {

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
};

/// Nodes and weights for E[f(Z)], Z ~ N(0, 1) (probabilists' Hermite).
/// Weights sum to one.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch construction; n >= 1.
QuadratureRule gauss_hermite_rule(std::size_t n);

/// E[f(theta)] for theta ~ g. Zero variance degenerates to f(mean).
template <class F>
double gaussian_expectation(F&& f, const Gaussian& g, const QuadratureRule& rule) {
  if (g.variance == 0.0) return f(g.mean);
  const double sd = std::sqrt(g.variance);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(g.mean + sd * rule.nodes[i]);
  return sum;
}

}  // namespace onebit
