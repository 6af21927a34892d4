#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddgpnp {

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct QuadRule {
  int order = 0;
  std::vector<double> nodes;    // ascending, symmetric about 0
  std::vector<double> weights;  // positive, sum to 2

  /// Weights normalised to sum to one (the averaging form).
  std::vector<double> averaged_weights() const {
    std::vector<double> out(weights);
    for (auto& w : out) w *= 0.5;
    return out;
  }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

namespace detail {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
inline void legendre_with_derivative(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace detail

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
/// Nodes are Newton-refined roots of P_n.
inline QuadRule gauss_rule(int n) {
  if (n < 1 || n > 10) {
    throw std::invalid_argument("gauss_rule: unsupported number of points " + std::to_string(n) +
                                " (expected 1..10)");
  }
  QuadRule rule;
  rule.order = n;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0;
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      detail::legendre_with_derivative(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    detail::legendre_with_derivative(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the i-th largest root; mirror it for symmetry.
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace ddgpnp
