#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "bubbles/errors.hpp"

namespace bubbles {

// Gauss-Legendre rule mapped to [0, 1]. Nodes are (abscissa, weight) with the
// weights summing to one.
struct QuadratureRule {
  int order = 0;
  std::vector<std::pair<double, double>> nodes;
};

inline QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw Error("gauss_legendre: order must be positive");
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(order));
  const int n = order;
  // Roots are symmetric; find the ones in (0, 1] of P_n on [-1, 1] by Newton.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-17) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] -> [0, 1]; weights halve.
    rule.nodes[static_cast<std::size_t>(i)] = {0.5 * (1.0 - x), 0.5 * w};
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = {0.5 * (1.0 + x), 0.5 * w};
  }
  if (n % 2 == 1) {
    // Middle node: x = 0 exactly.
    const std::size_t mid = static_cast<std::size_t>(n / 2);
    rule.nodes[mid].first = 0.5;
  }
  return rule;
}

// The rule used everywhere unless a caller passes its own.
inline const QuadratureRule& default_rule() {
  static const QuadratureRule rule = gauss_legendre(16);
  return rule;
}

}  // namespace bubbles
