#include "rvm/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rvm {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0) * x * p2 - (k - 1.0) * p3) / k;
      }
      dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p1 = 1.0, p2 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * k - 1.0) * x * p2 - (k - 1.0) * p3) / k;
    }
    dp = n * (x * p1 - p2) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule uniform_trapezoid(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("uniform_trapezoid: n must be >= 1");
  QuadratureRule rule;
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    rule.nodes.push_back(a + i * h);
    rule.weights.push_back((i == 0 || i == n) ? 0.5 * h : h);
  }
  return rule;
}

QuadratureRule uniform_simpson(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("uniform_simpson: n must be >= 1");
  if (n == 1) return uniform_trapezoid(1, a, b);
  QuadratureRule rule;
  const double h = (b - a) / n;
  rule.nodes.resize(n + 1);
  rule.weights.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) rule.nodes[i] = a + i * h;
  const int simpson_intervals = (n % 2 == 0) ? n : n - 3;
  for (int i = 0; i + 2 <= simpson_intervals; i += 2) {
    rule.weights[i] += h / 3.0;
    rule.weights[i + 1] += 4.0 * h / 3.0;
    rule.weights[i + 2] += h / 3.0;
  }
  if (n % 2 == 1) {
    const int i = simpson_intervals;
    rule.weights[i] += 3.0 * h / 8.0;
    rule.weights[i + 1] += 9.0 * h / 8.0;
    rule.weights[i + 2] += 9.0 * h / 8.0;
    rule.weights[i + 3] += 3.0 * h / 8.0;
  }
  return rule;
}

}  // namespace rvm
