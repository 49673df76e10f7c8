#pragma once

// Small numerical building blocks shared by the solver modules.

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace potkit {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// Gauss-Legendre rule on an interval.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b]. Weights sum to b - a.
inline QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  const auto positive = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  QuadratureRule rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  auto push = [&](double x) {
    const double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(mid + half * x);
    rule.weights.push_back(half * w);
  };
  // legendre_p_zeros returns the non-negative zeros in ascending order;
  // zero itself is included once when n is odd.
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    if (*it != 0.0) push(-*it);
  }
  for (double x : positive) push(x);
  return rule;
}

/// Pairwise (cascade) summation in index order. The result depends only on
/// the input sequence, never on how it was produced.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Standard five-point Laplacian with step h.
template <typename Field>
double five_point_laplacian(const Field& f, double x, double y, double h) {
  const double centre = f(x, y);
  return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * centre) / (h * h);
}

/// Golden-section maximisation of a unimodal function on [a, b].
template <typename Fn>
double golden_section_argmax(const Fn& fn, double a, double b, double tol = 1e-13) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace potkit
