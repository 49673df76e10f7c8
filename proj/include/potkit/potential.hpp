#pragma once

// Discrete measures, their logarithmic potentials and energies, the pairing
// of a potential with the Laplacian of a bump, and residual-harmonicity
// checks for Riesz decompositions.

#include "potkit/errors.hpp"
#include "potkit/geom.hpp"
#include "potkit/means.hpp"
#include "potkit/numerics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace potkit {

/// Weighted point cloud. Node i also carries the length l_i of the boundary
/// element it stands for; the self-energy of node i is that of its mass
/// spread uniformly on a straight segment of length l_i.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<ComplexPoint> nodes, std::vector<double> weights, std::vector<double> element_lengths)
      : nodes_(std::move(nodes)), weights_(std::move(weights)), lengths_(std::move(element_lengths)) {
    if (nodes_.empty()) throw Error(ErrorKind::InvalidMeasure, "measure needs at least one node");
    if (weights_.size() != nodes_.size() || lengths_.size() != nodes_.size())
      throw Error(ErrorKind::InvalidMeasure, "nodes, weights and element lengths differ in length");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].is_infinity()) throw Error(ErrorKind::InvalidMeasure, "node at infinity");
      if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
        throw Error(ErrorKind::InvalidMeasure, fmt::format("weight {} is negative or not finite", i));
      if (!(lengths_[i] > 0.0) || !std::isfinite(lengths_[i]))
        throw Error(ErrorKind::InvalidMeasure, fmt::format("element length {} must be positive", i));
    }
    total_mass_ = pairwise_sum(weights_);
  }

  /// Point mass of the given weight (element length 1).
  static DiscreteMeasure atom(ComplexPoint at, double weight = 1.0) { return {{at}, {weight}, {1.0}}; }

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<ComplexPoint>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& element_lengths() const noexcept { return lengths_; }
  double total_mass() const noexcept { return total_mass_; }
  bool is_probability() const noexcept { return std::abs(total_mass_ - 1.0) <= 1e-10; }

  /// Image under z -> a z + b: weights fixed, element lengths scaled by |a|.
  DiscreteMeasure affine_image(cplx a, cplx b) const {
    std::vector<ComplexPoint> moved;
    std::vector<double> lengths;
    moved.reserve(size());
    lengths.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      moved.emplace_back(a * nodes_[i].value() + b);
      lengths.push_back(lengths_[i] * std::abs(a));
    }
    return {std::move(moved), weights_, std::move(lengths)};
  }

 private:
  std::vector<ComplexPoint> nodes_;
  std::vector<double> weights_;
  std::vector<double> lengths_;
  double total_mass_ = 0.0;
};

/// alpha mu + beta nu as a single measure (nodes concatenated).
inline DiscreteMeasure superpose(double alpha, const DiscreteMeasure& mu, double beta, const DiscreteMeasure& nu) {
  std::vector<ComplexPoint> nodes = mu.nodes();
  nodes.insert(nodes.end(), nu.nodes().begin(), nu.nodes().end());
  std::vector<double> weights;
  for (double w : mu.weights()) weights.push_back(alpha * w);
  for (double w : nu.weights()) weights.push_back(beta * w);
  std::vector<double> lengths = mu.element_lengths();
  lengths.insert(lengths.end(), nu.element_lengths().begin(), nu.element_lengths().end());
  return {std::move(nodes), std::move(weights), std::move(lengths)};
}

/// p_mu(z) = sum_i w_i log|x_i - z|; -inf exactly at nodes of positive weight.
inline double potential_eval(const DiscreteMeasure& mu, const ComplexPoint& z) {
  const cplx p = z.value();
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double w = mu.weights()[i];
    if (w == 0.0) continue;
    const double r = std::abs(mu.nodes()[i].value() - p);
    if (r == 0.0) return kNegInf;
    sum += w * std::log(r);
  }
  return sum;
}

/// Exact energy of mass w spread uniformly on a segment of length l.
inline double segment_self_energy(double w, double l) { return w * w * (1.5 - std::log(l)); }

/// I(mu) = sum_{i != j} w_i w_j (-log|x_i - x_j|) + sum_i w_i^2 (3/2 - log l_i).
inline double energy(const DiscreteMeasure& mu) {
  const auto& x = mu.nodes();
  const auto& w = mu.weights();
  std::vector<double> rows(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (w[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = i + 1; j < mu.size(); ++j) {
      if (w[j] == 0.0) continue;
      const double r = std::abs(x[i].value() - x[j].value());
      if (r == 0.0)
        throw Error(ErrorKind::CoincidentNodes,
                    fmt::format("nodes {} and {} coincide with positive weight; the energy is +inf", i, j));
      row -= w[j] * std::log(r);
    }
    rows[i] = 2.0 * w[i] * row + segment_self_energy(w[i], mu.element_lengths()[i]);
  }
  return pairwise_sum(rows);
}

/// C exp(-1/(1 - |z-c|^2/R^2)) on the open disc |z - c| < R, zero outside.
struct TestFunctionBump {
  ComplexPoint center;
  double radius = 1.0;
  double normalization = 1.0;

  TestFunctionBump(ComplexPoint c, double r, double norm = 1.0) : center(c), radius(r), normalization(norm) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidRadius, "bump radius must be positive");
  }

  double value(const ComplexPoint& z) const {
    const double u2 = std::norm(z.value() - center.value()) / (radius * radius);
    if (u2 >= 1.0) return 0.0;
    return normalization * std::exp(-1.0 / (1.0 - u2));
  }

  /// Closed-form Laplacian. With u = |z-c|/R and q = 1 - u^2:
  /// Delta phi = C e^{-1/q} (4u^2/q^4 - 4/q^2 - 8u^2/q^3) / R^2.
  double laplacian(const ComplexPoint& z) const {
    const double u2 = std::norm(z.value() - center.value()) / (radius * radius);
    if (u2 >= 1.0) return 0.0;
    const double q = 1.0 - u2;
    const double q2 = q * q;
    const double bracket = 4.0 * u2 / (q2 * q2) - 4.0 / q2 - 8.0 * u2 / (q2 * q);
    return normalization * std::exp(-1.0 / q) * bracket / (radius * radius);
  }
};

struct PairingResult {
  double lhs = 0.0;  // int p_mu Delta phi dm
  double rhs = 0.0;  // 2 pi sum_i w_i phi(x_i)
};

/// Midpoint rule on a grid_resolution^2 grid over the bump's bounding
/// square; cells whose centre hits a node exactly are skipped.
inline PairingResult laplacian_pairing(const DiscreteMeasure& mu, const TestFunctionBump& phi,
                                       std::size_t grid_resolution = 256) {
  if (grid_resolution < 128) throw Error(ErrorKind::InvalidArgument, "grid_resolution must be at least 128");
  const double h = 2.0 * phi.radius / static_cast<double>(grid_resolution);
  const cplx corner = phi.center.value() - cplx(phi.radius, phi.radius);
  std::vector<double> terms;
  terms.reserve(grid_resolution * grid_resolution);
  for (std::size_t i = 0; i < grid_resolution; ++i) {
    for (std::size_t j = 0; j < grid_resolution; ++j) {
      const ComplexPoint z = corner + cplx((static_cast<double>(i) + 0.5) * h, (static_cast<double>(j) + 0.5) * h);
      const double lap = phi.laplacian(z);
      if (lap == 0.0) continue;
      const double p = potential_eval(mu, z);
      if (p == kNegInf) continue;
      terms.push_back(p * lap);
    }
  }
  PairingResult out;
  out.lhs = pairwise_sum(terms) * h * h;
  double rhs = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) rhs += mu.weights()[i] * phi.value(mu.nodes()[i]);
  out.rhs = kTwoPi * rhs;
  return out;
}

namespace detail {

inline std::vector<double> residual_laplacians(const ScalarField& u, const DiscreteMeasure* mu,
                                               std::span<const ComplexPoint> probes, double stencil_h) {
  if (!(stencil_h > 0.0)) throw Error(ErrorKind::InvalidArgument, "stencil_h must be positive");
  std::vector<double> out;
  out.reserve(probes.size());
  for (const auto& probe : probes) {
    if (mu) {
      for (std::size_t i = 0; i < mu->size(); ++i) {
        if (mu->weights()[i] > 0.0 && distance(mu->nodes()[i], probe) < 10.0 * stencil_h)
          throw Error(ErrorKind::ProbeTooCloseToSingularity,
                      fmt::format("probe {},{} is within 10 h of node {}", probe.re(), probe.im(), i));
      }
    }
    auto residual = [&](double x, double y) {
      const ComplexPoint z(x, y);
      const double value = u(z) - (mu ? potential_eval(*mu, z) : 0.0);
      if (!std::isfinite(value))
        throw Error(ErrorKind::ProbeTooCloseToSingularity, fmt::format("residual is not finite near {},{}", x, y));
      return value;
    };
    out.push_back(five_point_laplacian(residual, probe.re(), probe.im(), stencil_h));
  }
  return out;
}

}  // namespace detail

/// Five-point Laplacian of h = u - p_mu at each probe.
inline std::vector<double> riesz_residual(const ScalarField& u, const DiscreteMeasure& mu,
                                          std::span<const ComplexPoint> probes, double stencil_h = 1e-3) {
  return detail::residual_laplacians(u, &mu, probes, stencil_h);
}

/// Same with mu = 0 (the residual is u itself).
inline std::vector<double> riesz_residual(const ScalarField& u, std::span<const ComplexPoint> probes,
                                          double stencil_h = 1e-3) {
  return detail::residual_laplacians(u, nullptr, probes, stencil_h);
}

}  // namespace potkit
