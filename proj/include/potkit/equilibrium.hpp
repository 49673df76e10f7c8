#pragma once

// Equilibrium measures of discretised compact sets: the discrete energy is
// minimised over the probability simplex by projected gradient descent.

#include "potkit/errors.hpp"
#include "potkit/geom.hpp"
#include "potkit/potential.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace potkit {

enum class NodeGenerator { Circle, Segment, CircleArc, PolygonBoundary, Polyline, Explicit };

inline std::string to_string(NodeGenerator g) {
  switch (g) {
    case NodeGenerator::Circle: return "circle";
    case NodeGenerator::Segment: return "segment";
    case NodeGenerator::CircleArc: return "arc";
    case NodeGenerator::PolygonBoundary: return "polygon_boundary";
    case NodeGenerator::Polyline: return "polyline";
    case NodeGenerator::Explicit: return "explicit";
  }
  return "unknown";
}

/// Discretised support of a compact set: nodes plus the boundary element
/// length attributed to each node. Generators place nodes at element
/// midpoints, so the element lengths are the Voronoi arc lengths.
class NodeSystem {
 public:
  static NodeSystem circle(std::size_t n, ComplexPoint center = {0.0, 0.0}, double radius = 1.0) {
    require(n >= 1, "circle generator needs n >= 1");
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidRadius, "circle radius must be positive");
    NodeSystem ns(NodeGenerator::Circle);
    for (std::size_t k = 0; k < n; ++k)
      ns.nodes_.emplace_back(center.value() + radius * std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(n)));
    ns.lengths_.assign(n, kTwoPi * radius / static_cast<double>(n));
    return ns;
  }

  static NodeSystem segment(ComplexPoint a, ComplexPoint b, std::size_t n) {
    require(n >= 1, "segment generator needs n >= 1");
    const cplx d = b.value() - a.value();
    if (std::abs(d) == 0.0) throw Error(ErrorKind::InvalidArgument, "segment endpoints coincide");
    NodeSystem ns(NodeGenerator::Segment);
    for (std::size_t k = 0; k < n; ++k)
      ns.nodes_.emplace_back(a.value() + (static_cast<double>(k) + 0.5) / static_cast<double>(n) * d);
    ns.lengths_.assign(n, std::abs(d) / static_cast<double>(n));
    return ns;
  }

  /// Arc of the circle |z - center| = radius between angles theta0 and theta1.
  static NodeSystem circle_arc(ComplexPoint center, double radius, double theta0, double theta1, std::size_t n) {
    require(n >= 1, "arc generator needs n >= 1");
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidRadius, "arc radius must be positive");
    if (!(theta1 > theta0) || theta1 - theta0 > kTwoPi) throw Error(ErrorKind::InvalidArgument, "arc needs theta0 < theta1 <= theta0 + 2 pi");
    NodeSystem ns(NodeGenerator::CircleArc);
    const double step = (theta1 - theta0) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k)
      ns.nodes_.emplace_back(center.value() + radius * std::polar(1.0, theta0 + (static_cast<double>(k) + 0.5) * step));
    ns.lengths_.assign(n, radius * step);
    return ns;
  }

  /// n nodes equally spaced in arclength along an open polyline.
  static NodeSystem polyline(std::span<const ComplexPoint> vertices, std::size_t n) {
    auto ns = along_path(vertices, false, n);
    ns.generator_ = NodeGenerator::Polyline;
    return ns;
  }

  /// n nodes equally spaced in arclength along the boundary of a polygon
  /// domain, starting from vertex 0.
  static NodeSystem polygon_boundary(const DomainSpec& polygon, std::size_t n) {
    const auto* poly = polygon.get_if<Polygon>();
    if (!poly) throw Error(ErrorKind::InvalidArgument, "polygon_boundary generator needs a polygon domain");
    auto ns = along_path(poly->vertices, true, n);
    ns.generator_ = NodeGenerator::PolygonBoundary;
    return ns;
  }

  static NodeSystem explicit_nodes(std::vector<ComplexPoint> nodes, std::vector<double> lengths) {
    if (nodes.size() != lengths.size()) throw Error(ErrorKind::InvalidArgument, "nodes and element lengths differ in length");
    for (double l : lengths)
      if (!(l > 0.0)) throw Error(ErrorKind::InvalidArgument, "element lengths must be positive");
    NodeSystem ns(NodeGenerator::Explicit);
    ns.nodes_ = std::move(nodes);
    ns.lengths_ = std::move(lengths);
    return ns;
  }

  /// Nodes of a measure (its weights are ignored).
  static NodeSystem from_measure(const DiscreteMeasure& mu) {
    return explicit_nodes(mu.nodes(), mu.element_lengths());
  }

  /// Image under z -> a z + b; element lengths scale by |a|.
  NodeSystem affine_image(cplx a, cplx b) const {
    NodeSystem ns(generator_);
    for (const auto& z : nodes_) ns.nodes_.emplace_back(a * z.value() + b);
    for (double l : lengths_) ns.lengths_.push_back(l * std::abs(a));
    return ns;
  }

  /// Union of two systems (tagged explicit).
  NodeSystem joined(const NodeSystem& other) const {
    auto nodes = nodes_;
    nodes.insert(nodes.end(), other.nodes_.begin(), other.nodes_.end());
    auto lengths = lengths_;
    lengths.insert(lengths.end(), other.lengths_.begin(), other.lengths_.end());
    return explicit_nodes(std::move(nodes), std::move(lengths));
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<ComplexPoint>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& element_lengths() const noexcept { return lengths_; }
  NodeGenerator generator() const noexcept { return generator_; }

 private:
  explicit NodeSystem(NodeGenerator g) : generator_(g) {}

  static void require(bool ok, const char* message) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, message);
  }

  static NodeSystem along_path(std::span<const ComplexPoint> vertices, bool closed, std::size_t n) {
    require(n >= 1, "path generator needs n >= 1");
    require(vertices.size() >= 2, "path generator needs at least two vertices");
    const std::size_t edges = closed ? vertices.size() : vertices.size() - 1;
    std::vector<double> cumulative(edges + 1, 0.0);
    for (std::size_t i = 0; i < edges; ++i)
      cumulative[i + 1] = cumulative[i] + distance(vertices[i], vertices[(i + 1) % vertices.size()]);
    const double total = cumulative.back();
    require(total > 0.0, "path has zero length");
    NodeSystem ns(NodeGenerator::Explicit);
    std::size_t edge = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = (static_cast<double>(k) + 0.5) * total / static_cast<double>(n);
      while (edge + 1 < edges && cumulative[edge + 1] <= s) ++edge;
      const cplx a = vertices[edge].value();
      const cplx b = vertices[(edge + 1) % vertices.size()].value();
      const double len = cumulative[edge + 1] - cumulative[edge];
      ns.nodes_.emplace_back(a + (s - cumulative[edge]) / len * (b - a));
    }
    ns.lengths_.assign(n, total / static_cast<double>(n));
    return ns;
  }

  NodeGenerator generator_;
  std::vector<ComplexPoint> nodes_;
  std::vector<double> lengths_;
};

/// K_ij = -log|x_i - x_j| (i != j), K_ii = 3/2 - log l_i.
inline Eigen::MatrixXd kernel_matrix(const NodeSystem& ns) {
  const auto n = static_cast<Eigen::Index>(ns.size());
  Eigen::MatrixXd k(n, n);
  const auto& x = ns.nodes();
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.5 - std::log(ns.element_lengths()[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = std::abs(x[static_cast<std::size_t>(i)].value() - x[static_cast<std::size_t>(j)].value());
      if (r == 0.0) throw Error(ErrorKind::DuplicateNodes, fmt::format("nodes {} and {} coincide", i, j));
      k(i, j) = k(j, i) = -std::log(r);
    }
  }
  return k;
}

/// Euclidean projection onto {w >= 0, sum w = 1} (sort-and-threshold).
inline std::vector<double> project_simplex(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorKind::InvalidArgument, "cannot project an empty vector");
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "simplex projection needs finite entries");
  std::vector<double> u(v.begin(), v.end());
  std::stable_sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    running += u[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::max(v[i] - theta, 0.0);
  return w;
}

struct EquilibriumOptions {
  int max_iters = 5000;
  double tol = 1e-8;
};

struct EquilibriumResult {
  DiscreteMeasure measure;
  double energy = 0.0;
  double capacity = 0.0;
  double frostman_residual = 0.0;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> energy_history;  // energy of every accepted iterate, starting point first
};

/// Raised by capacity() when the optimiser stops before reaching tol. The
/// best iterate is attached.
class NotConvergedError : public Error {
 public:
  explicit NotConvergedError(EquilibriumResult result)
      : Error(ErrorKind::NotConverged,
              fmt::format("projected gradient norm {} after {} iterations", result.projected_gradient_norm,
                          result.iterations)),
        result_(std::move(result)) {}
  const EquilibriumResult& result() const noexcept { return result_; }

 private:
  EquilibriumResult result_;
};

/// Minimises w^T K w over the simplex, starting from uniform weights.
///
/// Each step projects w - s grad onto the simplex, starting from
/// s = 1/||K||_inf and halving s (at most 40 times) until the sufficient
/// decrease condition f(w+) <= f(w) + grad.(w+ - w) + |w+ - w|^2 / 2s holds.
/// Convergence is declared when |w - P(w - s0 grad)| / s0 <= tol.
inline EquilibriumResult minimize_energy(const NodeSystem& ns, const EquilibriumOptions& opts = {}) {
  if (ns.size() < 2) throw Error(ErrorKind::InvalidArgument, "energy minimisation needs at least 2 nodes");
  if (opts.max_iters < 0 || !(opts.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_iters >= 0 and tol > 0 required");
  const Eigen::MatrixXd k = kernel_matrix(ns);
  const auto n = k.rows();
  const double step0 = 1.0 / k.cwiseAbs().rowwise().sum().maxCoeff();

  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd kw = k * w;
  double f = w.dot(kw);
  std::vector<double> history{f};

  auto project = [](const Eigen::VectorXd& v) {
    const auto p = project_simplex(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
  };

  int iterations = 0;
  bool converged = false;
  double pg_norm = kPosInf;
  while (true) {
    const Eigen::VectorXd grad = 2.0 * kw;
    pg_norm = (w - project(w - step0 * grad)).norm() / step0;
    if (pg_norm <= opts.tol) {
      converged = true;
      break;
    }
    if (iterations >= opts.max_iters) break;

    double s = step0;
    bool accepted = false;
    Eigen::VectorXd w_next, kw_next;
    double f_next = 0.0;
    for (int backtrack = 0; backtrack <= 40; ++backtrack) {
      w_next = project(w - s * grad);
      kw_next = k * w_next;
      f_next = w_next.dot(kw_next);
      // f(w+) - f(w) - grad.d = d^T K d, evaluated without cancellation.
      const Eigen::VectorXd d = w_next - w;
      if (d.dot(kw_next - kw) <= d.squaredNorm() / (2.0 * s)) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;
    w = std::move(w_next);
    kw = std::move(kw_next);
    f = f_next;
    history.push_back(f);
    ++iterations;
  }

  double residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (w(i) > 1e-6) residual = std::max(residual, std::abs(kw(i) - f));

  std::vector<double> weights(w.data(), w.data() + n);
  EquilibriumResult result{DiscreteMeasure(ns.nodes(), std::move(weights), ns.element_lengths()),
                           f,
                           std::exp(-f),
                           residual,
                           pg_norm,
                           iterations,
                           converged,
                           std::move(history)};
  return result;
}

/// exp(-I(nu)); systems with fewer than two nodes are polar and get 0.
inline double capacity(const NodeSystem& ns, const EquilibriumOptions& opts = {}) {
  if (ns.size() < 2) return 0.0;
  auto result = minimize_energy(ns, opts);
  if (!result.converged) throw NotConvergedError(std::move(result));
  return result.capacity;
}

/// -p_nu(z) - I(nu) at each probe; bounded above by ~0 everywhere and close
/// to 0 on the support.
inline std::vector<double> frostman_profile(const EquilibriumResult& result, std::span<const ComplexPoint> probes) {
  std::vector<double> out;
  out.reserve(probes.size());
  for (const auto& z : probes) out.push_back(-potential_eval(result.measure, z) - result.energy);
  return out;
}

}  // namespace potkit
