#pragma once

// Grid box-cover estimates of p-dimensional Hausdorff measure, box-counting
// dimension, and the comparison of Hausdorff positivity with capacity.

#include "potkit/equilibrium.hpp"
#include "potkit/errors.hpp"
#include "potkit/geom.hpp"
#include "potkit/numerics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace potkit {

enum class CloudSource { Explicit, PolylineSample, CircleSample };

inline std::string to_string(CloudSource s) {
  switch (s) {
    case CloudSource::Explicit: return "explicit";
    case CloudSource::PolylineSample: return "polyline_sample";
    case CloudSource::CircleSample: return "circle_sample";
  }
  return "unknown";
}

class PointCloud {
 public:
  static PointCloud explicit_points(std::vector<ComplexPoint> points) {
    PointCloud c(CloudSource::Explicit);
    c.points_ = std::move(points);
    c.finish();
    return c;
  }

  /// n points equally spaced in arclength along an open polyline, both ends
  /// included.
  static PointCloud polyline_sample(std::vector<ComplexPoint> vertices, std::size_t n) {
    if (vertices.size() < 2) throw Error(ErrorKind::InvalidArgument, "polyline needs at least two vertices");
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "polyline sample needs n >= 2");
    std::vector<double> cumulative(vertices.size(), 0.0);
    for (std::size_t i = 1; i < vertices.size(); ++i) cumulative[i] = cumulative[i - 1] + distance(vertices[i - 1], vertices[i]);
    const double total = cumulative.back();
    if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "polyline has zero length");
    PointCloud c(CloudSource::PolylineSample);
    std::size_t edge = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = total * static_cast<double>(k) / static_cast<double>(n - 1);
      while (edge + 2 < vertices.size() && cumulative[edge + 1] <= s) ++edge;
      const double len = cumulative[edge + 1] - cumulative[edge];
      const double t = len > 0.0 ? std::clamp((s - cumulative[edge]) / len, 0.0, 1.0) : 0.0;
      c.points_.emplace_back(vertices[edge].value() + t * (vertices[edge + 1].value() - vertices[edge].value()));
    }
    c.vertices_ = std::move(vertices);
    c.finish();
    return c;
  }

  static PointCloud circle_sample(std::size_t n, ComplexPoint center = {0.0, 0.0}, double radius = 1.0) {
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "circle sample needs n >= 3");
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidRadius, "circle radius must be positive");
    PointCloud c(CloudSource::CircleSample);
    for (std::size_t k = 0; k < n; ++k)
      c.points_.emplace_back(center.value() + radius * std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(n)));
    c.center_ = center;
    c.radius_ = radius;
    c.finish();
    return c;
  }

  /// Image under z -> a z with a > 0.
  PointCloud scaled(double a) const {
    if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
    PointCloud c(source_);
    for (const auto& z : points_) c.points_.emplace_back(a * z.re(), a * z.im());
    for (const auto& v : vertices_) c.vertices_.emplace_back(a * v.re(), a * v.im());
    c.center_ = ComplexPoint(a * center_.re(), a * center_.im());
    c.radius_ = a * radius_;
    c.finish();
    return c;
  }

  const std::vector<ComplexPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  CloudSource source() const noexcept { return source_; }
  const std::vector<ComplexPoint>& vertices() const noexcept { return vertices_; }
  ComplexPoint center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  cplx bbox_min() const noexcept { return lo_; }
  cplx bbox_max() const noexcept { return hi_; }
  double extent() const noexcept { return std::max(hi_.real() - lo_.real(), hi_.imag() - lo_.imag()); }

 private:
  explicit PointCloud(CloudSource s) : source_(s) {}

  void finish() {
    if (points_.empty()) throw Error(ErrorKind::InvalidArgument, "point cloud is empty");
    for (const auto& z : points_)
      if (z.is_infinity()) throw Error(ErrorKind::InvalidArgument, "point cloud must be finite");
    lo_ = hi_ = points_.front().value();
    for (const auto& z : points_) {
      lo_ = {std::min(lo_.real(), z.re()), std::min(lo_.imag(), z.im())};
      hi_ = {std::max(hi_.real(), z.re()), std::max(hi_.imag(), z.im())};
    }
  }

  CloudSource source_;
  std::vector<ComplexPoint> points_;
  std::vector<ComplexPoint> vertices_;
  ComplexPoint center_{0.0, 0.0};
  double radius_ = 0.0;
  cplx lo_{}, hi_{};
};

/// Number of cells of the axis-parallel grid of side delta, anchored at the
/// bounding-box corner, that contain at least one point.
inline std::size_t occupied_cells(const PointCloud& a, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  std::vector<std::pair<std::int64_t, std::int64_t>> cells;
  cells.reserve(a.size());
  const cplx lo = a.bbox_min();
  for (const auto& z : a.points()) {
    const auto ix = static_cast<std::int64_t>(std::floor((z.re() - lo.real()) / delta));
    const auto iy = static_cast<std::int64_t>(std::floor((z.im() - lo.imag()) / delta));
    cells.emplace_back(ix, iy);
  }
  std::sort(cells.begin(), cells.end());
  return static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

/// N(delta) * (delta sqrt 2)^p.
inline double box_cover_estimate(const PointCloud& a, double p, double delta) {
  if (!(p > 0.0 && p <= 4.0)) throw Error(ErrorKind::InvalidArgument, "p must lie in (0, 4]");
  const auto n = occupied_cells(a, delta);
  return static_cast<double>(n) * std::pow(delta * std::numbers::sqrt2, p);
}

/// Largest nearest-neighbour distance in the cloud (0 for a single point).
inline double max_nearest_neighbor_spacing(const PointCloud& a) {
  const auto& pts = a.points();
  if (pts.size() < 2) return 0.0;
  const cplx span = a.bbox_max() - a.bbox_min();
  const bool by_x = span.real() >= span.imag();
  std::vector<cplx> sorted;
  sorted.reserve(pts.size());
  for (const auto& z : pts) sorted.push_back(by_x ? z.value() : cplx(z.im(), z.re()));
  std::sort(sorted.begin(), sorted.end(), [](cplx u, cplx v) { return u.real() < v.real() || (u.real() == v.real() && u.imag() < v.imag()); });
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double best = kPosInf;
    for (std::size_t j = i + 1; j < sorted.size() && sorted[j].real() - sorted[i].real() < best; ++j)
      best = std::min(best, std::abs(sorted[j] - sorted[i]));
    for (std::size_t j = i; j-- > 0 && sorted[i].real() - sorted[j].real() < best;)
      best = std::min(best, std::abs(sorted[j] - sorted[i]));
    worst = std::max(worst, best);
  }
  return worst;
}

struct HausdorffEstimate {
  double p = 1.0;
  std::vector<double> deltas;  // strictly descending
  std::vector<double> values;  // grid estimate of H_{p,delta} per delta
  double extrapolated = 0.0;   // value at the smallest delta
  bool monotone = true;        // values non-decreasing as delta decreases, up to grid jitter

  /// max/min of the profile; +inf when some value is zero.
  double spread() const {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *lo > 0.0 ? *hi / *lo : kPosInf;
  }
  bool stable(double tolerance = 0.15) const { return spread() <= 1.0 + tolerance; }
};

/// Relative drop between consecutive grid estimates tolerated before a
/// profile is flagged non-monotone. Grid anchoring alone moves counts by a
/// few cells.
inline constexpr double kMonotoneSlack = 0.1;

inline void validate_deltas(std::span<const double> deltas) {
  if (deltas.size() < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 delta values");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || !std::isfinite(deltas[i])) throw Error(ErrorKind::InvalidArgument, "delta values must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw Error(ErrorKind::InvalidArgument, "delta values must be strictly descending");
  }
  if (deltas.front() < 10.0 * deltas.back() * (1.0 - 1e-12))
    throw Error(ErrorKind::InvalidArgument, "delta values must span at least one decade");
}

inline HausdorffEstimate hausdorff_profile(const PointCloud& a, double p, std::span<const double> deltas) {
  validate_deltas(deltas);
  if (!(p > 0.0 && p <= 4.0)) throw Error(ErrorKind::InvalidArgument, "p must lie in (0, 4]");
  const double spacing = max_nearest_neighbor_spacing(a);
  if (deltas.back() <= 2.0 * spacing)
    throw Error(ErrorKind::UndersampledCloud,
                fmt::format("smallest delta {} does not exceed twice the nearest-neighbour spacing {}", deltas.back(), spacing));
  HausdorffEstimate est;
  est.p = p;
  est.deltas.assign(deltas.begin(), deltas.end());
  for (double d : deltas) est.values.push_back(box_cover_estimate(a, p, d));
  for (std::size_t i = 1; i < est.values.size(); ++i)
    if (est.values[i] < (1.0 - kMonotoneSlack) * est.values[i - 1]) est.monotone = false;
  est.extrapolated = est.values.back();
  return est;
}

/// Least-squares slope of log N(delta) against log(1/delta).
inline double box_dimension(const PointCloud& a, std::span<const double> deltas) {
  validate_deltas(deltas);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(deltas.size());
  for (double d : deltas) {
    const double x = -std::log(d);
    const double y = std::log(static_cast<double>(occupied_cells(a, d)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Default profile deltas: {0.025, 0.01, 0.005, 0.0025} times the cloud
/// extent (times 1 for a single point).
inline std::vector<double> default_deltas(const PointCloud& a) {
  const double extent = a.extent() > 0.0 ? a.extent() : 1.0;
  return {0.025 * extent, 0.01 * extent, 0.005 * extent, 0.0025 * extent};
}

struct CapacityHausdorffReport {
  HausdorffEstimate profile;
  double h_estimate = 0.0;
  double capacity_estimate = 0.0;
  bool consistent = true;    // not (h > 0.1 and capacity < 1e-3)
  bool both_vanish = false;  // h <= 0.1 and capacity < 1e-3
};

inline constexpr double kHausdorffPositive = 0.1;
inline constexpr double kCapacityZero = 1e-3;
inline constexpr std::size_t kReportCapacityNodes = 400;

/// Hausdorff profile and equilibrium capacity of the same geometry. The
/// capacity comes from the generator behind the cloud (a single explicit
/// point has capacity 0). Propagates NotConvergedError.
inline CapacityHausdorffReport capacity_hausdorff_report(const PointCloud& a, double p, std::span<const double> deltas = {},
                                                         const EquilibriumOptions& opts = {}) {
  CapacityHausdorffReport r;
  const auto chosen = deltas.empty() ? default_deltas(a) : std::vector<double>(deltas.begin(), deltas.end());
  r.profile = hausdorff_profile(a, p, chosen);
  r.h_estimate = r.profile.extrapolated;
  switch (a.source()) {
    case CloudSource::CircleSample:
      r.capacity_estimate = capacity(NodeSystem::circle(kReportCapacityNodes, a.center(), a.radius()), opts);
      break;
    case CloudSource::PolylineSample:
      r.capacity_estimate = capacity(NodeSystem::polyline(a.vertices(), kReportCapacityNodes), opts);
      break;
    case CloudSource::Explicit: {
      const auto& pts = a.points();
      const bool single = std::all_of(pts.begin(), pts.end(), [&](const ComplexPoint& z) { return z == pts.front(); });
      if (!single) throw Error(ErrorKind::InvalidArgument, "explicit clouds carry no element lengths; only a single point is supported");
      r.capacity_estimate = 0.0;
      break;
    }
  }
  r.consistent = !(r.h_estimate > kHausdorffPositive && r.capacity_estimate < kCapacityZero);
  r.both_vanish = r.h_estimate <= kHausdorffPositive && r.capacity_estimate < kCapacityZero;
  return r;
}

}  // namespace potkit
