#pragma once

// Points of the extended plane, planar domains with exact distance to the
// boundary and a canonical boundary parameterisation, and Moebius maps.

#include "potkit/errors.hpp"
#include "potkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace potkit {

using cplx = std::complex<double>;

/// A point z = x + iy, or the point at infinity of the Riemann sphere.
///
/// Ordinary arithmetic rejects the infinity marker; only Moebius maps
/// consume and produce it.
class ComplexPoint {
 public:
  constexpr ComplexPoint() = default;
  ComplexPoint(double re, double im) : z_(re, im) { check_finite(); }
  ComplexPoint(cplx z) : z_(z) { check_finite(); }  // NOLINT(implicit)

  static ComplexPoint infinity() {
    ComplexPoint p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinity() const noexcept { return infinite_; }

  cplx value() const {
    require_finite("value");
    return z_;
  }
  double re() const {
    require_finite("re");
    return z_.real();
  }
  double im() const {
    require_finite("im");
    return z_.imag();
  }
  double abs() const { return std::abs(value()); }
  double arg() const { return std::arg(value()); }
  ComplexPoint conj() const { return std::conj(value()); }

  friend ComplexPoint operator+(const ComplexPoint& a, const ComplexPoint& b) { return a.value() + b.value(); }
  friend ComplexPoint operator-(const ComplexPoint& a, const ComplexPoint& b) { return a.value() - b.value(); }
  friend ComplexPoint operator*(const ComplexPoint& a, const ComplexPoint& b) { return a.value() * b.value(); }
  friend ComplexPoint operator/(const ComplexPoint& a, const ComplexPoint& b) {
    if (b.value() == cplx{}) throw Error(ErrorKind::InfinityArithmetic, "division by zero");
    return a.value() / b.value();
  }
  friend ComplexPoint operator*(double s, const ComplexPoint& a) { return s * a.value(); }
  friend ComplexPoint operator*(const ComplexPoint& a, double s) { return s * a.value(); }
  ComplexPoint operator-() const { return -value(); }

  friend bool operator==(const ComplexPoint& a, const ComplexPoint& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.z_ == b.z_;
  }

 private:
  void check_finite() const {
    if (!std::isfinite(z_.real()) || !std::isfinite(z_.imag()))
      throw Error(ErrorKind::InvalidArgument, "complex point must have finite coordinates");
  }
  void require_finite(const char* what) const {
    if (infinite_) throw Error(ErrorKind::InfinityArithmetic, std::string(what) + " of the point at infinity");
  }

  cplx z_{};
  bool infinite_ = false;
};

inline double distance(const ComplexPoint& a, const ComplexPoint& b) { return std::abs(a.value() - b.value()); }

// ---------------------------------------------------------------------------
// Domains

struct Disc {
  ComplexPoint center;
  double radius = 1.0;
};

struct UpperHalfPlane {};

/// Complement of the closed disc, an unbounded domain containing infinity.
struct DiscComplement {
  ComplexPoint center;
  double radius = 1.0;
};

/// Interior of a simple, positively oriented polygon.
struct Polygon {
  std::vector<ComplexPoint> vertices;
  std::vector<double> cumulative;  // arclength at each vertex, cumulative[0] == 0
  double perimeter = 0.0;
};

enum class DomainKind { Disc, UpperHalfPlane, DiscComplement, Polygon };

namespace detail {

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline int orientation_sign(cplx a, cplx b, cplx c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({std::abs(b - a), std::abs(c - a), 1e-300});
  if (std::abs(v) <= 1e-14 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

inline bool on_segment(cplx a, cplx b, cplx p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

inline bool segments_intersect(cplx p1, cplx p2, cplx q1, cplx q2) {
  const int d1 = orientation_sign(q1, q2, p1);
  const int d2 = orientation_sign(q1, q2, p2);
  const int d3 = orientation_sign(p1, p2, q1);
  const int d4 = orientation_sign(p1, p2, q2);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

/// Closest point to p on segment [a, b] and its local parameter in [0, 1].
struct SegmentProjection {
  cplx point;
  double s = 0.0;
  double dist = 0.0;
};

inline SegmentProjection project_onto_segment(cplx a, cplx b, cplx p) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  double s = len2 > 0.0 ? ((p - a) * std::conj(ab)).real() / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  const cplx q = a + s * ab;
  return {q, s, std::abs(p - q)};
}

}  // namespace detail

class DomainSpec {
 public:
  using Variant = std::variant<Disc, UpperHalfPlane, DiscComplement, Polygon>;

  static DomainSpec disc(ComplexPoint center, double radius) {
    check_radius(radius);
    return DomainSpec(Disc{center, radius});
  }
  static DomainSpec unit_disc() { return disc({0.0, 0.0}, 1.0); }
  static DomainSpec half_plane() { return DomainSpec(UpperHalfPlane{}); }
  static DomainSpec disc_complement(ComplexPoint center, double radius) {
    check_radius(radius);
    return DomainSpec(DiscComplement{center, radius});
  }

  /// Vertices must describe a simple polygon in counter-clockwise order.
  static DomainSpec polygon(std::vector<ComplexPoint> vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) throw Error(ErrorKind::InvalidDomain, "polygon needs at least 3 vertices");
    for (const auto& v : vertices)
      if (v.is_infinity()) throw Error(ErrorKind::InvalidDomain, "polygon vertex at infinity");
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) area2 += detail::cross(vertices[i].value(), vertices[(i + 1) % n].value());
    if (!(area2 > 0.0)) throw Error(ErrorKind::InvalidDomain, "polygon must be positively oriented (counter-clockwise)");
    for (std::size_t i = 0; i < n; ++i) {
      const cplx a = vertices[i].value();
      const cplx b = vertices[(i + 1) % n].value();
      if (a == b) throw Error(ErrorKind::InvalidDomain, "polygon has repeated consecutive vertices");
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
        const cplx c = vertices[j].value();
        const cplx d = vertices[(j + 1) % n].value();
        if (adjacent) {
          // Adjacent edges share exactly one vertex; reject fold-backs.
          const cplx shared = (j == i + 1) ? b : a;
          const cplx other_i = (j == i + 1) ? a : b;
          const cplx other_j = (j == i + 1) ? d : c;
          if (detail::orientation_sign(shared, other_i, other_j) == 0 &&
              ((other_i - shared) * std::conj(other_j - shared)).real() > 0.0)
            throw Error(ErrorKind::InvalidDomain, "polygon edges overlap");
        } else if (detail::segments_intersect(a, b, c, d)) {
          throw Error(ErrorKind::InvalidDomain, "polygon is not simple");
        }
      }
    }
    Polygon poly;
    poly.vertices = std::move(vertices);
    poly.cumulative.resize(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      poly.cumulative[i + 1] = poly.cumulative[i] + distance(poly.vertices[i], poly.vertices[(i + 1) % n]);
    poly.perimeter = poly.cumulative[n];
    return DomainSpec(std::move(poly));
  }

  const Variant& variant() const noexcept { return v_; }
  DomainKind kind() const noexcept { return static_cast<DomainKind>(v_.index()); }
  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }
  bool is_bounded() const noexcept { return kind() == DomainKind::Disc || kind() == DomainKind::Polygon; }

 private:
  explicit DomainSpec(Variant v) : v_(std::move(v)) {}

  static void check_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidDomain, "radius must be positive and finite");
  }

  Variant v_;
};

inline std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Disc: return "disc";
    case DomainKind::UpperHalfPlane: return "half_plane";
    case DomainKind::DiscComplement: return "disc_complement";
    case DomainKind::Polygon: return "polygon";
  }
  return "unknown";
}

namespace detail {

inline bool polygon_winding_inside(const Polygon& poly, cplx p) {
  bool inside = false;
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const cplx a = poly.vertices[i].value();
    const cplx b = poly.vertices[j].value();
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      const double x = (b.real() - a.real()) * (p.imag() - a.imag()) / (b.imag() - a.imag()) + a.real();
      if (p.real() < x) inside = !inside;
    }
  }
  return inside;
}

/// Nearest point on the polygon boundary; among equidistant points the one
/// with the smallest boundary parameter wins.
inline std::pair<cplx, double> polygon_nearest(const Polygon& poly, cplx p) {
  const std::size_t n = poly.vertices.size();
  cplx best_point{};
  double best = kPosInf;
  const double tie = 1e-12 * std::max(1.0, poly.perimeter);
  for (std::size_t i = 0; i < n; ++i) {
    const auto proj = project_onto_segment(poly.vertices[i].value(), poly.vertices[(i + 1) % n].value(), p);
    if (proj.dist < best - tie) {
      best = proj.dist;
      best_point = proj.point;
    }
  }
  return {best_point, best};
}

/// Distance to the boundary, positive inside, negative outside, zero on it.
/// Never throws for finite points.
inline double signed_distance(const DomainSpec& d, cplx z) {
  return std::visit(
      [&](const auto& dom) -> double {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return dom.radius - std::abs(z - dom.center.value());
        } else if constexpr (std::is_same_v<T, UpperHalfPlane>) {
          return z.imag();
        } else if constexpr (std::is_same_v<T, DiscComplement>) {
          return std::abs(z - dom.center.value()) - dom.radius;
        } else {
          const double dist = polygon_nearest(dom, z).second;
          if (dist == 0.0) return 0.0;
          return polygon_winding_inside(dom, z) ? dist : -dist;
        }
      },
      d.variant());
}

/// Nearest boundary point, valid for any finite z (used by the random walk
/// after it has converged into the absorbing shell).
inline cplx nearest_point_unchecked(const DomainSpec& d, cplx z) {
  return std::visit(
      [&](const auto& dom) -> cplx {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, Disc> || std::is_same_v<T, DiscComplement>) {
          const cplx c = dom.center.value();
          const double r = std::abs(z - c);
          if (r == 0.0) return c + dom.radius;  // every point ties; t = 0 wins
          return c + dom.radius * (z - c) / r;
        } else if constexpr (std::is_same_v<T, UpperHalfPlane>) {
          return {z.real(), 0.0};
        } else {
          return polygon_nearest(dom, z).first;
        }
      },
      d.variant());
}

}  // namespace detail

/// True when z lies strictly inside the domain. Infinity belongs only to
/// the disc complement.
inline bool contains(const DomainSpec& d, const ComplexPoint& z) {
  if (z.is_infinity()) return d.kind() == DomainKind::DiscComplement;
  return detail::signed_distance(d, z.value()) > 0.0;
}

inline double distance_to_boundary(const DomainSpec& d, const ComplexPoint& z) {
  if (z.is_infinity()) throw Error(ErrorKind::PointOutsideDomain, "distance from infinity is undefined");
  const double dist = detail::signed_distance(d, z.value());
  if (!(dist > 0.0)) throw Error(ErrorKind::PointOutsideDomain, "point is not strictly inside the domain");
  return dist;
}

inline ComplexPoint nearest_boundary_point(const DomainSpec& d, const ComplexPoint& z) {
  distance_to_boundary(d, z);
  return detail::nearest_point_unchecked(d, z.value());
}

/// Canonical boundary parameterisation, t in [0, 1). Circles start at the
/// rightmost point and run counter-clockwise; the real line is covered by
/// t -> tan(pi (t - 1/2)) with t = 0 at infinity; polygons are
/// arclength-proportional from vertex 0.
inline ComplexPoint boundary_point(const DomainSpec& d, double t) {
  if (!(t >= 0.0 && t < 1.0)) throw Error(ErrorKind::InvalidArgument, "boundary parameter must lie in [0, 1)");
  return std::visit(
      [&](const auto& dom) -> ComplexPoint {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, Disc> || std::is_same_v<T, DiscComplement>) {
          return dom.center.value() + dom.radius * std::polar(1.0, kTwoPi * t);
        } else if constexpr (std::is_same_v<T, UpperHalfPlane>) {
          if (t == 0.0) return ComplexPoint::infinity();
          return ComplexPoint(std::tan(kPi * (t - 0.5)), 0.0);
        } else {
          const double s = t * dom.perimeter;
          const auto it = std::upper_bound(dom.cumulative.begin(), dom.cumulative.end(), s);
          const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - dom.cumulative.begin()) - 1,
                                                       dom.vertices.size() - 1);
          const cplx a = dom.vertices[i].value();
          const cplx b = dom.vertices[(i + 1) % dom.vertices.size()].value();
          const double len = dom.cumulative[i + 1] - dom.cumulative[i];
          return a + (s - dom.cumulative[i]) / len * (b - a);
        }
      },
      d.variant());
}

/// Inverse of boundary_point for a point on the boundary (within a relative
/// tolerance of 1e-8).
inline double boundary_parameter(const DomainSpec& d, const ComplexPoint& w) {
  auto wrap = [](double t) {
    t -= std::floor(t);
    return t >= 1.0 ? 0.0 : t;
  };
  if (w.is_infinity()) {
    if (d.kind() == DomainKind::UpperHalfPlane) return 0.0;
    throw Error(ErrorKind::InvalidArgument, "infinity is not a boundary point of this domain");
  }
  const cplx z = w.value();
  return std::visit(
      [&](const auto& dom) -> double {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, Disc> || std::is_same_v<T, DiscComplement>) {
          const cplx rel = z - dom.center.value();
          if (std::abs(std::abs(rel) - dom.radius) > 1e-8 * dom.radius)
            throw Error(ErrorKind::InvalidArgument, "point is not on the circle");
          return wrap(std::arg(rel) / kTwoPi);
        } else if constexpr (std::is_same_v<T, UpperHalfPlane>) {
          if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z.real())))
            throw Error(ErrorKind::InvalidArgument, "point is not on the real axis");
          return wrap(std::atan(z.real()) / kPi + 0.5);
        } else {
          const std::size_t n = dom.vertices.size();
          double best = kPosInf;
          double t = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const auto proj = detail::project_onto_segment(dom.vertices[i].value(), dom.vertices[(i + 1) % n].value(), z);
            if (proj.dist < best) {
              best = proj.dist;
              t = (dom.cumulative[i] + proj.s * (dom.cumulative[i + 1] - dom.cumulative[i])) / dom.perimeter;
            }
          }
          if (best > 1e-8 * dom.perimeter) throw Error(ErrorKind::InvalidArgument, "point is not on the polygon boundary");
          return wrap(t);
        }
      },
      d.variant());
}

/// +1 when increasing t traverses the boundary with the domain on the left,
/// -1 otherwise (only the disc complement).
inline int boundary_orientation(const DomainSpec& d) { return d.kind() == DomainKind::DiscComplement ? -1 : 1; }

/// Length scale used for relative tolerances: diameter for bounded domains
/// and disc complements, 1 for the half-plane.
inline double characteristic_length(const DomainSpec& d) {
  return std::visit(
      [](const auto& dom) -> double {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, Disc> || std::is_same_v<T, DiscComplement>) {
          return 2.0 * dom.radius;
        } else if constexpr (std::is_same_v<T, UpperHalfPlane>) {
          return 1.0;
        } else {
          double xmin = kPosInf, xmax = kNegInf, ymin = kPosInf, ymax = kNegInf;
          for (const auto& v : dom.vertices) {
            xmin = std::min(xmin, v.re());
            xmax = std::max(xmax, v.re());
            ymin = std::min(ymin, v.im());
            ymax = std::max(ymax, v.im());
          }
          return std::hypot(xmax - xmin, ymax - ymin);
        }
      },
      d.variant());
}

// ---------------------------------------------------------------------------
// Boundary arcs

/// Half-open arc [t0, t1) of the canonical parameterisation, traversed in
/// the direction of increasing t and wrapping through 1 -> 0. t0 == t1
/// denotes the whole boundary.
struct BoundaryArc {
  DomainSpec domain;
  double t0 = 0.0;
  double t1 = 0.0;

  BoundaryArc(DomainSpec d, double start, double end) : domain(std::move(d)), t0(start), t1(end) {
    if (!(t0 >= 0.0 && t0 < 1.0 && t1 >= 0.0 && t1 < 1.0))
      throw Error(ErrorKind::InvalidArgument, "arc parameters must lie in [0, 1)");
  }
  static BoundaryArc full(DomainSpec d) { return BoundaryArc(std::move(d), 0.0, 0.0); }

  bool is_full() const noexcept { return t0 == t1; }
  /// Parameter length in (0, 1].
  double span() const noexcept {
    if (is_full()) return 1.0;
    return t1 > t0 ? t1 - t0 : 1.0 - t0 + t1;
  }
  bool contains(double t) const noexcept {
    if (is_full()) return true;
    if (t0 < t1) return t >= t0 && t < t1;
    return t >= t0 || t < t1;
  }
};

// ---------------------------------------------------------------------------
// Moebius maps

/// z -> (a z + b) / (c z + d) with a d - b c != 0.
class MoebiusMap {
 public:
  MoebiusMap(cplx a, cplx b, cplx c, cplx d) : a_(a), b_(b), c_(c), d_(d) {
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (!(scale > 0.0) || !std::isfinite(scale) || std::abs(determinant()) <= 1e-12 * scale * scale)
      throw Error(ErrorKind::DegenerateMap, "Moebius coefficients satisfy ad - bc = 0");
  }

  static MoebiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }
  /// Upper half-plane onto the unit disc, z -> (z - i)/(z + i).
  static MoebiusMap cayley() { return {1.0, cplx(0, -1), 1.0, cplx(0, 1)}; }
  static MoebiusMap affine(cplx scale, cplx shift) { return {scale, shift, 0.0, 1.0}; }

  cplx a() const noexcept { return a_; }
  cplx b() const noexcept { return b_; }
  cplx c() const noexcept { return c_; }
  cplx d() const noexcept { return d_; }
  cplx determinant() const noexcept { return a_ * d_ - b_ * c_; }

 private:
  cplx a_, b_, c_, d_;
};

inline ComplexPoint moebius_apply(const MoebiusMap& m, const ComplexPoint& z) {
  if (z.is_infinity()) {
    if (m.c() == cplx{}) return ComplexPoint::infinity();
    return m.a() / m.c();
  }
  const cplx num = m.a() * z.value() + m.b();
  const cplx den = m.c() * z.value() + m.d();
  if (den == cplx{}) return ComplexPoint::infinity();
  const cplx w = num / den;
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return ComplexPoint::infinity();
  return w;
}

inline MoebiusMap moebius_inverse(const MoebiusMap& m) { return {m.d(), -m.b(), -m.c(), m.a()}; }

/// The map z -> outer(inner(z)), i.e. the 2x2 coefficient matrix product.
inline MoebiusMap moebius_compose(const MoebiusMap& outer, const MoebiusMap& inner) {
  return {outer.a() * inner.a() + outer.b() * inner.c(), outer.a() * inner.b() + outer.b() * inner.d(),
          outer.c() * inner.a() + outer.d() * inner.c(), outer.c() * inner.b() + outer.d() * inner.d()};
}

}  // namespace potkit
