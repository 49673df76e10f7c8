#pragma once

// Circle and disc means, the radial mollifier, and submean / mean-value
// utilities for (sub)harmonic test functions.

#include "potkit/errors.hpp"
#include "potkit/geom.hpp"
#include "potkit/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace potkit {

/// Real-valued field on the plane with values in [-inf, inf).
class ScalarField {
 public:
  using Fn = std::function<double(const ComplexPoint&)>;

  ScalarField(Fn fn, std::string label) : fn_(std::move(fn)), label_(std::move(label)) {}

  double operator()(const ComplexPoint& z) const {
    const double v = fn_(z);
    if (std::isnan(v) || v == kPosInf) throw Error(ErrorKind::InvalidArgument, "field '" + label_ + "' returned NaN or +inf");
    return v;
  }
  const std::string& label() const noexcept { return label_; }

 private:
  Fn fn_;
  std::string label_;
};

namespace fields {

inline ScalarField constant(double c) {
  return {[c](const ComplexPoint&) { return c; }, "const"};
}
inline ScalarField re() {
  return {[](const ComplexPoint& z) { return z.re(); }, "re"};
}
inline ScalarField im() {
  return {[](const ComplexPoint& z) { return z.im(); }, "im"};
}
/// Re(z^k).
inline ScalarField re_pow(int k) {
  return {[k](const ComplexPoint& z) { return std::pow(z.value(), k).real(); }, "re_pow" + std::to_string(k)};
}
/// Im(z^k).
inline ScalarField im_pow(int k) {
  return {[k](const ComplexPoint& z) { return std::pow(z.value(), k).imag(); }, "im_pow" + std::to_string(k)};
}
inline ScalarField abs2() {
  return {[](const ComplexPoint& z) { return std::norm(z.value()); }, "abs2"};
}
/// log|z - w|, -inf at w.
inline ScalarField log_distance(ComplexPoint w) {
  return {[w](const ComplexPoint& z) {
            const double r = std::abs(z.value() - w.value());
            return r == 0.0 ? kNegInf : std::log(r);
          },
          "log_distance"};
}
/// max(Re z, 0).
inline ScalarField positive_part_re() {
  return {[](const ComplexPoint& z) { return std::max(z.re(), 0.0); }, "max_re0"};
}

}  // namespace fields

/// Trapezoid rule for (1/2pi) int f(center + r e^{it}) dt. Any node value of
/// -inf makes the mean -inf.
inline double surface_mean(const ScalarField& f, const ComplexPoint& center, double r, std::size_t n_nodes = 512) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidRadius, "surface mean radius must be positive");
  if (n_nodes < 16) throw Error(ErrorKind::InvalidArgument, "surface mean needs at least 16 nodes");
  std::vector<double> values(n_nodes);
  const cplx c = center.value();
  for (std::size_t k = 0; k < n_nodes; ++k) {
    const double v = f(c + r * std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(n_nodes)));
    if (v == kNegInf) return kNegInf;
    values[k] = v;
  }
  return pairwise_sum(values) / static_cast<double>(n_nodes);
}

/// (1 / pi r^2) int_{|z-center|<r} f dm by Gauss-Legendre in the radius
/// (with Jacobian s) times the trapezoid rule in the angle.
inline double space_mean(const ScalarField& f, const ComplexPoint& center, double r, std::size_t n_radial = 32,
                         std::size_t n_angular = 64) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidRadius, "space mean radius must be positive");
  if (n_radial < 8 || n_angular < 16) throw Error(ErrorKind::InvalidArgument, "space mean needs n_radial >= 8, n_angular >= 16");
  const auto rule = gauss_legendre(n_radial, 0.0, r);
  const cplx c = center.value();
  std::vector<double> terms;
  terms.reserve(n_radial * n_angular);
  for (std::size_t i = 0; i < n_radial; ++i) {
    const double s = rule.nodes[i];
    const double w = rule.weights[i] * s * 2.0 / (r * r * static_cast<double>(n_angular));
    for (std::size_t k = 0; k < n_angular; ++k) {
      const double v = f(c + s * std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(n_angular)));
      if (v == kNegInf) return kNegInf;
      terms.push_back(w * v);
    }
  }
  return pairwise_sum(terms);
}

/// Closed form of (1/2pi) int log|r e^{it} - w| dt: log|w| when r <= |w|,
/// log r otherwise.
inline double circle_average_log(double r, const ComplexPoint& w) {
  const double aw = w.abs();
  if (r == 0.0 && aw == 0.0) throw Error(ErrorKind::UndefinedAtZero, "log|0| averaged over a degenerate circle");
  if (r < 0.0 || !std::isfinite(r)) throw Error(ErrorKind::InvalidRadius, "radius must be non-negative");
  return r <= aw ? std::log(aw) : std::log(r);
}

/// chi_delta(x) = C delta^-2 exp(-1 / (1 - |x/delta|^2)) on |x| < delta,
/// normalised to unit integral.
class MollifierSpec {
 public:
  explicit MollifierSpec(double scale) : scale_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::InvalidRadius, "mollifier scale must be positive");
    normalization_ = unit_normalization();
  }

  double scale() const noexcept { return scale_; }
  /// C for the unit-scale bump.
  double normalization() const noexcept { return normalization_; }

  /// Kernel value at distance rho from the centre.
  double kernel(double rho) const {
    const double u = rho / scale_;
    if (u >= 1.0) return 0.0;
    return normalization_ / (scale_ * scale_) * std::exp(-1.0 / (1.0 - u * u));
  }

  /// int_{|x|<1} exp(-1/(1-|x|^2)) dm(x), by adaptive radial quadrature.
  static double unit_bump_integral() {
    static const double value = [] {
      auto radial = [](double rho) { return rho < 1.0 ? kTwoPi * rho * std::exp(-1.0 / (1.0 - rho * rho)) : 0.0; };
      return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, 1.0, 15, 1e-15);
    }();
    return value;
  }

 private:
  static double unit_normalization() {
    static const double c = [] {
      const double norm = 1.0 / unit_bump_integral();
      // Independent check on a tensor polar grid.
      const auto rule = gauss_legendre(96, 0.0, 1.0);
      double mass = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = rule.nodes[i];
        mass += rule.weights[i] * s * kTwoPi * norm * std::exp(-1.0 / (1.0 - s * s));
      }
      if (std::abs(mass - 1.0) > 1e-8) throw Error(ErrorKind::InvalidArgument, "mollifier normalisation check failed");
      return norm;
    }();
    return c;
  }

  double scale_;
  double normalization_ = 0.0;
};

/// (f * chi_delta)(z) by polar quadrature about z.
inline double mollify(const ScalarField& f, const MollifierSpec& m, const ComplexPoint& z, std::size_t n_radial = 64,
                      std::size_t n_angular = 128) {
  const double delta = m.scale();
  const auto rule = gauss_legendre(n_radial, 0.0, delta);
  const cplx c = z.value();
  std::vector<double> terms;
  terms.reserve(n_radial * n_angular);
  const double dtheta = kTwoPi / static_cast<double>(n_angular);
  for (std::size_t i = 0; i < n_radial; ++i) {
    const double s = rule.nodes[i];
    const double w = rule.weights[i] * s * m.kernel(s) * dtheta;
    for (std::size_t k = 0; k < n_angular; ++k) {
      const double v = f(c + s * std::polar(1.0, dtheta * static_cast<double>(k)));
      if (v == kNegInf) throw Error(ErrorKind::SingularityInSupport, "field is -inf inside the mollifier support");
      terms.push_back(w * v);
    }
  }
  return pairwise_sum(terms);
}

struct SubmeanReport {
  std::vector<double> radii;
  std::vector<double> margin;  // surface mean minus centre value
  std::vector<bool> holds;

  bool all_hold() const {
    for (bool h : holds)
      if (!h) return false;
    return true;
  }
};

/// margin(r) = S_f(center, r) - f(center) with 512 circle nodes; the
/// inequality holds when margin >= -1e-7. A centre value of -inf holds
/// trivially with margin +inf.
inline SubmeanReport submean_check(const ScalarField& f, const ComplexPoint& center, std::span<const double> radii) {
  constexpr double kSlack = 1e-7;
  SubmeanReport report;
  const double at_center = f(center);
  for (double r : radii) {
    report.radii.push_back(r);
    if (at_center == kNegInf) {
      report.margin.push_back(kPosInf);
      report.holds.push_back(true);
      continue;
    }
    const double mean = surface_mean(f, center, r, 512);
    const double margin = mean == kNegInf ? kNegInf : mean - at_center;
    report.margin.push_back(margin);
    report.holds.push_back(margin >= -kSlack);
  }
  return report;
}

/// Surface means S_f(center, r) for ascending radii.
inline std::vector<double> monotone_radial_means(const ScalarField& f, const ComplexPoint& center,
                                                 std::span<const double> radii) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw Error(ErrorKind::InvalidArgument, "radii must be strictly ascending");
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(surface_mean(f, center, r, 512));
  return out;
}

inline bool is_non_decreasing(std::span<const double> values, double slack) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[i - 1] - slack) return false;
  return true;
}

}  // namespace potkit
