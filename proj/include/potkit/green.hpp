#pragma once

// Green's functions of discs, the upper half-plane and disc complements via
// Moebius quotients; the normal-derivative / harmonic-measure identity; and
// Bernstein-Walsh growth bounds for polynomials.

#include "potkit/errors.hpp"
#include "potkit/geom.hpp"
#include "potkit/numerics.hpp"
#include "potkit/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace potkit {

/// Green's function g_D(., pole). The pole may be infinity only for a disc
/// complement.
class GreenSpec {
 public:
  GreenSpec(DomainSpec domain, ComplexPoint pole) : domain_(std::move(domain)), pole_(pole) {
    if (domain_.kind() == DomainKind::Polygon)
      throw Error(ErrorKind::InvalidArgument, "Green's functions are available for discs, the half-plane and disc complements");
    if (pole_.is_infinity() && domain_.kind() != DomainKind::DiscComplement)
      throw Error(ErrorKind::InvalidArgument, "a pole at infinity needs a disc complement");
    if (!contains(domain_, pole_)) throw Error(ErrorKind::PointOutsideDomain, "pole must lie strictly inside the domain");
  }

  const DomainSpec& domain() const noexcept { return domain_; }
  const ComplexPoint& pole() const noexcept { return pole_; }

 private:
  DomainSpec domain_;
  ComplexPoint pole_;
};

namespace detail {

/// -log|phi| given phi and 1 - |phi|^2 computed without cancellation.
inline double neg_log_modulus(cplx phi, double one_minus_abs2) {
  const double a2 = std::norm(phi);
  if (a2 < 0.5) return -0.5 * std::log(a2);
  return -0.5 * std::log1p(-one_minus_abs2);
}

/// Unit-disc Green's function g(u, v) = -log|(u - v)/(1 - conj(v) u)|, with
/// u - v, 1 - |u|^2 and 1 - |v|^2 supplied by the caller.
inline double unit_disc_green(cplx u, cplx v, cplx u_minus_v, double one_minus_u2, double one_minus_v2) {
  const cplx den = 1.0 - std::conj(v) * u;
  return neg_log_modulus(u_minus_v / den, one_minus_u2 * one_minus_v2 / std::norm(den));
}

inline double unit_disc_green(cplx u, cplx v) {
  return unit_disc_green(u, v, u - v, 1.0 - std::norm(u), 1.0 - std::norm(v));
}

}  // namespace detail

inline double green_eval(const GreenSpec& g, const ComplexPoint& z) {
  if (!contains(g.domain(), z)) throw Error(ErrorKind::PointOutsideDomain, "z is not inside the domain");
  if (z == g.pole()) throw Error(ErrorKind::PoleHit, "Green's function is +inf at its pole");
  return std::visit(
      [&](const auto& dom) -> double {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, Disc>) {
          const cplx c = dom.center.value();
          const double r = dom.radius;
          auto inner_gap = [&](cplx w) {
            const double d = std::abs(w - c);
            return (r - d) * (r + d) / (r * r);
          };
          const cplx zz = z.value(), p = g.pole().value();
          return detail::unit_disc_green((zz - c) / r, (p - c) / r, (zz - p) / r, inner_gap(zz), inner_gap(p));
        } else if constexpr (std::is_same_v<T, UpperHalfPlane>) {
          const cplx zz = z.value();
          const cplx p = g.pole().value();
          const cplx den = zz - std::conj(p);
          const double complement = 4.0 * zz.imag() * p.imag() / std::norm(den);
          return detail::neg_log_modulus((zz - p) / den, complement);
        } else if constexpr (std::is_same_v<T, DiscComplement>) {
          const cplx c = dom.center.value();
          if (g.pole().is_infinity()) {
            const double ratio = std::abs(z.value() - c) / dom.radius;
            return std::log1p(ratio - 1.0);
          }
          // w = R / (z - c) sends the complement onto the unit disc.
          const double r = dom.radius;
          const cplx zz = z.value() - c, p = g.pole().value() - c;
          auto outer_gap = [&](cplx w) {
            const double d = std::abs(w);
            return (d - r) * (d + r) / (d * d);
          };
          return detail::unit_disc_green(r / zz, r / p, r * (p - zz) / (zz * p), outer_gap(zz), outer_gap(p));
        } else {
          throw Error(ErrorKind::InvalidArgument, "unsupported domain");
        }
      },
      g.domain().variant());
}

struct GreenAxiomsReport {
  bool nonnegative = true;        // g >= -1e-12 at every probe
  bool harmonic = true;           // |Delta_h g| <= 1e-4 away from the pole
  bool logarithmic_pole = true;   // |Delta_h (g + log|z - pole|)| <= 1e-4 near the pole
  bool boundary_decay = true;     // g <= 5e-3 at distance 1e-3 * scale from the boundary
  double min_value = kPosInf;
  double max_harmonic_laplacian = 0.0;
  double max_pole_laplacian = 0.0;
  double max_boundary_value = 0.0;
  std::vector<std::string> violations;

  bool passed() const { return nonnegative && harmonic && logarithmic_pole && boundary_decay; }
};

/// Checks the Green's function axioms at n_probes random probes of each
/// kind (interior, near the pole, near the boundary). For a pole at
/// infinity the pole check uses g - log|z - c| at large |z|.
inline GreenAxiomsReport green_axioms_check(const GreenSpec& g, int n_probes = 50, std::uint64_t seed = 0) {
  if (n_probes < 10) throw Error(ErrorKind::InvalidArgument, "green_axioms_check needs at least 10 probes");
  constexpr double kLaplacianTol = 1e-4;
  constexpr double kBoundaryTol = 5e-3;
  constexpr double kBoundaryGap = 1e-3;

  GreenAxiomsReport report;
  const DomainSpec& d = g.domain();
  const bool pole_at_infinity = g.pole().is_infinity();

  // Characteristic scale: radius, or Im(pole) for the half-plane.
  double scale = 1.0;
  cplx centre{};
  if (const auto* disc = d.get_if<Disc>()) {
    scale = disc->radius;
    centre = disc->center.value();
  } else if (const auto* comp = d.get_if<DiscComplement>()) {
    scale = comp->radius;
    centre = comp->center.value();
  } else {
    scale = g.pole().im();
    centre = {g.pole().re(), 0.0};
  }
  const double h = 1e-4 * scale;
  const double pole_gap = pole_at_infinity ? kPosInf : distance_to_boundary(d, g.pole());

  auto value = [&](double x, double y) { return green_eval(g, ComplexPoint(x, y)); };
  auto note = [&](bool& flag, const std::string& message) {
    flag = false;
    report.violations.push_back(message);
  };

  std::uint64_t stream = 0;
  auto draw_interior = [&](RngStream& rng) -> cplx {
    const double u = rng.uniform();
    const double theta = kTwoPi * rng.uniform();
    switch (d.kind()) {
      case DomainKind::Disc: return centre + scale * std::sqrt(u) * 0.95 * std::polar(1.0, theta);
      case DomainKind::DiscComplement: {
        const double outer = pole_at_infinity ? 5.0 * scale : std::max(5.0 * scale, 2.0 * std::abs(g.pole().value() - centre));
        return centre + (1.05 * scale + u * (outer - 1.05 * scale)) * std::polar(1.0, theta);
      }
      default: return centre + cplx((2.0 * u - 1.0) * 4.0 * scale, (0.05 + 3.95 * rng.uniform()) * scale);
    }
  };

  int accepted = 0;
  while (accepted < n_probes) {
    RngStream rng(seed, stream++);
    const cplx z = draw_interior(rng);
    if (!contains(d, z) || distance_to_boundary(d, z) < 0.05 * scale) continue;
    if (!pole_at_infinity && std::abs(z - g.pole().value()) < 0.25 * std::min(scale, 4.0 * pole_gap)) continue;
    ++accepted;
    const double v = value(z.real(), z.imag());
    report.min_value = std::min(report.min_value, v);
    if (v < -1e-12) note(report.nonnegative, fmt::format("g({},{}) = {} is negative", z.real(), z.imag(), v));
    const double lap = std::abs(five_point_laplacian(value, z.real(), z.imag(), h));
    report.max_harmonic_laplacian = std::max(report.max_harmonic_laplacian, lap);
    if (lap > kLaplacianTol)
      note(report.harmonic, fmt::format("Laplacian {} at {},{} away from the pole", lap, z.real(), z.imag()));
  }

  for (int k = 0; k < n_probes; ++k) {
    RngStream rng(seed, stream++);
    const double u = rng.uniform();
    const double theta = kTwoPi * rng.uniform();
    cplx z;
    std::function<double(double, double)> smooth_part;
    if (pole_at_infinity) {
      z = centre + scale * (10.0 + 40.0 * u) * std::polar(1.0, theta);
      smooth_part = [&](double x, double y) { return value(x, y) - std::log(std::abs(cplx(x, y) - centre)); };
    } else {
      const double reach = std::min(0.1 * scale, 0.5 * pole_gap);
      z = g.pole().value() + reach * (0.2 + 0.8 * u) * std::polar(1.0, theta);
      smooth_part = [&](double x, double y) { return value(x, y) + std::log(std::abs(cplx(x, y) - g.pole().value())); };
    }
    const double step = pole_at_infinity ? h : std::min(h, 1e-4 * std::abs(z - g.pole().value()) * 10.0);
    const double lap = std::abs(five_point_laplacian(smooth_part, z.real(), z.imag(), step));
    report.max_pole_laplacian = std::max(report.max_pole_laplacian, lap);
    if (lap > kLaplacianTol)
      note(report.logarithmic_pole, fmt::format("Laplacian {} of the regular part at {},{}", lap, z.real(), z.imag()));
  }

  for (int k = 0; k < n_probes; ++k) {
    RngStream rng(seed, stream++);
    const double u = rng.uniform();
    const double theta = kTwoPi * u;
    cplx z;
    switch (d.kind()) {
      case DomainKind::Disc: z = centre + scale * (1.0 - kBoundaryGap) * std::polar(1.0, theta); break;
      case DomainKind::DiscComplement: z = centre + scale * (1.0 + kBoundaryGap) * std::polar(1.0, theta); break;
      default: z = cplx(centre.real() + (2.0 * u - 1.0) * 4.0 * scale, kBoundaryGap * scale); break;
    }
    const double v = value(z.real(), z.imag());
    report.min_value = std::min(report.min_value, v);
    report.max_boundary_value = std::max(report.max_boundary_value, v);
    if (v < -1e-12) note(report.nonnegative, fmt::format("g({},{}) = {} is negative", z.real(), z.imag(), v));
    if (v > kBoundaryTol) note(report.boundary_decay, fmt::format("g = {} at {},{} next to the boundary", v, z.real(), z.imag()));
  }
  return report;
}

/// -(1/2pi) int_arc dg/dn ds on a disc, with the outward normal derivative
/// replaced by the one-sided difference -g(w - h n)/h (g vanishes on the
/// boundary) and the arc integral by the trapezoid rule.
inline double green_normal_derivative_measure(const GreenSpec& g, const BoundaryArc& arc, double h = 1e-5,
                                              std::size_t n_nodes = 2048) {
  const auto* disc = g.domain().get_if<Disc>();
  const auto* arc_disc = arc.domain.get_if<Disc>();
  if (!disc || !arc_disc) throw Error(ErrorKind::InvalidArgument, "normal-derivative identity is checked on discs only");
  if (!(arc_disc->center == disc->center) || arc_disc->radius != disc->radius)
    throw Error(ErrorKind::InvalidArgument, "arc lies on a different circle");
  if (!(h >= 1e-6 && h <= 1e-3)) throw Error(ErrorKind::InvalidArgument, "h must lie in [1e-6, 1e-3]");
  if (n_nodes < 16) throw Error(ErrorKind::InvalidArgument, "n_nodes must be at least 16");
  const cplx c = disc->center.value();
  const double radius = disc->radius;
  const double a = kTwoPi * arc.t0;
  const double length = kTwoPi * arc.span();
  const double dphi = length / static_cast<double>(n_nodes);
  auto integrand = [&](double phi) {
    const ComplexPoint inner = c + (radius - h) * std::polar(1.0, phi);
    return green_eval(g, inner) / h * radius;
  };
  std::vector<double> terms;
  if (arc.is_full()) {
    for (std::size_t k = 0; k < n_nodes; ++k) terms.push_back(integrand(a + dphi * static_cast<double>(k)));
  } else {
    for (std::size_t k = 0; k <= n_nodes; ++k) {
      const double weight = (k == 0 || k == n_nodes) ? 0.5 : 1.0;
      terms.push_back(weight * integrand(a + dphi * static_cast<double>(k)));
    }
  }
  return pairwise_sum(terms) * dphi / kTwoPi;
}

// ---------------------------------------------------------------------------
// Polynomials and Bernstein-Walsh

class PolynomialC {
 public:
  /// Coefficients lowest degree first; trailing zeros are dropped.
  explicit PolynomialC(std::vector<cplx> coefficients) : coeffs_(std::move(coefficients)) {
    while (!coeffs_.empty() && coeffs_.back() == cplx{}) coeffs_.pop_back();
    if (coeffs_.empty()) throw Error(ErrorKind::InvalidArgument, "the zero polynomial has no degree");
    for (const auto& c : coeffs_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw Error(ErrorKind::InvalidArgument, "polynomial coefficients must be finite");
  }

  static PolynomialC monomial(int n) {
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1, 0.0);
    c.back() = 1.0;
    return PolynomialC(std::move(c));
  }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<cplx>& coefficients() const noexcept { return coeffs_; }

 private:
  std::vector<cplx> coeffs_;
};

inline cplx poly_eval(const PolynomialC& p, cplx z) {
  const auto& c = p.coefficients();
  cplx acc = c.back();
  for (auto it = c.rbegin() + 1; it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

struct SupNorm {
  double value = 0.0;
  double angle = 0.0;
};

/// max |p| over the closed disc |z - center| <= radius, attained on the
/// circle: n_nodes samples refined by golden-section search.
inline SupNorm sup_norm_on_disc(const PolynomialC& p, std::size_t n_nodes = 1024, cplx center = 0.0, double radius = 1.0) {
  if (n_nodes < 256) throw Error(ErrorKind::InvalidArgument, "sup_norm_on_disc needs at least 256 nodes");
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidRadius, "radius must be positive");
  auto modulus = [&](double theta) { return std::abs(poly_eval(p, center + radius * std::polar(1.0, theta))); };
  const double dtheta = kTwoPi / static_cast<double>(n_nodes);
  SupNorm best{modulus(0.0), 0.0};
  for (std::size_t k = 1; k < n_nodes; ++k) {
    const double theta = dtheta * static_cast<double>(k);
    const double v = modulus(theta);
    if (v > best.value) best = {v, theta};
  }
  const double refined = golden_section_argmax(modulus, best.angle - dtheta, best.angle + dtheta);
  if (const double v = modulus(refined); v > best.value) {
    best.value = v;
    best.angle = refined - kTwoPi * std::floor(refined / kTwoPi);
  }
  return best;
}

struct BernsteinWalshReport {
  double sup_norm = 0.0;
  int degree = 0;
  std::vector<double> margins;           // M e^{n g(z, inf)} - |p(z)|
  std::vector<double> relative_margins;  // margins / (M e^{n g(z, inf)})
  bool holds = true;                     // every relative margin >= -1e-9
};

/// Compares |p(z)| with M (|z - c|/R)^n, the Bernstein-Walsh bound for the
/// closed disc (unit disc by default).
inline BernsteinWalshReport bernstein_walsh_check(const PolynomialC& p, std::span<const ComplexPoint> probes,
                                                  cplx center = 0.0, double radius = 1.0) {
  BernsteinWalshReport report;
  report.degree = p.degree();
  report.sup_norm = sup_norm_on_disc(p, 1024, center, radius).value;
  for (const auto& z : probes) {
    const double ratio = std::abs(z.value() - center) / radius;
    if (!(ratio > 1.0)) throw Error(ErrorKind::ProbeInsideDisc, fmt::format("probe {},{} is not outside the disc", z.re(), z.im()));
    const double bound = report.sup_norm * std::pow(ratio, report.degree);
    const double margin = bound - std::abs(poly_eval(p, z.value()));
    report.margins.push_back(margin);
    report.relative_margins.push_back(margin / bound);
    if (margin < -1e-9 * bound) report.holds = false;
  }
  return report;
}

}  // namespace potkit
