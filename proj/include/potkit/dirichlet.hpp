#pragma once

// Dirichlet problem solvers: the Poisson integral on discs, closed-form and
// conformally transported harmonic measure, exact exit sampling for the
// half-plane, and walk-on-spheres for general domains.

#include "potkit/errors.hpp"
#include "potkit/geom.hpp"
#include "potkit/numerics.hpp"
#include "potkit/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

namespace potkit {

/// Bounded boundary data f on the boundary of a domain.
class BoundaryFunction {
 public:
  enum class Named { Re, Im, Re2 };
  struct Indicator {
    double t0, t1;
  };
  struct Constant {
    double value;
  };
  struct Sampled {
    std::vector<double> params;
    std::vector<double> values;
  };
  struct Custom {
    std::function<double(const ComplexPoint&)> fn;
    double bound;
  };

  static BoundaryFunction re() { return BoundaryFunction(Named::Re, "re"); }
  static BoundaryFunction im() { return BoundaryFunction(Named::Im, "im"); }
  /// Re(w^2).
  static BoundaryFunction re2() { return BoundaryFunction(Named::Re2, "re2"); }
  static BoundaryFunction constant(double c) {
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "constant boundary value must be finite");
    return BoundaryFunction(Constant{c}, "const");
  }
  /// 1 on the half-open parameter arc [t0, t1) (wrapping), 0 elsewhere.
  static BoundaryFunction indicator_arc(double t0, double t1) {
    if (!(t0 >= 0.0 && t0 < 1.0 && t1 >= 0.0 && t1 < 1.0))
      throw Error(ErrorKind::InvalidArgument, "indicator arc parameters must lie in [0, 1)");
    return BoundaryFunction(Indicator{t0, t1}, "indicator_arc");
  }
  /// Periodic linear interpolation of (t, value) samples, t strictly
  /// increasing in [0, 1).
  static BoundaryFunction sampled(std::vector<double> params, std::vector<double> values) {
    if (params.empty() || params.size() != values.size())
      throw Error(ErrorKind::InvalidArgument, "sampled boundary data needs matching, non-empty tables");
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!(params[i] >= 0.0 && params[i] < 1.0)) throw Error(ErrorKind::InvalidArgument, "sample parameters must lie in [0, 1)");
      if (i > 0 && !(params[i] > params[i - 1])) throw Error(ErrorKind::InvalidArgument, "sample parameters must increase strictly");
      if (!std::isfinite(values[i])) throw Error(ErrorKind::InvalidArgument, "sample values must be finite");
    }
    return BoundaryFunction(Sampled{std::move(params), std::move(values)}, "sampled");
  }
  static BoundaryFunction custom(std::function<double(const ComplexPoint&)> fn, double bound, std::string label) {
    if (!std::isfinite(bound)) throw Error(ErrorKind::InvalidArgument, "custom boundary data must be bounded");
    return BoundaryFunction(Custom{std::move(fn), bound}, std::move(label));
  }

  const std::string& label() const noexcept { return label_; }
  bool is_constant() const noexcept { return std::holds_alternative<Constant>(v_); }
  const Indicator* indicator() const noexcept { return std::get_if<Indicator>(&v_); }

  /// Value at the boundary point with parameter t.
  double at_parameter(const DomainSpec& d, double t) const {
    if (const auto* ind = std::get_if<Indicator>(&v_)) return in_arc(*ind, t) ? 1.0 : 0.0;
    if (const auto* s = std::get_if<Sampled>(&v_)) return interpolate(*s, t);
    return at_point(boundary_point(d, t));
  }

  /// Value at a boundary point w.
  double operator()(const DomainSpec& d, const ComplexPoint& w) const {
    if (std::holds_alternative<Indicator>(v_) || std::holds_alternative<Sampled>(v_))
      return at_parameter(d, boundary_parameter(d, w));
    return at_point(w);
  }

  /// sup |f| over the boundary of d (may be +inf for unbounded boundaries).
  double bound(const DomainSpec& d) const {
    if (std::holds_alternative<Indicator>(v_)) return 1.0;
    if (const auto* c = std::get_if<Constant>(&v_)) return std::abs(c->value);
    if (const auto* s = std::get_if<Sampled>(&v_)) {
      double m = 0.0;
      for (double v : s->values) m = std::max(m, std::abs(v));
      return m;
    }
    if (const auto* c = std::get_if<Custom>(&v_)) return c->bound;
    double reach = 0.0;
    if (const auto* disc = d.get_if<Disc>()) reach = disc->center.abs() + disc->radius;
    else if (const auto* poly = d.get_if<Polygon>()) {
      for (const auto& v : poly->vertices) reach = std::max(reach, v.abs());
    } else {
      return kPosInf;
    }
    return std::get<Named>(v_) == Named::Re2 ? reach * reach : reach;
  }

 private:
  using Variant = std::variant<Named, Indicator, Constant, Sampled, Custom>;
  BoundaryFunction(Variant v, std::string label) : v_(std::move(v)), label_(std::move(label)) {}

  static bool in_arc(const Indicator& a, double t) {
    if (a.t0 == a.t1) return true;
    if (a.t0 < a.t1) return t >= a.t0 && t < a.t1;
    return t >= a.t0 || t < a.t1;
  }

  static double interpolate(const Sampled& s, double t) {
    const auto& p = s.params;
    const auto& v = s.values;
    if (p.size() == 1) return v[0];
    auto it = std::upper_bound(p.begin(), p.end(), t);
    double t_lo, t_hi, v_lo, v_hi;
    if (it == p.begin()) {
      t_lo = p.back() - 1.0;
      v_lo = v.back();
      t_hi = p.front();
      v_hi = v.front();
    } else if (it == p.end()) {
      t_lo = p.back();
      v_lo = v.back();
      t_hi = p.front() + 1.0;
      v_hi = v.front();
    } else {
      const auto i = static_cast<std::size_t>(it - p.begin());
      t_lo = p[i - 1];
      v_lo = v[i - 1];
      t_hi = p[i];
      v_hi = v[i];
    }
    const double frac = (t - t_lo) / (t_hi - t_lo);
    return v_lo + frac * (v_hi - v_lo);
  }

  double at_point(const ComplexPoint& w) const {
    if (const auto* c = std::get_if<Constant>(&v_)) return c->value;
    if (const auto* c = std::get_if<Custom>(&v_)) return c->fn(w);
    switch (std::get<Named>(v_)) {
      case Named::Re: return w.re();
      case Named::Im: return w.im();
      case Named::Re2: return (w.value() * w.value()).real();
    }
    return 0.0;
  }

  Variant v_;
  std::string label_;
};

// ---------------------------------------------------------------------------
// Disc: Poisson kernel, Poisson integral, harmonic measure

namespace detail {

inline const Disc& require_disc(const DomainSpec& d) {
  const auto* disc = d.get_if<Disc>();
  if (!disc) throw Error(ErrorKind::InvalidArgument, "operation needs a disc domain");
  return *disc;
}

inline void require_inside_disc(const ComplexPoint& center, double radius, const ComplexPoint& z) {
  const double r = distance(z, center);
  if (r == radius) throw Error(ErrorKind::PointOnBoundary, "point lies on the circle");
  if (r > radius) throw Error(ErrorKind::PointOutsideDomain, "point lies outside the disc");
}

}  // namespace detail

/// (R^2 - |z-c|^2) / |w - z|^2 for w on the circle |w - c| = R.
inline double poisson_kernel(const ComplexPoint& center, double radius, const ComplexPoint& w, const ComplexPoint& z) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidRadius, "radius must be positive");
  if (std::abs(distance(w, center) - radius) > 1e-10 * std::max(1.0, radius))
    throw Error(ErrorKind::InvalidArgument, "w is not on the circle");
  detail::require_inside_disc(center, radius, z);
  const double r2 = std::norm(z.value() - center.value());
  return (radius * radius - r2) / std::norm(w.value() - z.value());
}

/// omega(z, arc) for a disc: adaptive Gauss-Kronrod quadrature of the
/// Poisson kernel over the arc, split around the kernel's peak.
inline double harmonic_measure_disc(const BoundaryArc& arc, const ComplexPoint& z) {
  const Disc& disc = detail::require_disc(arc.domain);
  detail::require_inside_disc(disc.center, disc.radius, z);
  const cplx c = disc.center.value();
  const double radius = disc.radius;
  const cplx zz = z.value();
  const double r2 = std::norm(zz - c);
  auto kernel = [&](double phi) { return (radius * radius - r2) / std::norm(c + radius * std::polar(1.0, phi) - zz); };

  const double a = kTwoPi * arc.t0;
  const double b = a + kTwoPi * arc.span();
  std::vector<double> cuts{a, b};
  const double r = std::sqrt(r2);
  if (r > 0.0) {
    const double width = (radius - r) / radius;
    const double peak = std::arg(zz - c);
    for (int wrap = -1; wrap <= 2; ++wrap) {
      const double centre = peak + kTwoPi * wrap;
      for (double m : {0.0, 1.0, -1.0, 4.0, -4.0, 16.0, -16.0, 64.0, -64.0}) {
        const double x = centre + m * width;
        if (x > a && x < b) cuts.push_back(x);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(kernel, cuts[i], cuts[i + 1], 15, 1e-12);
  }
  return total / kTwoPi;
}

/// Trapezoid rule for (1/2pi) int f(c + R e^{i phi}) P dphi. The node count
/// is raised above n_nodes when z is so close to the circle that the
/// kernel's geometric convergence rate |z-c|/R requires it. Indicator data
/// is integrated over its arc by harmonic_measure_disc instead, since the
/// trapezoid rule loses its accuracy at the jumps.
inline double poisson_solve(const ComplexPoint& center, double radius, const BoundaryFunction& f, const ComplexPoint& z,
                            std::size_t n_nodes = 512) {
  if (n_nodes < 64) throw Error(ErrorKind::InvalidArgument, "poisson_solve needs at least 64 nodes");
  const auto domain = DomainSpec::disc(center, radius);
  detail::require_inside_disc(center, radius, z);
  const double ratio = distance(z, center) / radius;
  if (const auto* ind = f.indicator()) return harmonic_measure_disc(BoundaryArc(domain, ind->t0, ind->t1), z);
  std::size_t n = n_nodes;
  if (ratio > 0.0) {
    const double needed = std::ceil(36.0 / -std::log(ratio));
    n = std::max(n, static_cast<std::size_t>(std::min(needed, 4194304.0)));
  }
  std::vector<double> terms(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    const ComplexPoint w = center.value() + radius * std::polar(1.0, kTwoPi * t);
    terms[k] = f.at_parameter(domain, t) * poisson_kernel(center, radius, w, z);
  }
  return pairwise_sum(terms) / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Upper half-plane

/// (1/pi) (atan((b-x)/y) - atan((a-x)/y)); a and b may be infinite.
inline double harmonic_measure_halfplane(const ComplexPoint& z, double a, double b) {
  if (!(z.im() > 0.0)) throw Error(ErrorKind::NotInUpperHalfPlane, "Im z must be positive");
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "interval needs a < b");
  const double x = z.re();
  const double y = z.im();
  return (std::atan((b - x) / y) - std::atan((a - x) / y)) / kPi;
}

/// Exit point x + y tan(pi (u - 1/2)) of Brownian motion from z, for a
/// given uniform u in (0, 1).
inline double cauchy_exit_from_uniform(const ComplexPoint& z, double u) {
  if (!(z.im() > 0.0)) throw Error(ErrorKind::NotInUpperHalfPlane, "Im z must be positive");
  return z.re() + z.im() * std::tan(kPi * (u - 0.5));
}

inline double sample_exit_halfplane(const ComplexPoint& z, RngStream& rng) {
  return cauchy_exit_from_uniform(z, rng.uniform_open());
}

// ---------------------------------------------------------------------------
// Walk on spheres

struct ExitSample {
  ComplexPoint point;
  bool absorbed = false;
  int steps = 0;
};

/// Jumps to a uniform point of the largest inscribed circle until the walk
/// is within eps of the boundary (absorbed at the nearest boundary point) or
/// max_steps jumps have been made (not absorbed; point is the last
/// position).
inline ExitSample wos_sample_exit(const DomainSpec& d, const ComplexPoint& z0, double eps, int max_steps, RngStream& rng) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  if (max_steps < 0) throw Error(ErrorKind::InvalidArgument, "max_steps must be non-negative");
  distance_to_boundary(d, z0);
  cplx z = z0.value();
  double dist = detail::signed_distance(d, z);
  int steps = 0;
  while (true) {
    if (dist < eps) return {detail::nearest_point_unchecked(d, z), true, steps};
    if (steps >= max_steps) return {z, false, steps};
    z += dist * std::polar(1.0, kTwoPi * rng.uniform());
    ++steps;
    dist = detail::signed_distance(d, z);
  }
}

/// eps used when none is given: 1e-6 of the domain's length scale.
inline double default_wos_eps(const DomainSpec& d) { return 1e-6 * characteristic_length(d); }

struct WosOptions {
  double eps = 1e-6;
  int max_steps = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_absorbed = 0;
  std::size_t n_escaped = 0;
  double mean_steps = 0.0;
};

class TooFewAbsorbedError : public Error {
 public:
  explicit TooFewAbsorbedError(McEstimate estimate)
      : Error(ErrorKind::TooFewAbsorbed,
              fmt::format("only {} of {} walks were absorbed", estimate.n_absorbed, estimate.n_samples)),
        estimate_(estimate) {}
  const McEstimate& estimate() const noexcept { return estimate_; }

 private:
  McEstimate estimate_;
};

namespace detail {

/// Runs body(i) for i in [0, n) on up to `threads` workers, each owning a
/// contiguous block of indices.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, const Body& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace detail

/// Monte Carlo estimate of the harmonic extension of f at z0. Sample i uses
/// RngStream(seed, i); escaped walks are counted but excluded from the mean.
inline McEstimate wos_solve(const DomainSpec& d, const BoundaryFunction& f, const ComplexPoint& z0, std::size_t n_samples,
                            const WosOptions& opts = {}) {
  if (n_samples < 100) throw Error(ErrorKind::InvalidArgument, "wos_solve needs at least 100 samples");
  distance_to_boundary(d, z0);
  std::vector<double> values(n_samples, 0.0);
  std::vector<char> absorbed(n_samples, 0);
  std::vector<double> steps(n_samples, 0.0);
  std::vector<char> failed(n_samples, 0);
  detail::parallel_for(n_samples, opts.threads, [&](std::size_t i) {
    try {
      RngStream rng(opts.seed, i);
      const auto exit = wos_sample_exit(d, z0, opts.eps, opts.max_steps, rng);
      steps[i] = exit.steps;
      if (exit.absorbed) {
        absorbed[i] = 1;
        values[i] = f(d, exit.point);
      }
    } catch (...) {
      failed[i] = 1;
    }
  });
  for (std::size_t i = 0; i < n_samples; ++i)
    if (failed[i]) throw Error(ErrorKind::InvalidArgument, fmt::format("walk {} failed to evaluate the boundary data", i));

  McEstimate est;
  est.n_samples = n_samples;
  std::vector<double> hits;
  hits.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    if (absorbed[i]) hits.push_back(values[i]);
  est.n_absorbed = hits.size();
  est.n_escaped = n_samples - hits.size();
  est.mean_steps = pairwise_sum(steps) / static_cast<double>(n_samples);
  if (!hits.empty()) {
    const double shift = hits.front();
    std::vector<double> dev(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) dev[i] = hits[i] - shift;
    est.mean = shift + pairwise_sum(dev) / static_cast<double>(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) dev[i] = (hits[i] - est.mean) * (hits[i] - est.mean);
    const double dof = static_cast<double>(std::max<std::size_t>(hits.size() - 1, 1));
    est.std_error = std::sqrt(pairwise_sum(dev) / dof / static_cast<double>(hits.size()));
  }
  if (static_cast<double>(est.n_absorbed) < 0.9 * static_cast<double>(n_samples)) throw TooFewAbsorbedError(est);
  return est;
}

// ---------------------------------------------------------------------------
// Conformal transport of harmonic measure

/// omega_source(z, arc) computed as omega_target(m(z), m(arc)), where m maps
/// source onto target and target is a disc or the upper half-plane.
inline double pushforward_measure(const MoebiusMap& m, const DomainSpec& source, const DomainSpec& target,
                                  const ComplexPoint& z, const BoundaryArc& arc) {
  if (arc.domain.kind() != source.kind()) throw Error(ErrorKind::InvalidArgument, "arc is not on the source domain");
  if (target.kind() != DomainKind::Disc && target.kind() != DomainKind::UpperHalfPlane)
    throw Error(ErrorKind::InvalidArgument, "pushforward target must be a disc or the upper half-plane");
  if (!contains(source, z)) throw Error(ErrorKind::PointOutsideDomain, "z is not inside the source domain");

  const double scale = characteristic_length(target);
  for (int k = 0; k < 8; ++k) {
    const ComplexPoint image = moebius_apply(m, boundary_point(source, (k + 0.5) / 8.0));
    const bool on_boundary = image.is_infinity() ? target.kind() == DomainKind::UpperHalfPlane
                                                 : std::abs(detail::signed_distance(target, image.value())) <= 1e-8 * scale;
    if (!on_boundary) throw Error(ErrorKind::MapDomainMismatch, "map does not send the source boundary to the target boundary");
  }
  const ComplexPoint wz = moebius_apply(m, z);
  if (wz.is_infinity() || !contains(target, wz)) throw Error(ErrorKind::MapDomainMismatch, "map does not send z into the target");
  if (arc.is_full()) return 1.0;

  // Endpoints in the direction that keeps the domain on the left.
  double start = arc.t0, end = arc.t1;
  if (boundary_orientation(source) < 0) std::swap(start, end);
  const double tau0 = boundary_parameter(target, moebius_apply(m, boundary_point(source, start)));
  const double tau1 = boundary_parameter(target, moebius_apply(m, boundary_point(source, end)));

  if (target.kind() == DomainKind::Disc) return harmonic_measure_disc(BoundaryArc(target, tau0, tau1), wz);

  auto x_of = [](double tau) { return std::tan(kPi * (tau - 0.5)); };
  if (tau0 == 0.0) return harmonic_measure_halfplane(wz, kNegInf, x_of(tau1));
  if (tau1 == 0.0) return harmonic_measure_halfplane(wz, x_of(tau0), kPosInf);
  if (tau0 < tau1) return harmonic_measure_halfplane(wz, x_of(tau0), x_of(tau1));
  return harmonic_measure_halfplane(wz, x_of(tau0), kPosInf) + harmonic_measure_halfplane(wz, kNegInf, x_of(tau1));
}

}  // namespace potkit
