#include "oracles.hpp"
#include "potkit/green.hpp"
#include "potkit/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace potkit;

namespace {

const DomainSpec kUnit = DomainSpec::unit_disc();

// Independent closed forms.
double disc_green_oracle(oracle::cplx z, oracle::cplx zeta) {
  return std::log(std::abs(1.0 - std::conj(zeta) * z) / std::abs(z - zeta));
}

double half_plane_green_oracle(oracle::cplx z, oracle::cplx zeta) {
  return std::log(std::abs(z - std::conj(zeta)) / std::abs(z - zeta));
}

oracle::cplx random_in_disc(RngStream& rng, double rmax) {
  return std::polar(rmax * std::sqrt(rng.uniform()), 2 * oracle::pi * rng.uniform());
}

}  // namespace

TEST(GreenSpec, Validation) {
  EXPECT_THROW(GreenSpec(kUnit, ComplexPoint::infinity()), Error);
  EXPECT_THROW(GreenSpec(kUnit, {1.5, 0}), Error);
  EXPECT_THROW(GreenSpec(DomainSpec::half_plane(), {0, -1}), Error);
  EXPECT_THROW(GreenSpec(DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), {0.5, 0.5}), Error);
  EXPECT_NO_THROW(GreenSpec(DomainSpec::disc_complement({0, 0}, 1.0), ComplexPoint::infinity()));
}

TEST(GreenEval, Examples) {
  EXPECT_NEAR(green_eval(GreenSpec(kUnit, {0, 0}), {0.5, 0}), std::log(2.0), 1e-15);
  const GreenSpec outer(DomainSpec::disc_complement({0, 0}, 1.0), ComplexPoint::infinity());
  EXPECT_NEAR(green_eval(outer, {std::numbers::e, 0}), 1.0, 1e-15);
  EXPECT_NEAR(green_eval(GreenSpec(DomainSpec::half_plane(), {0, 1}), {0, 2}), std::log(3.0), 1e-15);
}

TEST(GreenEval, Errors) {
  const GreenSpec g(kUnit, {0.3, 0});
  try {
    green_eval(g, {0.3, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PoleHit);
  }
  try {
    green_eval(g, {2, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PointOutsideDomain);
  }
}

TEST(GreenEval, MatchesClosedForms) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    RngStream rng(41, i);
    const oracle::cplx zeta = random_in_disc(rng, 0.9);
    const oracle::cplx z = random_in_disc(rng, 0.99);
    EXPECT_NEAR(green_eval(GreenSpec(kUnit, zeta), z), disc_green_oracle(z, zeta), 1e-12);
    const oracle::cplx hz(4 * rng.uniform() - 2, 0.01 + 3 * rng.uniform());
    const oracle::cplx hzeta(4 * rng.uniform() - 2, 0.1 + 3 * rng.uniform());
    EXPECT_NEAR(green_eval(GreenSpec(DomainSpec::half_plane(), hzeta), hz), half_plane_green_oracle(hz, hzeta), 1e-12);
  }
}

TEST(GreenEval, ScaledDiscAndComplement) {
  const auto d = DomainSpec::disc({1, -2}, 3.0);
  const ComplexPoint zeta(1.5, -1.0), z(-0.5, -2.5);
  const oracle::cplx c(1, -2);
  EXPECT_NEAR(green_eval(GreenSpec(d, zeta), z), disc_green_oracle((z.value() - c) / 3.0, (zeta.value() - c) / 3.0), 1e-13);

  // Complement of the unit disc with a finite pole: image under w = 1/z.
  const GreenSpec comp(DomainSpec::disc_complement({0, 0}, 1.0), {3, 0});
  const oracle::cplx w(-1.2, 2.1);
  EXPECT_NEAR(green_eval(comp, w), disc_green_oracle(1.0 / w, 1.0 / 3.0), 1e-13);
}

TEST(GreenEval, NearBoundaryKeepsPrecision) {
  const double eps = 1e-3;
  EXPECT_NEAR(green_eval(GreenSpec(kUnit, {0, 0}), {1 - eps, 0}), -std::log1p(-eps), 1e-15);
  const double tiny = green_eval(GreenSpec(kUnit, {0, 0}), {1 - 1e-12, 0});
  EXPECT_GT(tiny, 0.0);
  EXPECT_NEAR(tiny, 1e-12, 1e-15);
}

TEST(GreenEval, Symmetric) {
  const std::vector<DomainSpec> domains{kUnit, DomainSpec::disc({0.5, 0.5}, 2.0), DomainSpec::half_plane(),
                                        DomainSpec::disc_complement({0, 0}, 1.0)};
  for (std::uint64_t i = 0; i < 50; ++i) {
    RngStream rng(42, i);
    for (const auto& d : domains) {
      oracle::cplx a, b;
      switch (d.kind()) {
        case DomainKind::Disc:
          a = oracle::cplx(0.5, 0.5) + 2.0 * random_in_disc(rng, 0.95);
          b = oracle::cplx(0.5, 0.5) + 2.0 * random_in_disc(rng, 0.95);
          if (d.get_if<Disc>()->radius == 1.0) {
            a = random_in_disc(rng, 0.95);
            b = random_in_disc(rng, 0.95);
          }
          break;
        case DomainKind::UpperHalfPlane:
          a = {4 * rng.uniform() - 2, 0.05 + 2 * rng.uniform()};
          b = {4 * rng.uniform() - 2, 0.05 + 2 * rng.uniform()};
          break;
        default:
          a = std::polar(1.05 + 3 * rng.uniform(), 6.28 * rng.uniform());
          b = std::polar(1.05 + 3 * rng.uniform(), 6.28 * rng.uniform());
      }
      if (std::abs(a - b) < 1e-3) continue;
      const double gab = green_eval(GreenSpec(d, a), b);
      const double gba = green_eval(GreenSpec(d, b), a);
      EXPECT_NEAR(gab, gba, 1e-12 * std::max(1.0, std::abs(gab)));
    }
  }
}

TEST(GreenEval, HalfPlaneIsDiscComposedWithCayley) {
  const auto cayley = MoebiusMap::cayley();
  for (std::uint64_t i = 0; i < 100; ++i) {
    RngStream rng(43, i);
    const ComplexPoint z(6 * rng.uniform() - 3, 0.01 + 4 * rng.uniform());
    const ComplexPoint zeta(6 * rng.uniform() - 3, 0.05 + 4 * rng.uniform());
    if (distance(z, zeta) < 1e-3) continue;
    const double direct = green_eval(GreenSpec(DomainSpec::half_plane(), zeta), z);
    const double mapped = green_eval(GreenSpec(kUnit, moebius_apply(cayley, zeta)), moebius_apply(cayley, z));
    EXPECT_NEAR(direct, mapped, 1e-10);
  }
}

TEST(GreenAxioms, PassOnStandardDomains) {
  for (const auto& g : {GreenSpec(kUnit, {0.3, 0}), GreenSpec(kUnit, {0, 0}), GreenSpec(DomainSpec::disc({2, 1}, 0.5), {2.1, 0.8}),
                        GreenSpec(DomainSpec::half_plane(), {0.5, 1.0}),
                        GreenSpec(DomainSpec::disc_complement({0, 0}, 1.0), ComplexPoint::infinity()),
                        GreenSpec(DomainSpec::disc_complement({1, 1}, 2.0), {1, 4})}) {
    const auto report = green_axioms_check(g);
    EXPECT_TRUE(report.passed()) << (report.violations.empty() ? "" : report.violations.front());
    EXPECT_GE(report.min_value, -1e-12);
    EXPECT_LE(report.max_boundary_value, 5e-3);
  }
  EXPECT_THROW(green_axioms_check(GreenSpec(kUnit, {0, 0}), 5), Error);
}

TEST(GreenAxioms, BoundaryProbeValue) {
  const GreenSpec g(kUnit, {0, 0});
  EXPECT_NEAR(green_eval(g, {0, 1 - 1e-3}), -std::log(1 - 1e-3), 1e-15);
  const auto report = green_axioms_check(g, 20, 3);
  EXPECT_NEAR(report.max_boundary_value, -std::log(1 - 1e-3), 1e-15);
}

TEST(GreenAxioms, PoleNearTheBoundaryIsReported) {
  // Next to the pole's foot the boundary layer is (1 + 0.9)/(1 - 0.9) times thicker.
  const auto report = green_axioms_check(GreenSpec(kUnit, {0.9, 0}), 200);
  EXPECT_FALSE(report.boundary_decay);
  EXPECT_FALSE(report.passed());
  EXPECT_FALSE(report.violations.empty());
  EXPECT_GT(report.max_boundary_value, 5e-3);
}

TEST(NormalDerivative, ArcsFromTheCentre) {
  const GreenSpec g(kUnit, {0, 0});
  for (double span : {0.1, 0.25, 0.5, 0.8}) {
    const double v = green_normal_derivative_measure(g, BoundaryArc(kUnit, 0.1, std::fmod(0.1 + span, 1.0)));
    EXPECT_NEAR(v, span, 1e-4) << span;
  }
}

TEST(NormalDerivative, EqualsHarmonicMeasure) {
  const GreenSpec g(kUnit, {0.5, 0});
  const double right = green_normal_derivative_measure(g, BoundaryArc(kUnit, 0.75, 0.25));
  const double exact = oracle::disc_harmonic_measure(0.0, 1.0, 0.5, -oracle::pi / 2, oracle::pi / 2);
  EXPECT_NEAR(right, exact, 1e-3);
  EXPECT_NEAR(green_normal_derivative_measure(g, BoundaryArc::full(kUnit)), 1.0, 1e-3);
}

TEST(NormalDerivative, RandomPairs) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    RngStream rng(44, i);
    const oracle::cplx c(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
    const double R = 0.5 + 2 * rng.uniform();
    const auto d = DomainSpec::disc(c, R);
    const oracle::cplx zeta = c + R * random_in_disc(rng, 0.8);
    const double t0 = rng.uniform();
    const double t1 = std::fmod(t0 + 0.05 + 0.9 * rng.uniform(), 1.0);
    const double v = green_normal_derivative_measure(GreenSpec(d, zeta), BoundaryArc(d, t0, t1));
    const double exact = oracle::disc_harmonic_measure(c, R, zeta, 2 * oracle::pi * t0, 2 * oracle::pi * t1);
    EXPECT_NEAR(v, exact, 1e-3) << i;
  }
}

TEST(NormalDerivative, Errors) {
  const GreenSpec g(kUnit, {0, 0});
  EXPECT_THROW(green_normal_derivative_measure(GreenSpec(DomainSpec::half_plane(), {0, 1}), BoundaryArc::full(kUnit)), Error);
  EXPECT_THROW(green_normal_derivative_measure(g, BoundaryArc::full(DomainSpec::disc({0, 0}, 2.0))), Error);
  EXPECT_THROW(green_normal_derivative_measure(g, BoundaryArc::full(kUnit), 1e-2), Error);
  EXPECT_THROW(green_normal_derivative_measure(g, BoundaryArc::full(kUnit), 1e-5, 8), Error);
}

TEST(Polynomial, EvalExamples) {
  EXPECT_NEAR(std::abs(poly_eval(PolynomialC::monomial(2), {1, 1}) - oracle::cplx(0, 2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(poly_eval(PolynomialC({1, 2, 0, 1}), 2.0) - 13.0), 0.0, 1e-15);
  EXPECT_EQ(PolynomialC({1, 2, 0, 0}).degree(), 1);
  EXPECT_EQ(PolynomialC::monomial(7).degree(), 7);
  EXPECT_THROW(PolynomialC({0, 0}), Error);
  EXPECT_THROW(PolynomialC({1, NAN}), Error);
}

TEST(SupNorm, Examples) {
  for (int n : {1, 3, 12}) EXPECT_NEAR(sup_norm_on_disc(PolynomialC::monomial(n)).value, 1.0, 1e-14);
  EXPECT_NEAR(sup_norm_on_disc(PolynomialC({oracle::cplx(3, -4)})).value, 5.0, 1e-14);
  const auto s = sup_norm_on_disc(PolynomialC({1, 1}));
  EXPECT_NEAR(s.value, 2.0, 1e-14);
  EXPECT_NEAR(s.angle, 0.0, 1e-12);
  EXPECT_THROW(sup_norm_on_disc(PolynomialC({1, 1}), 64), Error);
}

TEST(SupNorm, RefinementFindsOffGridMaximum) {
  // |1 + e^{-i a} z| peaks at theta = a, between grid nodes.
  const double a = 0.1234567;
  const auto s = sup_norm_on_disc(PolynomialC({1, std::polar(1.0, -a)}));
  EXPECT_NEAR(s.value, 2.0, 1e-12);
  EXPECT_NEAR(s.angle, a, 1e-6);
}

TEST(BernsteinWalsh, Examples) {
  const std::vector<ComplexPoint> probes{{1.1, 0}, {0, 2}, {-10, 0}};
  const auto zn = bernstein_walsh_check(PolynomialC::monomial(5), probes);
  EXPECT_TRUE(zn.holds);
  for (double m : zn.relative_margins) EXPECT_LE(std::abs(m), 1e-12);
  const auto c = bernstein_walsh_check(PolynomialC({2.5}), probes);
  for (double m : c.margins) EXPECT_NEAR(m, 0.0, 1e-14);
  const auto q = bernstein_walsh_check(PolynomialC({1, 1, 1}), probes);
  EXPECT_TRUE(q.holds);
  EXPECT_NEAR(q.sup_norm, 3.0, 1e-12);
  for (double m : q.margins) EXPECT_GT(m, 0.0);
  const std::vector<ComplexPoint> inside{{0.5, 0}};
  try {
    bernstein_walsh_check(PolynomialC({1, 1}), inside);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ProbeInsideDisc);
  }
}

TEST(BernsteinWalsh, RandomPolynomials) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    RngStream rng(45, i);
    const int degree = 1 + static_cast<int>(rng.uniform() * 12);
    std::vector<oracle::cplx> coeffs;
    for (int k = 0; k <= degree; ++k) coeffs.emplace_back(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
    std::vector<ComplexPoint> probes;
    for (int k = 0; k < 10; ++k) probes.emplace_back(std::polar(1.0 + 1e-3 + 5 * rng.uniform(), 6.28 * rng.uniform()));
    const auto report = bernstein_walsh_check(PolynomialC(coeffs), probes);
    EXPECT_TRUE(report.holds) << i;
    for (double m : report.relative_margins) EXPECT_GE(m, -1e-9);
  }
}

TEST(BernsteinWalsh, ScaledDisc) {
  const oracle::cplx c(1, 1);
  // (z - c)^3 is extremal for the disc about c.
  const PolynomialC p({-c * c * c, 3.0 * c * c, -3.0 * c, 1.0});
  const std::vector<ComplexPoint> probes{{4, 1}, {1, -3}};
  const auto r = bernstein_walsh_check(p, probes, c, 2.0);
  EXPECT_NEAR(r.sup_norm, 8.0, 1e-11);
  for (double m : r.relative_margins) EXPECT_LE(std::abs(m), 1e-12);
}
