#include "oracles.hpp"
#include "potkit/domain_io.hpp"
#include "potkit/geom.hpp"
#include "potkit/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace potkit;

namespace {

const cplx I(0.0, 1.0);

DomainSpec square4() { return DomainSpec::polygon({{0, 0}, {4, 0}, {4, 4}, {0, 4}}); }

void expect_near(const ComplexPoint& a, cplx b, double tol) {
  ASSERT_FALSE(a.is_infinity());
  EXPECT_NEAR(a.re(), b.real(), tol);
  EXPECT_NEAR(a.im(), b.imag(), tol);
}

}  // namespace

TEST(ComplexPoint, RejectsNonFiniteCoordinates) {
  EXPECT_THROW(ComplexPoint(NAN, 0.0), Error);
  EXPECT_THROW(ComplexPoint(0.0, INFINITY), Error);
}

TEST(ComplexPoint, InfinityRejectsArithmetic) {
  const auto inf = ComplexPoint::infinity();
  EXPECT_TRUE(inf.is_infinity());
  try {
    (void)(inf + ComplexPoint(1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InfinityArithmetic);
  }
  EXPECT_THROW((void)inf.abs(), Error);
  EXPECT_TRUE(inf == ComplexPoint::infinity());
  EXPECT_FALSE(inf == ComplexPoint(0.0, 0.0));
}

TEST(DomainSpec, Validation) {
  EXPECT_THROW(DomainSpec::disc({0, 0}, 0.0), Error);
  EXPECT_THROW(DomainSpec::disc_complement({0, 0}, -1.0), Error);
  EXPECT_THROW(DomainSpec::polygon({{0, 0}, {1, 0}}), Error);
  // clockwise
  EXPECT_THROW(DomainSpec::polygon({{0, 0}, {0, 4}, {4, 4}, {4, 0}}), Error);
  // bow-tie
  EXPECT_THROW(DomainSpec::polygon({{0, 0}, {4, 4}, {4, 0}, {0, 4}}), Error);
  EXPECT_NO_THROW(square4());
}

TEST(DistanceToBoundary, Examples) {
  EXPECT_DOUBLE_EQ(distance_to_boundary(DomainSpec::unit_disc(), {0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(distance_to_boundary(DomainSpec::half_plane(), {3, 2}), 2.0);
  const auto scan = oracle::polygon_boundary_scan({{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {1, 2});
  EXPECT_NEAR(distance_to_boundary(square4(), {1, 2}), scan.first, 1e-9);
  EXPECT_DOUBLE_EQ(distance_to_boundary(square4(), {1, 2}), 1.0);
}

TEST(DistanceToBoundary, RejectsPointsOnOrOutside) {
  for (const ComplexPoint z : {ComplexPoint(1, 0), ComplexPoint(2, 0)}) {
    try {
      distance_to_boundary(DomainSpec::unit_disc(), z);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::PointOutsideDomain);
    }
  }
  EXPECT_THROW(distance_to_boundary(DomainSpec::half_plane(), {0, 0}), Error);
  EXPECT_THROW(distance_to_boundary(DomainSpec::disc_complement({0, 0}, 1), {0.5, 0}), Error);
  EXPECT_THROW(distance_to_boundary(square4(), {5, 1}), Error);
}

TEST(NearestBoundaryPoint, Examples) {
  expect_near(nearest_boundary_point(DomainSpec::unit_disc(), {0.5, 0}), 1.0, 1e-15);
  expect_near(nearest_boundary_point(DomainSpec::half_plane(), {3, 2}), 3.0, 0.0);
  expect_near(nearest_boundary_point(square4(), {1, 2}), {0, 2}, 1e-15);
  const auto scan = oracle::polygon_boundary_scan({{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {1, 2});
  expect_near(nearest_boundary_point(square4(), {1, 2}), scan.second, 1e-9);
}

TEST(NearestBoundaryPoint, TieTakesSmallestParameter) {
  // The centre of the square is equidistant from all four edges; edge 0
  // (the bottom) carries the smallest parameters.
  expect_near(nearest_boundary_point(square4(), {2, 2}), {2, 0}, 1e-15);
}

TEST(DistanceToBoundary, MatchesNearestPointOnRandomInteriorPoints) {
  const std::vector<DomainSpec> domains{DomainSpec::disc({0.5, -1}, 2.0), DomainSpec::half_plane(),
                                        DomainSpec::disc_complement({1, 1}, 0.5), square4(),
                                        DomainSpec::polygon({{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 3}, {0, 3}})};
  for (std::size_t k = 0; k < domains.size(); ++k) {
    const auto& d = domains[k];
    int tested = 0;
    for (std::uint64_t i = 0; tested < 100; ++i) {
      RngStream rng(42 + k, i);
      const ComplexPoint z(-2.0 + 8.0 * rng.uniform(), -2.0 + 8.0 * rng.uniform());
      if (!contains(d, z)) continue;
      ++tested;
      EXPECT_NEAR(distance_to_boundary(d, z), distance(z, nearest_boundary_point(d, z)), 1e-12);
    }
  }
}

TEST(DistanceToBoundary, DiscClosedFormMatchesScan) {
  const auto d = DomainSpec::disc({0.3, -0.2}, 1.5);
  for (std::uint64_t i = 0; i < 20; ++i) {
    RngStream rng(7, i);
    const cplx z = cplx(0.3, -0.2) + 1.4 * std::sqrt(rng.uniform()) * std::polar(1.0, 2 * oracle::pi * rng.uniform());
    double scan = INFINITY;
    for (int k = 0; k < 400000; ++k) scan = std::min(scan, std::abs(z - (cplx(0.3, -0.2) + std::polar(1.5, 2 * oracle::pi * k / 400000))));
    EXPECT_NEAR(distance_to_boundary(d, z), scan, 1e-9);
    EXPECT_DOUBLE_EQ(distance_to_boundary(d, z), 1.5 - std::abs(z - cplx(0.3, -0.2)));
  }
}

TEST(BoundaryPoint, Examples) {
  expect_near(boundary_point(DomainSpec::unit_disc(), 0.0), 1.0, 0.0);
  expect_near(boundary_point(DomainSpec::unit_disc(), 0.25), I, 1e-15);
  expect_near(boundary_point(DomainSpec::half_plane(), 0.5), 0.0, 0.0);
  EXPECT_TRUE(boundary_point(DomainSpec::half_plane(), 0.0).is_infinity());
  expect_near(boundary_point(square4(), 0.0), 0.0, 0.0);
  expect_near(boundary_point(square4(), 0.3), {4, 0.8}, 1e-12);
}

TEST(BoundaryPoint, ParameterRoundTrip) {
  const std::vector<DomainSpec> domains{DomainSpec::disc({1, 2}, 3.0), DomainSpec::half_plane(),
                                        DomainSpec::disc_complement({0, 0}, 2.0), square4()};
  for (const auto& d : domains)
    for (double t = 0.01; t < 1.0; t += 0.0731) EXPECT_NEAR(boundary_parameter(d, boundary_point(d, t)), t, 1e-12);
  EXPECT_THROW(boundary_point(DomainSpec::unit_disc(), 1.0), Error);
}

TEST(BoundaryArc, HalfOpenAndWrapping) {
  const BoundaryArc arc(DomainSpec::unit_disc(), 0.75, 0.25);
  EXPECT_DOUBLE_EQ(arc.span(), 0.5);
  EXPECT_TRUE(arc.contains(0.75));
  EXPECT_TRUE(arc.contains(0.0));
  EXPECT_FALSE(arc.contains(0.25));
  EXPECT_FALSE(arc.contains(0.5));
  EXPECT_TRUE(BoundaryArc::full(DomainSpec::unit_disc()).is_full());
  EXPECT_THROW(BoundaryArc(DomainSpec::unit_disc(), -0.1, 0.2), Error);
}

TEST(Moebius, ApplyExamples) {
  const auto phi = MoebiusMap::cayley();
  expect_near(moebius_apply(phi, I), 0.0, 0.0);
  expect_near(moebius_apply(MoebiusMap::identity(), {2, 3}), {2, 3}, 0.0);
  expect_near(moebius_apply(phi, {0, 0}), -1.0, 1e-15);
  EXPECT_TRUE(moebius_apply(phi, -I).is_infinity());
  expect_near(moebius_apply(phi, ComplexPoint::infinity()), 1.0, 0.0);
}

TEST(Moebius, InverseExamples) {
  const auto id = moebius_inverse(MoebiusMap::identity());
  expect_near(moebius_apply(id, {2, 3}), {2, 3}, 0.0);
  const auto psi = moebius_inverse(MoebiusMap::cayley());
  expect_near(moebius_apply(psi, {0, 0}), I, 1e-15);
  const auto half = moebius_inverse(MoebiusMap(2.0, 0.0, 0.0, 1.0));
  expect_near(moebius_apply(half, {3, 1}), {1.5, 0.5}, 1e-15);
}

TEST(Moebius, DegenerateMapRejected) {
  try {
    MoebiusMap(1.0, 2.0, 2.0, 4.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateMap);
  }
  EXPECT_THROW(MoebiusMap(1.0, 1.0, 1.0, 1.0 + 1e-14), Error);
}

TEST(Moebius, InverseRoundTripOnRandomPoints) {
  for (std::uint64_t k = 0; k < 10; ++k) {
    RngStream coef(3, k);
    auto draw = [&] { return cplx(2 * coef.uniform() - 1, 2 * coef.uniform() - 1); };
    const MoebiusMap m(draw(), draw(), draw(), draw());
    if (std::abs(m.determinant()) < 0.1) continue;
    const auto n = moebius_inverse(m);
    for (std::uint64_t i = 0; i < 100; ++i) {
      RngStream rng(4 + k, i);
      const cplx z(4 * rng.uniform() - 2, 4 * rng.uniform() - 2);
      if (std::abs(m.c() * z + m.d()) < 1e-3 * std::abs(m.c())) continue;
      const auto back = moebius_apply(n, moebius_apply(m, z));
      ASSERT_FALSE(back.is_infinity());
      EXPECT_LT(std::abs(back.value() - z), 1e-10 * std::max(1.0, std::abs(z)));
    }
  }
}

TEST(Moebius, CompositionIsMatrixProduct) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    RngStream coef(5, k);
    auto draw = [&] { return cplx(2 * coef.uniform() - 1, 2 * coef.uniform() - 1); };
    const MoebiusMap m(draw(), draw(), draw(), draw());
    const MoebiusMap n(draw(), draw(), draw(), draw());
    const auto mn = moebius_compose(m, n);
    for (std::uint64_t i = 0; i < 20; ++i) {
      RngStream rng(6 + k, i);
      const cplx z(4 * rng.uniform() - 2, 4 * rng.uniform() - 2);
      const auto inner = moebius_apply(n, z);
      if (inner.is_infinity() || std::abs(m.c() * inner.value() + m.d()) < 1e-3) continue;
      const auto lhs = moebius_apply(mn, z);
      const auto rhs = moebius_apply(m, inner);
      EXPECT_LT(std::abs(lhs.value() - rhs.value()), 1e-10 * std::max(1.0, std::abs(rhs.value())));
    }
  }
}

TEST(Moebius, CayleyMapsHalfPlaneOntoDisc) {
  const auto phi = MoebiusMap::cayley();
  for (double x = -5; x <= 5; x += 0.5) EXPECT_NEAR(moebius_apply(phi, {x, 0}).abs(), 1.0, 1e-14);
  for (double y = 0.1; y < 5; y += 0.7) EXPECT_LT(moebius_apply(phi, {0.3, y}).abs(), 1.0);
}

TEST(DomainFile, ParsesAllKinds) {
  const auto d = parse_domain("# a disc\nkind = disc\ncx = 1.5\ncy = -2\nr = 0.5\n");
  const auto* disc = d.get_if<Disc>();
  ASSERT_NE(disc, nullptr);
  EXPECT_EQ(disc->center.re(), 1.5);
  EXPECT_EQ(disc->center.im(), -2.0);
  EXPECT_EQ(disc->radius, 0.5);
  EXPECT_EQ(parse_domain("kind = half_plane").kind(), DomainKind::UpperHalfPlane);
  EXPECT_EQ(parse_domain("kind = disc_complement\nr = 2").kind(), DomainKind::DiscComplement);
  const auto poly = parse_domain("kind = polygon\nvertices = 0,0; 1,0; 1,1; 0,1");
  EXPECT_EQ(poly.get_if<Polygon>()->vertices.size(), 4u);
}

TEST(DomainFile, RejectsUnknownAndMisplacedKeys) {
  for (const char* text : {"kind = disc\nr = 1\ncolour = red", "kind = half_plane\nr = 1", "kind = polygon\ncx = 0\nvertices = 0,0;1,0;0,1",
                           "kind = ellipse", "r = 1", "kind = disc", "kind = disc\nr = 1\nr = 2", "kind = disc\nr = abc"}) {
    try {
      parse_domain(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_TRUE(e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::InvalidDomain) << text;
    }
  }
}

TEST(DomainFile, FormatRoundTrip) {
  for (const auto& d : {DomainSpec::disc({0.1, 0.7}, 1.0 / 3.0), DomainSpec::half_plane(),
                        DomainSpec::disc_complement({-1, 0}, 2.5), square4()}) {
    const auto text = format_domain(d);
    EXPECT_EQ(format_domain(parse_domain(text)), text);
  }
}
