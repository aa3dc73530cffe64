#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "conetrace/cone_geometry.hpp"
#include "conetrace/diffraction.hpp"
#include "conetrace/errors.hpp"
#include "doctest.h"

using namespace conetrace;
using std::numbers::pi;

namespace {

std::vector<Point2> unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

// Triangle with interior angles (a, b, pi - a - b), counterclockwise.
std::vector<Point2> triangle(double a, double b) {
  double c = pi - a - b;
  double side = std::sin(b) / std::sin(c);
  return {{0, 0}, {1, 0}, {side * std::cos(a), side * std::sin(a)}};
}

std::vector<Point2> random_star_polygon(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> radius(0.4, 1.0), jitter(-0.3, 0.3);
  std::vector<Point2> out;
  for (int i = 0; i < n; ++i) {
    double t = 2 * pi * (i + 0.5 + jitter(rng)) / n;
    double r = radius(rng);
    out.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return out;
}

}  // namespace

TEST_CASE("link_distance examples") {
  CHECK(link_distance(LinkCircle(2 * pi), 0, pi) == doctest::Approx(pi));
  CHECK(link_distance(LinkCircle(pi), 0, 0.9 * pi) == doctest::Approx(0.1 * pi));
  CHECK(link_distance(LinkCircle(4 * pi), 0, 3 * pi) == doctest::Approx(pi));
  CHECK(link_distance(LinkCircle(3.0), -1.0, 7.0) == doctest::Approx(1.0));
}

TEST_CASE("link_distance is a metric bounded by alpha/2") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> alpha(0.2, 30.0), theta(-50.0, 50.0);
  for (int trial = 0; trial < 2000; ++trial) {
    LinkCircle link(alpha(rng));
    double a = theta(rng), b = theta(rng), c = theta(rng);
    double ab = link_distance(link, a, b), ba = link_distance(link, b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(ab <= link.circumference() / 2 + 1e-12);
    CHECK(link_distance(link, a, a) <= 1e-12);
    CHECK(link_distance(link, a, c) <= ab + link_distance(link, b, c) + 1e-9);
  }
}

TEST_CASE("classify_transition") {
  CHECK(classify_transition(LinkCircle(4 * pi), 0, pi) == Transition::Geometric);
  CHECK(classify_transition(LinkCircle(4 * pi), 0, 3 * pi) == Transition::Geometric);
  CHECK(classify_transition(LinkCircle(4 * pi), 0, 0) == Transition::StrictlyDiffractive);
  CHECK(classify_transition(LinkCircle(3 * pi), 1, 1) == Transition::StrictlyDiffractive);
  CHECK(classify_transition(LinkCircle(4 * pi), 0, pi + 1e-6) == Transition::StrictlyDiffractive);
  CHECK(classify_transition(LinkCircle(4 * pi), 0, pi + 1e-6, 1e-5) == Transition::Geometric);

  SUBCASE("link geodesics of length pi wrap on short links") {
    // On a circle of circumference pi, a geodesic of length pi closes up.
    CHECK(classify_transition(LinkCircle(pi), 0.3, 0.3) == Transition::Geometric);
    CHECK(classify_transition(LinkCircle(pi), 0.3, 1.0) == Transition::StrictlyDiffractive);
    CHECK(classify_transition(LinkCircle(1.5 * pi), 0.0, 0.5 * pi) == Transition::Geometric);
    CHECK(classify_transition(LinkCircle(1.5 * pi), 0.0, 0.2) == Transition::StrictlyDiffractive);
  }
}

TEST_CASE("geometric classification agrees with the closed-form singular set") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> alpha(0.5, 8 * pi), unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    double a = alpha(rng);
    double in = unit(rng) * a;
    double out = unit(rng) < 0.3 ? in + pi : unit(rng) * a;
    bool geometric = classify_transition(LinkCircle(a), in, out, 1e-9) == Transition::Geometric;
    bool singular = false;
    try {
      diffraction_coefficient_closed(a, in, out, 1e-9);
    } catch (const GeometricSingularity&) {
      singular = true;
    }
    CHECK(geometric == singular);
  }
}

TEST_CASE("doubled unit square") {
  auto sq = unit_square();
  auto g = build_doubled_polygon(sq);
  REQUIRE(g.cone_points().size() == 4);
  for (const auto& c : g.cone_points()) CHECK(c.link.circumference() == doctest::Approx(pi));
  int edges = 0, chords = 0;
  for (const auto& s : g.segments()) {
    if (s.sheet == Sheet::Shared) {
      ++edges;
      CHECK(s.length == doctest::Approx(1.0));
    } else {
      ++chords;
      CHECK(s.length == doctest::Approx(std::sqrt(2.0)));
    }
  }
  CHECK(edges == 4);
  CHECK(chords == 4);
  CHECK(g.has_positions());

  SUBCASE("link coordinates follow the lower-indexed edge convention") {
    // Vertex 0 measures from edge 0 (towards vertex 1): edge 0 sits at 0,
    // edge 3 at the interior angle pi/2, the diagonal at pi/4 and its mirror
    // at 3pi/4.
    const auto& e0 = g.segment(0);
    CHECK(e0.a.cone == 0);
    CHECK(e0.a.theta == doctest::Approx(0.0));
    const auto& e3 = g.segment(3);
    CHECK(e3.b.cone == 0);
    CHECK(e3.b.theta == doctest::Approx(pi / 2));
    for (const auto& s : g.segments()) {
      if (s.sheet == Sheet::Shared || s.a.cone != 0) continue;
      CHECK(s.a.theta == doctest::Approx(s.sheet == Sheet::First ? pi / 4 : 3 * pi / 4));
    }
  }
}

TEST_CASE("doubled triangle cone angles") {
  auto g = build_doubled_polygon(triangle(0.4 * pi, 0.35 * pi));
  REQUIRE(g.cone_points().size() == 3);
  CHECK(g.cone(0).link.circumference() == doctest::Approx(0.8 * pi).epsilon(1e-12));
  CHECK(g.cone(1).link.circumference() == doctest::Approx(0.7 * pi).epsilon(1e-12));
  CHECK(g.cone(2).link.circumference() == doctest::Approx(0.5 * pi).epsilon(1e-12));
  CHECK(g.segments().size() == 3);
}

TEST_CASE("doubled polygon rejects degenerate input") {
  std::vector<Point2> straight{{0, 0}, {1, 0}, {2, 0}, {1, 1}};
  CHECK_THROWS_WITH_AS(build_doubled_polygon(straight), doctest::Contains("collinear"), ValidationError);
  std::vector<Point2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(build_doubled_polygon(bowtie), ValidationError);
  std::vector<Point2> clockwise{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  CHECK_THROWS_WITH_AS(build_doubled_polygon(clockwise), doctest::Contains("counterclockwise"), ValidationError);
  std::vector<Point2> two{{0, 0}, {1, 0}};
  CHECK_THROWS_AS(build_doubled_polygon(two), ValidationError);
  std::vector<Point2> repeated{{0, 0}, {1, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(build_doubled_polygon(repeated), ValidationError);
}

TEST_CASE("non-convex polygon keeps only interior chords") {
  // L-shape: the chord between (2,0) and (0,2) passes outside.
  std::vector<Point2> ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  auto g = build_doubled_polygon(ell);
  CHECK(g.cone(3).link.circumference() == doctest::Approx(3 * pi));
  for (const auto& s : g.segments()) {
    bool bad = (s.a.cone == 1 && s.b.cone == 5) || (s.a.cone == 1 && s.b.cone == 4);
    CHECK_FALSE(bad);
  }
  // (0,0)-(1,1) is interior; (0,0)-(2,1) and (0,0)-(1,2) too.
  int chords_from_0 = 0;
  for (const auto& s : g.segments())
    if (s.sheet == Sheet::First && s.a.cone == 0) ++chords_from_0;
  CHECK(chords_from_0 == 3);
}

TEST_CASE("Gauss-Bonnet: total deficit of a doubled polygon is 4 pi") {
  std::mt19937_64 rng(3);
  int built = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto poly = random_star_polygon(rng, 3 + trial % 8);
    ConeGraph g;
    try {
      g = build_doubled_polygon(poly);
    } catch (const ValidationError&) {
      continue;
    }
    ++built;
    double deficit = 0.0;
    for (const auto& c : g.cone_points()) deficit += 2 * pi - c.link.circumference();
    CHECK(std::abs(deficit - 4 * pi) <= 1e-12 * g.cone_points().size());
  }
  CHECK(built > 150);
}

TEST_CASE("builders are deterministic") {
  std::vector<Point2> poly{{0, 0}, {3, 0.2}, {2.5, 2}, {1, 1.2}, {-0.5, 2.1}};
  auto a = build_doubled_polygon(poly);
  auto b = build_doubled_polygon(poly);
  REQUIRE(a.segments().size() == b.segments().size());
  for (std::size_t i = 0; i < a.segments().size(); ++i) {
    CHECK(a.segment(i).a.cone == b.segment(i).a.cone);
    CHECK(a.segment(i).b.cone == b.segment(i).b.cone);
    CHECK(a.segment(i).a.theta == b.segment(i).a.theta);
    CHECK(a.segment(i).b.theta == b.segment(i).b.theta);
    CHECK(a.segment(i).length == b.segment(i).length);
  }
}

TEST_CASE("segment link coordinates are unit-speed consistent") {
  // Each chord's coordinates lie in the copy's half of the link.
  std::vector<Point2> poly{{0, 0}, {3, 0.2}, {2.5, 2}, {1, 1.2}, {-0.5, 2.1}};
  auto g = build_doubled_polygon(poly);
  for (const auto& s : g.segments()) {
    for (auto end : {s.a, s.b}) {
      double alpha = g.cone(end.cone).link.circumference();
      double half = alpha / 2;
      if (s.sheet == Sheet::First) CHECK(end.theta <= half + 1e-12);
      if (s.sheet == Sheet::Second) CHECK(end.theta >= half - 1e-12);
    }
  }
}

TEST_CASE("planar exterior") {
  SUBCASE("single unit square") {
    std::vector<std::vector<Point2>> obs{unit_square()};
    auto g = build_planar_exterior(obs);
    REQUIRE(g.cone_points().size() == 4);
    for (const auto& c : g.cone_points()) CHECK(c.link.circumference() == doctest::Approx(3 * pi));
    CHECK(g.segments().size() == 4);
    for (const auto& s : g.segments()) CHECK(s.sheet == Sheet::Shared);
  }
  SUBCASE("two squares far apart see each other") {
    std::vector<Point2> far{{10, 0}, {11, 0}, {11, 1}, {10, 1}};
    std::vector<std::vector<Point2>> obs{unit_square(), far};
    auto g = build_planar_exterior(obs);
    CHECK(g.cone_points().size() == 8);
    int inter = 0;
    for (const auto& s : g.segments())
      if ((s.a.cone < 4) != (s.b.cone < 4)) ++inter;
    // Facing vertices see each other: (1,0) and (1,1) against (10,0) and
    // (10,1), one segment per copy. Farther vertices are hidden behind the
    // squares or lie behind a nearer vertex.
    CHECK(inter == 8);
  }
  SUBCASE("triangle obstacle has only its edges") {
    std::vector<std::vector<Point2>> obs{triangle(0.4 * pi, 0.35 * pi)};
    auto g = build_planar_exterior(obs);
    CHECK(g.segments().size() == 3);
    CHECK(g.cone(0).link.circumference() == doctest::Approx(2 * (2 * pi - 0.4 * pi)));
  }
  SUBCASE("overlapping obstacles are rejected") {
    std::vector<Point2> shifted{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
    std::vector<std::vector<Point2>> obs{unit_square(), shifted};
    CHECK_THROWS_AS(build_planar_exterior(obs), ValidationError);
  }
}

TEST_CASE("ConeGraph validation") {
  std::vector<ConePoint> cones{{0, "a", LinkCircle(2.0), std::nullopt}};
  std::vector<GeodesicSegment> bad{{0, {0, 0.0}, {1, 0.0}, 1.0, Sheet::Shared}};
  CHECK_THROWS_AS(ConeGraph(cones, bad), ValidationError);
  std::vector<GeodesicSegment> neg{{0, {0, 0.0}, {0, 1.0}, -1.0, Sheet::Shared}};
  CHECK_THROWS_AS(ConeGraph(cones, neg), ValidationError);
  CHECK_THROWS_AS(LinkCircle(0.0), ValidationError);
  std::vector<GeodesicSegment> wrap{{0, {0, 5.0}, {0, -1.0}, 1.0, Sheet::Shared}};
  ConeGraph g(cones, wrap);
  CHECK(g.segment(0).a.theta == doctest::Approx(1.0));
  CHECK(g.segment(0).b.theta == doctest::Approx(1.0));
}
