#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "conetrace/cone_geometry.hpp"
#include "conetrace/diffraction.hpp"
#include "conetrace/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace conetrace;
using std::numbers::pi;
using cd = std::complex<double>;

TEST_CASE("closed form examples") {
  for (double delta : {0.0, 0.3, 1.7, -2.5, 4.0})
    CHECK(std::abs(diffraction_coefficient_closed(2 * pi, delta, 0.0).value) <= 1e-15);
  auto d = diffraction_coefficient_closed(4 * pi, 0.0, 0.0);
  CHECK(std::abs(d.value - cd(0.0, -1.0 / (4 * pi))) <= 1e-15);
  CHECK(d.method == DiffractionMethod::ClosedForm);
  CHECK(*d.circumference == 4 * pi);
  CHECK_THROWS_AS(diffraction_coefficient_closed(4 * pi, pi, 0.0), GeometricSingularity);
  CHECK_THROWS_AS(diffraction_coefficient_closed(4 * pi, 0.0, 3 * pi), GeometricSingularity);
  CHECK_THROWS_AS(diffraction_coefficient_closed(4 * pi, 0.0, pi + 1e-7), GeometricSingularity);
  CHECK_NOTHROW(diffraction_coefficient_closed(4 * pi, 0.0, pi + 1e-3));
  CHECK_THROWS_AS(diffraction_coefficient_closed(0.0, 0.0, 1.0), ValidationError);
}

TEST_CASE("closed form is the limit of the damped geometric series") {
  // Independent route: sum the damped exponential series directly, check
  // it against its own geometric-series closed form, then let eps -> 0.
  for (double alpha : {0.7, 2.0, 3 * pi, 4 * pi, 25.0}) {
    for (double delta : {0.0, 0.4, 1.3, 2.9}) {
      if (distance_to_geometric(LinkCircle(alpha), delta, 0.0) < 0.1) continue;
      cd direct = oracle::damped_mode_sum(alpha, delta, 0.05, 200000);
      cd series = oracle::damped_geometric(alpha, delta, 0.05);
      CHECK(std::abs(direct - series) <= 1e-12);
      cd limit = oracle::damped_geometric(alpha, delta, 1e-12);
      cd closed = diffraction_coefficient_closed(alpha, delta, 0.0).value;
      CHECK(std::abs(limit - closed) <= 1e-9);
    }
  }
}

TEST_CASE("mode sum examples") {
  auto d = diffraction_coefficient_modesum(4 * pi, 0.0, 0.0);
  CHECK(std::abs(d.value - cd(0.0, -1.0 / (4 * pi))) <= 1e-8);
  CHECK(d.method == DiffractionMethod::ModeSum);
  CHECK(d.residual <= 1e-7);
  CHECK(d.tail_weight <= 1e-12);

  auto smooth = diffraction_coefficient_modesum(2 * pi, pi / 2, 0.0);
  CHECK(std::abs(smooth.value) <= 1e-8);

  LinkSpectrum empty;
  CHECK(std::abs(diffraction_coefficient_modesum(empty).value) == 0.0);
}

TEST_CASE("circle mode sum equals the general spectrum path") {
  for (double a : {1.3, 4 * pi, 7.0}) {
    auto schedule = DampingSchedule::standard();
    auto spec = circle_link_spectrum(a, 0.9, 0.1, circle_modes_for(a, schedule));
    cd general = diffraction_coefficient_modesum(spec, schedule).value;
    cd circle = diffraction_coefficient_modesum(a, 0.9, 0.1, schedule).value;
    CHECK(std::abs(general - circle) <= 1e-10);
  }
}

TEST_CASE("circle link spectrum") {
  auto s = circle_link_spectrum(3.0, 0.2, 1.1, 5);
  CHECK(s.modes.size() == 11);
  CHECK(s.shift() == 0.0);
  for (std::size_t i = 1; i < s.modes.size(); ++i) CHECK(s.modes[i].eigenvalue >= s.modes[i - 1].eigenvalue);
  for (const auto& m : s.modes) CHECK(std::abs(m.phi_in) == doctest::Approx(1.0 / std::sqrt(3.0)));
  LinkSpectrum three;
  three.dimension = 3;
  CHECK(three.shift() == doctest::Approx(0.25));
}

TEST_CASE("closed form and mode sum agree") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> alpha(0.5, 8 * pi), unit(0.0, 1.0);
  int tested = 0;
  while (tested < 40) {
    double a = alpha(rng);
    double in = unit(rng) * a, out = unit(rng) * a;
    if (distance_to_geometric(LinkCircle(a), in, out) < 0.1) continue;
    ++tested;
    auto c = diffraction_coefficient_closed(a, in, out);
    auto m = diffraction_coefficient_modesum(a, in, out);
    CHECK(std::abs(c.value - m.value) <= 1e-8);
  }
}

TEST_CASE("damping schedule independence") {
  auto first = DampingSchedule::standard();
  auto second = DampingSchedule::halving(0.006, 8);
  for (double a : {1.3, 5.0, 11.0, 20.0}) {
    auto v1 = diffraction_coefficient_modesum(a, 0.25 * a, 0.0, first).value;
    if (distance_to_geometric(LinkCircle(a), 0.25 * a, 0.0) < 0.1) continue;
    auto v2 = diffraction_coefficient_modesum(a, 0.25 * a, 0.0, second).value;
    CHECK(std::abs(v1 - v2) <= 1e-7);
  }
}

TEST_CASE("mode sum reports non-convergence") {
  // Too close to the singular set for the schedule to resolve.
  CHECK_THROWS_AS(diffraction_coefficient_modesum(4 * pi, 0.0, pi + 1e-4), NonConvergent);
  DampingSchedule coarse = DampingSchedule::halving(0.1, 2);
  coarse.tolerance = 1e-14;
  CHECK_THROWS_AS(diffraction_coefficient_modesum(4 * pi, 0.0, 1.0, coarse), NonConvergent);
  auto truncated = circle_link_spectrum(4 * pi, 0.0, 0.5, 10);
  CHECK_THROWS_AS(diffraction_coefficient_modesum(truncated), NonConvergent);
}

TEST_CASE("reciprocity and reflection") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> alpha(0.5, 8 * pi), unit(0.0, 1.0);
  int tested = 0;
  while (tested < 500) {
    double a = alpha(rng);
    double in = unit(rng) * a, out = unit(rng) * a;
    if (distance_to_geometric(LinkCircle(a), in, out) < 1e-3) continue;
    ++tested;
    cd v = diffraction_coefficient_closed(a, in, out).value;
    CHECK(diffraction_coefficient_closed(a, out, in).value == v);
    cd r = diffraction_coefficient_closed(a, a - in, a - out).value;
    CHECK(std::abs(r - v) <= 1e-12 * std::max(1.0, std::abs(v)));
  }
}

TEST_CASE("vanishing on rotation-quotient cones") {
  for (int N = 1; N <= 6; ++N) {
    double a = 2 * pi / N;
    CHECK_FALSE(is_diffractive_cone(a));
    for (int i = 0; i < 20; ++i) {
      double delta = a * (i + 0.5) / 20.0;
      if (distance_to_geometric(LinkCircle(a), delta, 0.0) < 1e-3) continue;
      CHECK(std::abs(diffraction_coefficient_closed(a, delta, 0.0).value) <= 1e-10);
    }
  }
  CHECK(is_diffractive_cone(3 * pi));
  CHECK(std::abs(diffraction_coefficient_closed(3 * pi, 0.0, 0.0).value) > 1e-3);
  CHECK_FALSE(is_diffractive_cone(pi));
  CHECK_FALSE(is_diffractive_cone(2 * pi / 3));
  CHECK(is_diffractive_cone(0.8 * pi));
  CHECK(is_diffractive_cone(4 * pi));
}

TEST_CASE("diffractive cones have a nonzero coefficient somewhere") {
  for (double a : {0.8 * pi, 0.7 * pi, 1.5 * pi, 3 * pi, 5.5}) {
    double biggest = 0.0;
    for (int i = 0; i < 40; ++i) {
      double delta = a * (i + 0.5) / 40.0;
      if (distance_to_geometric(LinkCircle(a), delta, 0.0) < 1e-3) continue;
      biggest = std::max(biggest, std::abs(diffraction_coefficient_closed(a, delta, 0.0).value));
    }
    CHECK(biggest > 1e-3);
  }
}
