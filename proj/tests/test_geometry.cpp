#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hodm/geometry.hpp"
#include "oracles.hpp"

using namespace hodm;

namespace {

UcaGeometry ring(int N, double r = 0.05, double D = 3.0) { return {N, r, r, D, 1.0}; }

ReflectionPath single(double d, double eps = 15.0) { return {{d}, {eps}}; }

const double kLambda60 = kSpeedOfLight / 60e9;

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("los distance examples") {
  const auto g = ring(8);
  CHECK(los_distance_exact(g, 3, 3) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(los_distance_exact(g, 0, 4) == doctest::Approx(std::sqrt(9.0 + 0.01)).epsilon(1e-15));
  CHECK(los_distance_exact(g, 0, 4) == doctest::Approx(3.00166).epsilon(3e-6));
}

TEST_CASE("taylor los distance within 1e-4 of exact over all pairs") {
  const auto g = ring(8);
  for (int v = 0; v < 8; ++v) {
    for (int n = 0; n < 8; ++n) {
      const double e = los_distance_exact(g, v, n);
      CHECK(std::abs(los_distance_taylor(g, v, n) - e) / e < 1e-4);
    }
  }
}

TEST_CASE("los distance depends only on v - n mod N") {
  const auto g = ring(12, 0.07, 2.0);
  for (int k = 0; k < 12; ++k) {
    const double ref = los_distance_exact(g, k, 0);
    for (int s = 1; s < 12; ++s) {
      CHECK(los_distance_exact(g, (k + s) % 12, s) == doctest::Approx(ref).epsilon(1e-14));
    }
  }
}

TEST_CASE("taylor error shrinks at least quadratically as D doubles") {
  double previous = 0.0;
  for (double D : {1.0, 2.0, 4.0, 8.0}) {
    const auto g = ring(8, 0.05, D);
    double worst = 0.0;
    for (int v = 0; v < 8; ++v) {
      for (int n = 0; n < 8; ++n) {
        const double e = los_distance_exact(g, v, n);
        worst = std::max(worst, std::abs(los_distance_taylor(g, v, n) - e) / e);
      }
    }
    if (previous > 0.0) CHECK(worst <= previous / 4.0);
    previous = worst;
  }
}

TEST_CASE("los gain magnitude and phase") {
  const auto g = ring(8);
  const double expected = kLambda60 / (4.0 * oracle::pi * std::sqrt(9.0 + 0.0025 + 0.0025));
  CHECK(expected == doctest::Approx(1.325e-4).epsilon(1e-3));
  for (int v = 0; v < 8; ++v) {
    for (int n = 0; n < 8; ++n) {
      const Complex h = los_gain(g, v, n, kLambda60);
      CHECK(std::abs(h) == doctest::Approx(expected).epsilon(1e-12));
      const auto ref = oracle::los_element(3.0, 0.05, 0.05, 1.0, 8, v, n, kLambda60);
      CHECK(std::abs(h - ref) < 1e-12 * expected);
    }
  }
}

TEST_CASE("point antenna makes los gain a constant") {
  UcaGeometry g = ring(8);
  g.radius_tx = 0.0;
  const Complex h00 = los_gain(g, 0, 0, kLambda60);
  for (int v = 0; v < 8; ++v) {
    for (int n = 0; n < 8; ++n) CHECK(std::abs(los_gain(g, v, n, kLambda60) - h00) < 1e-18);
  }
}

TEST_CASE("reflection distance examples") {
  const auto g = ring(8);
  const double d = 0.5;
  const auto p = single(d);
  // elements at angle 0: the sine terms vanish
  CHECK(reflection_distance_exact(g, p, 0, 0) ==
        doctest::Approx(std::sqrt((2 * d - 0.1) * (2 * d - 0.1) + 9.0)).epsilon(1e-14));
  for (int v = 0; v < 8; ++v) {
    for (int n = 0; n < 8; ++n) {
      const double e = reflection_distance_exact(g, p, v, n);
      CHECK(std::abs(reflection_distance(g, p, v, n) - e) / e < 1e-4);
    }
  }
}

TEST_CASE("two-bounce distance follows the even sign pattern") {
  const auto g = ring(8);
  const ReflectionPath two{{0.25, 0.25}, {15, 15}};
  const double r = 0.05, d = 0.5;
  const double qd = std::sqrt(9.0 + 2 * r * r + 4 * d * d);
  for (int v = 0; v < 8; ++v) {
    for (int n = 0; n < 8; ++n) {
      const double pv = 2 * oracle::pi * v / 8, pn = 2 * oracle::pi * n / 8;
      const double even = r * r * std::cos(pv - pn) - 2 * r * d * std::cos(pv) + 2 * r * d * std::cos(pn);
      const double odd = -r * r * std::cos(pv + pn) + 2 * r * d * std::cos(pn) + 2 * r * d * std::cos(pv);
      CHECK(reflection_distance(g, two, v, n) == doctest::Approx(qd - even / qd).epsilon(1e-14));
      CHECK(reflection_distance(g, single(d), v, n) == doctest::Approx(qd - odd / qd).epsilon(1e-14));
      const double ex = reflection_distance_exact(g, two, v, n);
      CHECK(std::abs(reflection_distance(g, two, v, n) - ex) / ex < 1e-4);
    }
  }
}

TEST_CASE("fresnel coefficient examples") {
  CHECK(fresnel_coefficient(oracle::pi / 2, 15.0) ==
        doctest::Approx((1 - std::sqrt(15.0)) / (1 + std::sqrt(15.0))).epsilon(1e-14));
  CHECK(fresnel_coefficient(oracle::pi / 2, 15.0) == doctest::Approx(-0.58953).epsilon(1e-4));
  CHECK(fresnel_coefficient(0.3, 1e12) == doctest::Approx(-1.0).epsilon(1e-5));
  const double root = std::sqrt(15.0 - 0.75 / 15.0);
  CHECK(fresnel_coefficient(oracle::pi / 6, 15.0) == doctest::Approx((0.5 - root) / (0.5 + root)).epsilon(1e-14));
  CHECK(fresnel_coefficient(oracle::pi / 6, 15.0) == doctest::Approx(-0.7710).epsilon(1e-4));
  CHECK_THROWS_AS(fresnel_coefficient(0.3, 0.5), DomainError);
  CHECK_THROWS_AS(fresnel_coefficient(0.0, 15.0), DomainError);
}

TEST_CASE("fresnel coefficient lies in [-1, 0] on a dense grid") {
  for (int i = 1; i <= 200; ++i) {
    const double alpha = (oracle::pi / 2) * i / 200.0;
    for (double eps = 1.01; eps < 100.0; eps *= 1.3) {
      const double r = fresnel_coefficient(alpha, eps);
      CHECK(r >= -1.0);
      CHECK(r <= 0.0);
    }
  }
}

TEST_CASE("reflection angle examples") {
  const auto g = ring(8);
  const auto p = single(0.5);
  const double d00 = reflection_distance(g, p, 0, 0);
  CHECK(reflection_angle(g, p, 0, 0) == doctest::Approx(std::asin(0.9 / d00)).epsilon(1e-14));

  UcaGeometry point = ring(8);
  point.radius_tx = point.radius_rx = 0.0;
  CHECK(reflection_angle(point, single(1.5), 3, 5) == doctest::Approx(oracle::pi / 4).epsilon(1e-14));

  for (int v = 0; v < 8; ++v) {
    for (int n = 0; n < 8; ++n) {
      CHECK(reflection_angle(g, p, v, n) == doctest::Approx(reflection_angle(g, p, n, v)).epsilon(1e-14));
    }
  }
}

TEST_CASE("path reflection coefficient") {
  UcaGeometry point = ring(8);
  point.radius_tx = point.radius_rx = 0.0;
  const double d = 0.4;
  const double alpha = std::asin(2 * d / std::sqrt(9.0 + 4 * d * d));
  CHECK(path_reflection_coefficient(point, single(d)) ==
        doctest::Approx(fresnel_coefficient(alpha, 15.0)).epsilon(1e-14));

  const auto g = ring(8);
  CHECK(path_reflection_coefficient(g, {{0.25, 0.25}, {15, 15}}) >= 0.0);

  for (double dd = 0.2; dd <= 1.0001; dd += 0.1) {
    for (double eps : {2.0, 5.0, 15.0, 40.0, 80.0}) {
      for (int order = 1; order <= 3; ++order) {
        ReflectionPath p;
        for (int k = 0; k < order; ++k) {
          p.bounce_distances.push_back(dd / order);
          p.permittivities.push_back(eps);
        }
        CHECK(std::abs(path_reflection_coefficient(g, p)) <= 1.0);
      }
    }
  }
}

TEST_CASE("reflection gain magnitude and phase") {
  const auto g = ring(8);
  const auto p = single(0.5);
  const double R = path_reflection_coefficient(g, p);
  const double qd = std::sqrt(9.0 + 0.005 + 1.0);
  const double amp = std::abs(R) * kLambda60 / (4 * oracle::pi * qd);
  for (int v = 0; v < 8; ++v) {
    for (int n = 0; n < 8; ++n) {
      const Complex h = reflection_gain(g, p, v, n, kLambda60);
      CHECK(std::abs(h) == doctest::Approx(amp).epsilon(1e-12));
      CHECK(std::abs(h) < std::abs(los_gain(g, v, n, kLambda60)));
    }
  }
  // term-by-term phase at v = 1, n = 2
  const double pv = 2 * oracle::pi / 8, pn = 2 * oracle::pi * 2 / 8, r = 0.05, d = 0.5;
  const double term = -r * r * std::cos(pv + pn) + 2 * r * d * std::cos(pn) + 2 * r * d * std::cos(pv);
  const oracle::cd ref = R * kLambda60 / (4 * oracle::pi * qd) * oracle::expj(-2 * oracle::pi * qd / kLambda60) *
                         oracle::expj(2 * oracle::pi * term / (kLambda60 * qd));
  CHECK(std::abs(reflection_gain(g, p, 1, 2, kLambda60) - ref) < 1e-12 * amp);
}

TEST_CASE("path delay") {
  const auto g = ring(8);
  const auto p = single(0.5);
  CHECK(path_delay(g, p, 0, 0) ==
        doctest::Approx((reflection_distance(g, p, 0, 0) - los_distance_exact(g, 0, 0)) / kSpeedOfLight)
            .epsilon(1e-14));

  UcaGeometry point = ring(8);
  point.radius_tx = point.radius_rx = 0.0;
  CHECK(std::abs(path_delay(point, single(1e-6), 0, 0)) < 1e-20);

  for (int v = 0; v < 8; ++v) {
    for (int n = 0; n < 8; ++n) {
      double last = 0.0;
      for (double d = 0.1; d <= 1.0001; d += 0.1) {
        const double tau = path_delay(g, single(d), v, n);
        CHECK(tau > last);
        last = tau;
      }
    }
  }
}

TEST_CASE("validation rejects out-of-regime geometry") {
  UcaGeometry g = ring(8);
  g.radius_tx = 1.5;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("radius too large relative to axial distance"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(single(0.5, 0.5).validate(ring(8)), doctest::Contains("permittivity must exceed 1"),
                       ValidationError);
  CHECK_THROWS_AS(single(0.01).validate(ring(8)), ValidationError);
  CHECK_NOTHROW(ring(8).validate());
}

TEST_CASE("path set counts") {
  PathSet ps;
  ps.reflections = {single(0.3), single(0.4), {{0.2, 0.2}, {15, 15}}, {{0.1, 0.1, 0.1}, {15, 15, 15}}};
  CHECK(ps.total_paths() == 5);
  CHECK(ps.count(1) == 2);
  CHECK(ps.count(2) == 1);
  CHECK(ps.count(3) == 1);
  CHECK(ps.max_reflector_distance() == doctest::Approx(0.4));
  CHECK(single(0.3).reverses_mode());
  CHECK_FALSE(ReflectionPath{{0.2, 0.2}, {15, 15}}.reverses_mode());
}

TEST_CASE("element channel layout") {
  const auto g = ring(8);
  const auto wl = subcarrier_wavelengths(60e9, 5e6, 8);
  const double Ts = 1.0 / 5e6;

  PathSet los_only;
  const auto c0 = build_element_channel(g, los_only, wl, 8, Ts, 4);
  REQUIRE(c0.paths.size() == 1);
  CHECK(c0.paths[0].offset == 0);
  CHECK(std::abs(c0.tap(0, 2, 5, 3) - los_gain(g, 2, 5, wl[3])) < 1e-18);

  PathSet one;
  one.reflections = {single(0.4)};
  const auto c1 = build_element_channel(g, one, wl, 8, Ts, 4);
  REQUIRE(c1.paths.size() == 2);
  const int Lr = std::max(static_cast<int>(std::ceil(max_normalized_delay(g, one.reflections[0], 8, Ts))), 1);
  CHECK(c1.paths[1].offset == Lr - 1);

  PathSet many;
  many.reflections = {single(0.3), single(0.4), {{0.2, 0.2}, {15, 15}}};
  CHECK(build_element_channel(g, many, wl, 8, Ts, 4).paths.size() ==
        static_cast<std::size_t>(many.total_paths()));
}

TEST_CASE("delay offsets stay inside the cyclic prefix") {
  const auto g = ring(8);
  PathSet ps;
  ps.reflections = {single(0.3), single(0.4), single(0.5)};
  const auto off = delay_offsets(g, ps, 16, 1.0 / 5e6, 4);
  // three paths in one category: L_r = 3, offsets 2, 1, 0
  CHECK(off == std::vector<int>{2, 1, 0});
  CHECK_THROWS_AS(delay_offsets(g, ps, 16, 1.0 / 5e6, 1), std::runtime_error);
  // a huge sampling rate turns the delay into many samples
  CHECK_THROWS_AS(delay_offsets(g, ps, 16, 1e-9, 4), std::runtime_error);
}

}  // TEST_SUITE
