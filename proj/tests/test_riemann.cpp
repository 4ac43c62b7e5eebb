#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hj/plfun.hpp"
#include "hj/riemann.hpp"

using hj::PLFunction;

namespace {

// max over y0 of x y0 - v*(y0) - t H(y0) for the two-slope datum with kink at
// the origin and value 0 there: v* vanishes on the slope interval.
double hopf_brute(double pm, double pp, const PLFunction& H, double t, double x) {
  if (pm < pp) {
    double best = -hj::kInf;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
      const double y = pm + (pp - pm) * i / n;
      best = std::max(best, x * y - t * H(y));
    }
    for (double y : H.breakpoints())
      if (y > pm && y < pp) best = std::max(best, x * y - t * H(y));
    return best;
  }
  // concave kink: the minimum over the two characteristic families of the
  // lower envelope, computed by the min-max of the affine pieces
  double best = hj::kInf;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double y = pp + (pm - pp) * i / n;
    best = std::min(best, x * y - t * H(y));
  }
  for (double y : H.breakpoints())
    if (y > pp && y < pm) best = std::min(best, x * y - t * H(y));
  return best;
}

}  // namespace

TEST_CASE("convex fan from the envelope") {
  const auto H = PLFunction::through({{-1.0, 0.0}, {0.0, -1.0}, {1.0, 0.0}});
  const auto fan = hj::solve_fan(-1.0, 1.0, H);
  REQUIRE(fan.slopes.size() == 3);
  CHECK(fan.slopes[1] == 0.0);
  CHECK(fan.speeds[0] == doctest::Approx(-1.0));
  CHECK(fan.speeds[1] == doctest::Approx(1.0));
  CHECK(fan.kind == hj::FanKind::convex);
  CHECK(hj::fan_eval(fan, H, 0.0, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(hj::fan_eval(fan, H, 0.0, 1.0, -2.0) == doctest::Approx(2.0));
}

TEST_CASE("trivial fan") {
  const auto H = PLFunction::through({{-1.0, 0.0}, {0.0, -1.0}, {1.0, 0.0}});
  const auto fan = hj::solve_fan(0.3, 0.3, H);
  CHECK(fan.kind == hj::FanKind::trivial);
  CHECK(fan.speeds.empty());
  for (double x : {-1.0, 0.2, 3.0})
    CHECK(hj::fan_eval(fan, H, 0.0, 0.7, x) == doctest::Approx(0.3 * x - 0.7 * H(0.3)));
}

TEST_CASE("concave fan is the chord") {
  const auto H = PLFunction::through({{0.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}});
  const auto fan = hj::solve_fan(2.0, 0.0, H);
  REQUIRE(fan.speeds.size() == 1);
  CHECK(fan.speeds[0] == doctest::Approx(1.0));
  CHECK(fan.slopes.front() == 2.0);
  CHECK(fan.slopes.back() == 0.0);
  CHECK(fan.kind == hj::FanKind::concave);
}

TEST_CASE("fan_eval rejects times before the apex") {
  const auto H = PLFunction::through({{0.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}});
  const auto fan = hj::solve_fan(2.0, 0.0, H, 1.0, 0.0);
  CHECK_THROWS(hj::fan_eval(fan, H, 0.0, 0.5, 0.0));
}

TEST_CASE("entropy predicate") {
  const auto convex = PLFunction::through({{-1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}});
  CHECK(hj::entropy_ok(1.0, -1.0, convex));
  const auto bump = PLFunction::through({{-1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}});
  CHECK_FALSE(hj::entropy_ok(1.0, -1.0, bump));
  const auto cubic = hj::pl_approx([](double p) { return -p * p * p + p * p + p; }, 200, -2.0, 2.0);
  CHECK_FALSE(hj::entropy_ok(6.0 / 5.0, -2.0 / 3.0, cubic));
  CHECK_THROWS_WITH(hj::entropy_ok(0.5, 0.5, convex), "not a jump");
  // chord touching an interior breakpoint: weak passes, strict fails
  const auto flat = PLFunction::through({{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
  CHECK(hj::entropy_ok(1.0, -1.0, flat));
  CHECK_FALSE(hj::entropy_ok(1.0, -1.0, flat, true));
}

TEST_CASE("random fans: invariants and the Hopf formula") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 8; ++i) pts.emplace_back(-2.5 + 5.0 * i / 7 + 0.1 * u(rng), u(rng));
    const auto H = PLFunction::through(pts);
    const double pm = u(rng), pp = u(rng);
    if (std::abs(pm - pp) < 1e-3) continue;
    const auto fan = hj::solve_fan(pm, pp, H);
    REQUIRE(fan.speeds.size() + 1 == fan.slopes.size());
    for (std::size_t i = 0; i + 1 < fan.speeds.size(); ++i) CHECK(fan.speeds[i] < fan.speeds[i + 1]);
    for (std::size_t i = 0; i < fan.speeds.size(); ++i) {
      CHECK(fan.speeds[i] == doctest::Approx(hj::rh_speed(H, fan.slopes[i], fan.slopes[i + 1])));
      CHECK(hj::entropy_ok(fan.slopes[i], fan.slopes[i + 1], H));
      if (pm < pp) CHECK(fan.slopes[i] < fan.slopes[i + 1]);
      else CHECK(fan.slopes[i] > fan.slopes[i + 1]);
      // continuity across each ray
      for (double t : {0.3, 1.0}) {
        const double x = fan.speeds[i] * t;
        const double l = fan.slopes[i] * x - t * H(fan.slopes[i]);
        const double r = fan.slopes[i + 1] * x - t * H(fan.slopes[i + 1]);
        CHECK(std::abs(l - r) < 1e-12 * std::max(1.0, std::abs(l)) + 1e-12);
      }
    }
    for (int k = 0; k < 5; ++k) {
      const double t = 0.1 + std::abs(u(rng)) / 2, x = 2.0 * u(rng);
      CHECK(hj::fan_eval(fan, H, 0.0, t, x) ==
            doctest::Approx(hopf_brute(pm, pp, H, t, x)).epsilon(1e-9).scale(1.0));
    }
  }
}
