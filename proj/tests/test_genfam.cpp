#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hj/fronttrack.hpp"
#include "hj/genfam.hpp"
#include "hj/minmax.hpp"
#include "hj/plfun.hpp"

using hj::PLFunction;
using hj::SegmentLabel;

namespace {

PLFunction half_square() { return PLFunction::through({{-1.0, 0.5}, {0.0, 0.0}, {1.0, 0.5}}); }

PLFunction cubic(int k) {
  return hj::pl_approx([](double p) { return -p * p * p + p * p + p; }, k, -2.0, 2.0);
}

bool in_alphabet(double s, const PLFunction& v, const PLFunction& H) {
  for (double a : v.slopes())
    if (std::abs(a - s) < 1e-9) return true;
  for (double a : H.breakpoints())
    if (std::abs(a - s) < 1e-9) return true;
  return false;
}

}  // namespace

TEST_CASE("generating family") {
  const auto abs = PLFunction({0.0}, {0.0}, -1.0, 1.0);
  SUBCASE("t = 0 on the diagonal is v") {
    const hj::GenFamily gf{abs, half_square(), 0.0};
    for (double x : {-2.0, 0.3, 1.0})
      for (double y : {-1.0, 0.5}) CHECK(hj::s_eval(gf, x, x, y) == abs(x));
  }
  SUBCASE("zero hamiltonian") {
    const hj::GenFamily gf{abs, PLFunction::affine(0.0, 0.0), 2.0};
    CHECK(hj::s_eval(gf, 1.0, -0.5, 0.25) == doctest::Approx(0.5 + 1.5 * 0.25));
  }
  SUBCASE("arithmetic") {
    const hj::GenFamily gf{abs, half_square(), 1.0};
    CHECK(hj::s_eval(gf, 0.0, 1.0, -1.0) == doctest::Approx(1.0 + 1.0 - 0.5));
  }
}

TEST_CASE("wave front of a convex Riemann datum") {
  const auto H = PLFunction::through({{-1.0, 0.0}, {-0.5, -0.2}, {0.0, -1.0}, {0.5, -0.3}, {1.0, 0.0}});
  const auto v = PLFunction({0.0}, {0.0}, -1.0, 1.0);
  const auto front = hj::build_wavefront(v, H, 0.5);
  std::vector<double> fan_slopes;
  for (const auto& s : front.segments)
    if (s.label == SegmentLabel::fan) fan_slopes.push_back(s.slope);
  std::sort(fan_slopes.begin(), fan_slopes.end());
  // one fan segment per H breakpoint inside the jump
  REQUIRE(fan_slopes.size() == 3);
  CHECK(fan_slopes[0] == -0.5);
  CHECK(fan_slopes[1] == 0.0);
  CHECK(fan_slopes[2] == 0.5);
  CHECK(hj::endpoint_mismatch(front) < 1e-9);
}

TEST_CASE("affine datum has a single genuine line") {
  const auto front = hj::build_wavefront(PLFunction::affine(0.3, 0.0), half_square(), 1.0);
  REQUIRE(front.segments.size() == 1);
  CHECK(front.segments[0].label == SegmentLabel::genuine);
  CHECK(front.segments[0].slope == doctest::Approx(0.3));
  CHECK_THROWS(hj::build_wavefront(PLFunction::affine(0.3, 0.0), half_square(), 0.0));
}

TEST_CASE("fan of a concave kink lies at or above the solution") {
  const auto v = PLFunction({0.0}, {0.0}, 1.0, -1.0);
  const auto H = hj::pl_approx([](double p) { return 0.5 * p * p; }, 20, -1.0, 1.0);
  const double t = 0.7;
  const auto front = hj::build_wavefront(v, H, t);
  const auto tr = hj::evolve(v, H, t);
  const auto rep = hj::fan_position(front, [&](double x) { return tr.eval(t, x); });
  CHECK(rep.vertices > 0);
  CHECK(rep.min_diff >= -1e-12);
  // and above both extended genuine branches
  for (const auto& s : front.segments) {
    if (s.label != SegmentLabel::fan) continue;
    for (auto [x, val] : {std::pair{s.xa, s.ua}, std::pair{s.xb, s.ub}})
      CHECK(val >= std::max(x - t * H(1.0), -x - t * H(-1.0)) - 1e-12);
  }
}

TEST_CASE("convex kink fan lies at or below the solution") {
  const auto v = PLFunction({0.0}, {0.0}, -1.0, 1.0);
  const auto H = PLFunction::through({{-1.0, 0.0}, {0.0, -1.0}, {1.0, 0.0}});
  const double t = 1.0;
  const auto front = hj::build_wavefront(v, H, t);
  const auto tr = hj::evolve(v, H, t);
  const auto rep = hj::fan_position(front, [&](double x) { return tr.eval(t, x); });
  CHECK(rep.vertices > 0);
  CHECK(rep.max_diff <= 1e-12);
}

TEST_CASE("phase curves") {
  const auto v = PLFunction({0.0}, {0.0}, 6.0 / 5.0, -2.0 / 3.0);
  SUBCASE("t = 0 is the enlarged pseudograph") {
    const auto c = hj::build_phase_curve(v, cubic(200), 0.0);
    bool vertical = false;
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
      const auto& a = c.points[i];
      const auto& b = c.points[i + 1];
      if (a.x == 0.0 && b.x == 0.0 && a.p != b.p) vertical = true;
      if (a.x != b.x) CHECK(a.p == b.p);
    }
    CHECK(vertical);
  }
  SUBCASE("affine datum is a horizontal line") {
    const auto c = hj::build_phase_curve(PLFunction::affine(0.4, 0.0), cubic(20), 0.3);
    for (const auto& p : c.points) CHECK(p.p == 0.4);
  }
  SUBCASE("rarefaction datum is triple valued near the kink") {
    const auto c = hj::build_phase_curve(v, cubic(200), 0.1);
    int most = 0;
    for (int i = -20; i <= 20; ++i) most = std::max(most, hj::preimage_count(c, 0.01 * i + 0.001));
    CHECK(most == 3);
  }
}

TEST_CASE("sections of the front") {
  const auto H = PLFunction::through({{-2.0, 2.0}, {-1.0, 0.5}, {0.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}});
  const auto v = PLFunction({0.0, 1.0}, {0.0, -1.0}, 2.0, 2.0);
  const double t = 0.5;  // before the first collision
  const auto front = hj::build_wavefront(v, H, t);
  const auto tr = hj::evolve(v, H, t);
  const auto u = tr.profile(t);
  const double reach = t * hj::max_speed(v, H);
  const double a = -1.0 + reach, b = 2.0 - reach;
  CHECK(hj::section_check(front, u, a, b));
  CHECK_FALSE(hj::section_check(front, u.shifted(1.0), a, b));
  CHECK(hj::section_check(front, hj::minmax_step(v, H, t), a, b));
}

TEST_CASE("random data: slope dictionary, endpoint matching, big front") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::pair<double, double>> hp, vp;
    for (int i = 0; i < 6; ++i) hp.emplace_back(-2.5 + i, u(rng));
    for (int i = 0; i < 4; ++i) vp.emplace_back(-1.5 + i + 0.3 * u(rng), u(rng));
    const auto H = PLFunction::through(hp);
    const auto v = PLFunction::through(vp);
    const auto front = hj::build_wavefront(v, H, 0.3 + 0.5 * std::abs(u(rng)));
    CHECK(hj::endpoint_mismatch(front) < 1e-9);
    for (const auto& s : front.segments) CHECK(in_alphabet(s.slope, v, H));

    // fronts at nearby times stay close segment by segment
    const auto big = hj::big_front(v, H, {0.5, 0.5 + 1e-6});
    REQUIRE(big.size() == 2);
    REQUIRE(big[0].segments.size() == big[1].segments.size());
    for (std::size_t i = 0; i < big[0].segments.size(); ++i) {
      CHECK(std::abs(big[0].segments[i].xa - big[1].segments[i].xa) < 1e-4);
      CHECK(std::abs(big[0].segments[i].ub - big[1].segments[i].ub) < 1e-4);
    }
  }
}

TEST_CASE("corners of a PL front are never cusps without a reversal") {
  const auto v = PLFunction({0.0}, {0.0}, -1.0, 1.0);
  const auto front = hj::build_wavefront(v, half_square(), 1.0);
  for (const auto& c : hj::front_corners(front)) CHECK(c.kind == hj::CornerKind::corner);
}
