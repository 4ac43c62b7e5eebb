#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "hj/errors.hpp"
#include "hj/fronttrack.hpp"
#include "hj/plfun.hpp"

using hj::PLFunction;

namespace {

PLFunction half_square() { return PLFunction::through({{-1.0, 0.5}, {0.0, 0.0}, {1.0, 0.5}}); }

PLFunction w_hamiltonian() {
  return PLFunction::through({{-2.0, 2.0}, {-1.0, 0.5}, {0.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}});
}

// min over x0 of v(x0) + t H*((x - x0) / t) for convex H. The objective is PL
// in x0 with kinks at the kinks of v and at x - t * (slopes of H), so checking
// those candidates (and the ends of the finite window) is exact.
double lax_brute(const PLFunction& v, const PLFunction& H, double t, double x) {
  const auto slopes = H.slopes();
  const double smin = slopes.front(), smax = slopes.back();
  auto hstar = [&](double q) {
    double best = -hj::kInf;
    for (double p : H.breakpoints()) best = std::max(best, p * q - H(p));
    return best;
  };
  std::vector<double> cand{x - t * smin, x - t * smax};
  for (double b : v.breakpoints())
    if (b >= x - t * smax && b <= x - t * smin) cand.push_back(b);
  for (double s : slopes) cand.push_back(x - t * s);
  double best = hj::kInf;
  for (double x0 : cand) best = std::min(best, v(x0) + t * hstar((x - x0) / t));
  return best;
}

PLFunction random_pl(std::mt19937& rng, int kinks, double slope_scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xs;
  for (int i = 0; i < kinks; ++i) xs.push_back(2.0 * u(rng));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> ys{u(rng)};
  for (std::size_t i = 1; i < xs.size(); ++i) ys.push_back(ys.back() + slope_scale * u(rng) * (xs[i] - xs[i - 1]));
  return PLFunction(xs, ys, slope_scale * u(rng), slope_scale * u(rng));
}

PLFunction random_convex_h(std::mt19937& rng, int bps) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xs, s;
  for (int i = 0; i < bps; ++i) xs.push_back(2.0 * u(rng));
  for (int i = 0; i <= bps; ++i) s.push_back(2.0 * u(rng));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(s.begin(), s.end());
  std::vector<double> ys{u(rng)};
  for (std::size_t i = 1; i < xs.size(); ++i) ys.push_back(ys.back() + s[i] * (xs[i] - xs[i - 1]));
  return PLFunction(xs, ys, s.front(), s[xs.size()]);
}

}  // namespace

TEST_CASE("standing shock of a concave kink") {
  const auto v = PLFunction({0.0}, {0.0}, 1.0, -1.0);
  const auto tr = hj::evolve(v, half_square(), 2.0);
  REQUIRE(tr.shocks.size() == 1);
  CHECK(tr.shocks[0].speed == 0.0);
  CHECK(tr.eval(1.0, 0.0) == doctest::Approx(-0.5));
  for (double x : {-1.5, -0.2, 0.7})
    CHECK(tr.eval(1.0, x) == doctest::Approx(-std::abs(x) - 0.5));
  const auto s = tr.slope(1.0, 0.0);
  CHECK(s.lo == -1.0);
  CHECK(s.hi == 1.0);
}

TEST_CASE("affine data has no shocks") {
  const auto tr = hj::evolve(PLFunction::affine(0.4, 1.0), half_square(), 1.0);
  CHECK(tr.shocks.empty());
  CHECK(tr.current().pieces.size() == 1);
  CHECK(tr.eval(1.0, 2.0) == doctest::Approx(0.4 * 2.0 + 1.0 - half_square()(0.4)));
}

TEST_CASE("convex kink opens a fan") {
  const auto H = PLFunction::through({{-1.0, 0.0}, {0.0, -1.0}, {1.0, 0.0}});
  const auto tr = hj::init(PLFunction({0.0}, {0.0}, -1.0, 1.0), H);
  REQUIRE(tr.shocks.size() == 2);
  CHECK(tr.shocks[0].speed == doctest::Approx(-1.0));
  CHECK(tr.shocks[1].speed == doctest::Approx(1.0));
  CHECK(tr.shocks[0].right_slope == 0.0);
}

TEST_CASE("W-shaped data: one collision at (1, 0.5)") {
  const auto v = PLFunction({0.0, 1.0}, {0.0, -1.0}, 2.0, 2.0);
  const auto H = w_hamiltonian();
  auto tr = hj::init(v, H);
  std::vector<double> speeds;
  for (const auto& s : tr.shocks) speeds.push_back(s.speed);
  std::sort(speeds.begin(), speeds.end());
  REQUIRE(speeds.size() == 4);
  CHECK(speeds[0] == doctest::Approx(-0.5));
  CHECK(speeds[1] == doctest::Approx(0.5));
  CHECK(speeds[2] == doctest::Approx(0.5));
  CHECK(speeds[3] == doctest::Approx(1.5));

  const auto ev = hj::next_event(tr, 0.0);
  REQUIRE(ev.has_value());
  CHECK(ev->t == doctest::Approx(1.0));
  CHECK(ev->x == doctest::Approx(0.5));
  CHECK(ev->shock_ids.size() == 2);

  const auto full = hj::evolve(v, H, 2.5);
  REQUIRE(full.events.size() == 1);
  REQUIRE(full.events[0].spawned_shocks.size() == 1);
  CHECK(full.shocks[full.events[0].spawned_shocks[0]].speed == doctest::Approx(1.0));
  for (double t : {0.5, 1.0, 2.0, 2.5})
    for (int i = 0; i <= 50; ++i) {
      const double x = -3.0 + 0.16 * i;
      CHECK(full.eval(t, x) == doctest::Approx(lax_brute(v, H, t, x)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("merging two shocks of a parabola") {
  const auto v = PLFunction({-1.0, 1.0}, {0.0, 0.0}, 1.0, -1.0);
  const auto tr = hj::evolve(v, half_square(), 5.0);
  REQUIRE(tr.events.size() == 1);
  const auto& ev = tr.events[0];
  CHECK(ev.t == doctest::Approx(2.0));
  REQUIRE(ev.spawned_shocks.size() == 1);
  CHECK(tr.shocks[ev.spawned_shocks[0]].speed == doctest::Approx(0.0));
}

TEST_CASE("parallel shocks never meet") {
  const auto v = PLFunction({0.0, 1.0}, {0.0, 1.0}, 0.0, 0.0);
  const auto tr = hj::init(v, half_square());
  // kinks 0 -> 1 and 1 -> 0 travel at the same speed 0.5
  CHECK_FALSE(hj::next_event(tr, 0.0).has_value());
}

TEST_CASE("three shocks meeting at one point form one event") {
  // slopes 2, 1, -1, -2 under the convex W: speeds 1.5, 0, -1.5 from
  // x = -1.5, 0, 1.5 all reach (1, 0)
  const auto v = PLFunction({-1.5, 0.0, 1.5}, {0.0, 1.5, 0.0}, 2.0, -2.0);
  auto tr = hj::init(v, w_hamiltonian());
  const auto ev = hj::next_event(tr, 0.0);
  REQUIRE(ev.has_value());
  CHECK(ev->t == doctest::Approx(1.0));
  CHECK(ev->x == doctest::Approx(0.0));
  CHECK(ev->shock_ids.size() == 3);
  const auto full = hj::evolve(v, w_hamiltonian(), 2.0);
  CHECK(full.events.size() == 1);
  CHECK(full.eval(2.0, 0.3) == doctest::Approx(lax_brute(v, w_hamiltonian(), 2.0, 0.3)));
}

TEST_CASE("collisions opening fans of several shocks") {
  // nonconvex H: a merged jump whose envelope has interior breakpoints
  // spreads into several waves; search a fixed random family for one
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t multi = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 5; ++i) pts.emplace_back(-2.0 + i, u(rng));
    const auto H = PLFunction::through(pts);
    const auto v = random_pl(rng, 4, 2.0);
    const auto tr = hj::evolve(v, H, 3.0);
    CHECK(hj::audit(tr).ok());
    for (const auto& e : tr.events) {
      multi += e.spawned_shocks.size() > 1 ? 1 : 0;
      for (std::size_t i = 0; i + 1 < e.fan.speeds.size(); ++i)
        CHECK(e.fan.speeds[i] < e.fan.speeds[i + 1]);
    }
  }
  CHECK(multi > 0);
}

TEST_CASE("initial condition reproduced") {
  std::mt19937 rng(5);
  const auto v = random_pl(rng, 6, 2.0);
  const auto tr = hj::evolve(v, half_square(), 1.0);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(tr.eval(0.0, x) == doctest::Approx(v(x)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("random convex H: Hopf-Lax, alphabet, Lipschitz, semigroup") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    const auto v = random_pl(rng, 1 + rep % 8, 2.0);
    const auto H = random_convex_h(rng, 1 + rep % 8);
    const auto tr = hj::evolve(v, H, 1.0);
    const auto a = hj::audit(tr);
    CHECK(a.ok());

    std::set<double> alphabet;
    for (double s : v.slopes()) alphabet.insert(s);
    for (double p : H.breakpoints()) alphabet.insert(p);
    for (const auto& p : tr.pieces) {
      bool found = false;
      for (double s : alphabet) found = found || std::abs(s - p.slope) < 1e-12;
      CHECK(found);
    }

    for (int k = 0; k < 25; ++k) {
      const double t = 0.05 + 0.95 * u(rng), x = -4.0 + 8.0 * u(rng);
      CHECK(tr.eval(t, x) == doctest::Approx(lax_brute(v, H, t, x)).epsilon(1e-9).scale(1.0));
    }

    const auto prof = tr.profile(1.0);
    CHECK(prof.lipschitz() <= v.lipschitz() + 1e-12);

    const auto half = hj::evolve(tr.profile(0.4), H, 0.6);
    // restarting reads slopes back from nodal values, so slopes equal up to
    // rounding are merged at 1e-9
    CHECK(hj::approx_equal(half.profile(0.6).normalized(1e-9), prof.normalized(1e-9), 1e-9));
  }
}

TEST_CASE("collision budget") {
  CHECK(hj::collision_budget(PLFunction({0.0, 1.0}, {0.0, 0.0}, 1.0, 0.0), half_square()) ==
        10 * (1 * 3 + 100));
}

TEST_CASE("json round trip keeps evaluation") {
  const auto v = PLFunction({0.0, 1.0}, {0.0, -1.0}, 2.0, 2.0);
  const auto tr = hj::evolve(v, w_hamiltonian(), 2.0);
  const auto back = hj::trace_from_json(hj::to_json(tr));
  for (double t : {0.0, 0.7, 1.0, 1.6})
    for (double x : {-1.0, 0.25, 0.5, 1.3, 3.0}) CHECK(back.eval(t, x) == tr.eval(t, x));
  CHECK(back.events.size() == tr.events.size());
}
