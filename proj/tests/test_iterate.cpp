#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "hj/fronttrack.hpp"
#include "hj/iterate.hpp"
#include "hj/minmax.hpp"
#include "hj/plfun.hpp"

using hj::PLFunction;
using hj::Subdivision;

namespace {

PLFunction w_hamiltonian() {
  return PLFunction::through({{-2.0, 2.0}, {-1.0, 0.5}, {0.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}});
}

PLFunction w_datum() { return PLFunction({0.0, 1.0}, {0.0, -1.0}, 2.0, 2.0); }

PLFunction cubic(int k) {
  return hj::pl_approx([](double p) { return -p * p * p + p * p + p; }, k, -2.0, 2.0);
}

PLFunction quartic(int k) {
  return hj::pl_approx([](double p) { return p * p * p * p - p * p; }, k, -2.0, 2.0);
}

// The two smooth data with contact shocks, sampled on [-0.5, 0.5].
PLFunction first_datum(int k) {
  return hj::pl_approx([](double x) { return x <= 0.0 ? x - x * x : x * x - x; }, k, -0.5, 0.5);
}

PLFunction second_datum(int k) {
  return hj::pl_approx([](double x) { return x * x - std::abs(x); }, k, -0.5, 0.5);
}

std::size_t contacts(const PLFunction& v, const PLFunction& H, double T, std::size_t n) {
  const auto tr = hj::iterated_minmax(v, H, Subdivision::uniform(T, n));
  const auto paths = hj::extract_shocks(tr, H, {0.1});
  std::size_t c = 0;
  for (const auto& verdict : hj::contact_shock_check(paths, H, 0.05)) c += verdict.contact ? 1 : 0;
  return c;
}

}  // namespace

TEST_CASE("subdivisions") {
  const auto z = Subdivision::uniform(2.0, 4);
  CHECK(z.steps() == 4);
  CHECK(z.mesh() == doctest::Approx(0.5));
  CHECK(z.times.back() == 2.0);
  CHECK(z.index(0.0) == 0);
  CHECK(z.index(0.49) == 0);
  CHECK(z.index(0.5) == 1);
  CHECK(z.index(1.99) == 3);
  const auto r = z.refined({0.75, 1.0, 1.0 + 1e-14});
  CHECK(r.steps() == 5);
  CHECK(r.mesh() == doctest::Approx(0.5));
  CHECK_THROWS_AS((Subdivision{{0.0, 1.0, 1.0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Subdivision{{0.1, 1.0}}.validate()), std::invalid_argument);
}

TEST_CASE("one step with convex H is the Hopf-Lax profile") {
  const auto H = hj::pl_approx([](double p) { return 0.5 * p * p; }, 10, -2.0, 2.0);
  const auto v = PLFunction::through({{-1.0, 0.0}, {0.0, 0.8}, {0.5, 0.1}, {1.0, 0.4}});
  const auto tr = hj::iterated_minmax(v, H, Subdivision{{0.0, 0.7}});
  for (int i = 0; i <= 60; ++i) {
    const double x = -3.0 + 0.1 * i;
    CHECK(tr.profiles.back()(x) == doctest::Approx(hj::hopf_lax(v, H, 0.7, x)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("adding the collision times reproduces front tracking") {
  const auto v = w_datum();
  const auto H = w_hamiltonian();
  const auto ref = hj::evolve(v, H, 2.0);
  REQUIRE(ref.collision_times().size() == 1);
  const auto z = Subdivision::uniform(2.0, 3).refined(ref.collision_times());
  hj::IterationTrace tr = hj::iterated_minmax(v, H, z);
  hj::attach_errors(tr, H);
  for (double e : tr.errors) CHECK(e <= 1e-9);
  for (std::size_t k = 0; k + 1 < tr.profiles.size(); ++k)
    CHECK(tr.profiles[k + 1].lipschitz() <= tr.profiles[k].lipschitz() + 1e-12);
}

TEST_CASE("convergence table") {
  SUBCASE("one collision: error within 2 k max|H| |zeta|") {
    const auto table = hj::convergence_study(w_datum(), w_hamiltonian(), 2.0, {2, 4, 8, 16});
    CHECK(table.collisions == 1);
    CHECK(table.h_max == doctest::Approx(2.0));
    for (const auto& r : table.rows) {
      CHECK(r.bound == doctest::Approx(2.0 * 1 * 2.0 * r.mesh));
      CHECK(r.error <= r.bound + 1e-9);
    }
  }
  SUBCASE("affine datum") {
    const auto table = hj::convergence_study(PLFunction::affine(0.3, 1.0), cubic(20), 1.0, {1, 2, 4});
    for (const auto& r : table.rows) CHECK(r.error <= 1e-12);
  }
  SUBCASE("convex H needs no iteration") {
    const auto H = hj::pl_approx([](double p) { return 0.5 * p * p; }, 10, -2.0, 2.0);
    const auto v = PLFunction::through({{-1.0, 0.0}, {0.0, 0.8}, {0.5, 0.1}, {1.0, 0.4}});
    for (const auto& r : hj::convergence_study(v, H, 1.0, {1, 2, 4}).rows) CHECK(r.error <= 1e-9);
  }
}

TEST_CASE("shock extraction") {
  SUBCASE("front tracking fed trace satisfies Rankine-Hugoniot") {
    const auto v = w_datum();
    const auto H = w_hamiltonian();
    const auto ref = hj::evolve(v, H, 0.9);
    hj::IterationTrace tr;
    tr.zeta = Subdivision::uniform(0.9, 9);
    for (double t : tr.zeta.times) tr.profiles.push_back(ref.profile(t));
    const auto paths = hj::extract_shocks(tr, H);
    CHECK_FALSE(paths.empty());
    for (const auto& p : paths)
      for (double r : p.rh_residuals) CHECK(r < 1e-9);
  }
  SUBCASE("no kinks, no paths") {
    hj::IterationTrace tr;
    tr.zeta = Subdivision::uniform(1.0, 2);
    tr.profiles.assign(3, PLFunction::affine(0.2, 0.0));
    CHECK(hj::extract_shocks(tr, cubic(10)).empty());
  }
}

TEST_CASE("contact shocks") {
  SUBCASE("cubic hamiltonian: one") { CHECK(contacts(first_datum(50), cubic(200), 0.2, 4) == 1); }
  SUBCASE("quartic hamiltonian: two") { CHECK(contacts(second_datum(50), quartic(200), 0.2, 4) == 2); }
  SUBCASE("convex H and a concave kink: an ordinary shock") {
    const auto H = hj::pl_approx([](double p) { return 0.5 * p * p; }, 40, -2.0, 2.0);
    const auto v = PLFunction({0.0}, {0.0}, 1.0, -0.5);
    const auto tr = hj::iterated_minmax(v, H, Subdivision::uniform(0.5, 5));
    const auto paths = hj::extract_shocks(tr, H, {0.1});
    const auto verdicts = hj::contact_shock_check(paths, H, 0.05);
    REQUIRE(verdicts.size() == 1);
    CHECK(verdicts[0].rh_ok);
    CHECK_FALSE(verdicts[0].contact);
  }
}

TEST_CASE("composition with a shrinking first step approaches one step") {
  const auto v = first_datum(20);
  const auto H = cubic(40);
  const double t = 0.2;
  const auto one = hj::iterated_minmax(v, H, Subdivision{{0.0, t}}).profiles.back();
  std::vector<double> gaps;
  for (double s : {0.1, 0.01, 0.001}) {
    const auto two = hj::iterated_minmax(v, H, Subdivision{{0.0, s * t, t}}).profiles.back();
    gaps.push_back(hj::sup_distance(two, one, -1.0, 1.0));
  }
  CHECK(gaps[2] <= gaps[0] + 1e-12);
  CHECK(gaps[2] < 2.0 * 0.001 * t * 2.0 + 1e-9);
}

TEST_CASE("json round trip of a trace") {
  const auto tr = hj::iterated_minmax(w_datum(), w_hamiltonian(), Subdivision::uniform(2.0, 4));
  const auto j = hj::to_json(tr);
  CHECK(j.at("profiles").size() == 5);
  CHECK(j.at("times").size() == 5);
}
