#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "hj/errors.hpp"
#include "hj/problem.hpp"

namespace {

const char* kMinimal = R"({
  "H": {"points": [[-1, 0.5], [0, 0], [1, 0.5]], "tails": [-1, 1]},
  "v": {"breakpoints": [0], "values": [0], "tails": [1, -1]}
})";

std::string message_of(const std::string& text) {
  try {
    (void)hj::parse_spec(text);
  } catch (const hj::SpecError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  const auto s = hj::parse_spec(kMinimal);
  CHECK(s.T == 1.0);
  CHECK(s.subdivision.steps() == 8);
  CHECK(s.subdivision.times.back() == 1.0);
  CHECK(s.grid == 512);
  CHECK(s.margin == 1.0);
  CHECK(s.xmin == -1.0);
  CHECK(s.xmax == 1.0);
  CHECK(s.outputs.empty());
  CHECK(s.v(2.0) == -2.0);
  CHECK(s.H(0.5) == 0.25);
}

TEST_CASE("polynomial coefficients are ascending") {
  const auto s = hj::parse_spec(R"({
    "H": {"poly": [0, 1, 1, -1], "resolution": 8},
    "v": {"points": [[0, 0]], "tails": [1, -1]}
  })");
  for (int i = 0; i <= 8; ++i) {
    const double p = -2.0 + 0.5 * i;
    CHECK(s.H(p) == doctest::Approx(-p * p * p + p * p + p).epsilon(1e-14).scale(1.0));
  }
  CHECK(s.H.breakpoints().front() == -2.0);
  CHECK(s.H.breakpoints().back() == 2.0);
}

TEST_CASE("field diagnostics") {
  CHECK(message_of(R"({"H": {"poly": [0, 0, 1]}})") == "v: missing");
  CHECK(message_of(R"({"v": {"poly": [0, 0, 1]}})") == "H: missing");
  CHECK(message_of(R"({"H": {"poly": []}, "v": {"poly": [1]}})").rfind("H.poly", 0) == 0);
  CHECK(message_of(R"({"H": {"poly": [1]}, "v": {"points": [[0, 0]]}})") == "v.tails: missing");
  CHECK(message_of(R"({"H": {"poly": [1]}, "v": {"points": [[0, "a"]], "tails": [0, 0]}})")
            .rfind("v.points[0][1]", 0) == 0);
  CHECK(message_of(R"({"H": {"poly": [1]}, "v": {"breakpoints": [1, 0], "values": [0, 0], "tails": [0, 0]}})")
            .rfind("v: ", 0) == 0);
  CHECK(message_of(R"({"H": {"poly": [1]}, "v": {"poly": [1]}, "T": -1})") == "T: must be positive");
  CHECK(message_of(R"({"H": {"poly": [1]}, "v": {"poly": [1]}, "steps": 0})") == "steps: must be at least 1");
  CHECK(message_of(R"({"H": {"poly": [1]}, "v": {"poly": [1]}, "grid": "fine"})")
            .rfind("grid", 0) == 0);
  CHECK(message_of(R"({"H": {"poly": [1]}, "v": {"poly": [1]}, "outputs": [3]})")
            .rfind("outputs[0]", 0) == 0);
  CHECK(message_of("[1, 2]") == "spec: expected a JSON object");
}

TEST_CASE("syntax errors carry line and column") {
  const auto m = message_of("{\n  \"H\": {\"poly\": [1]},\n  \"v\": {\"poly\": [1]\n}");
  CHECK(m.rfind("line 4, column", 0) == 0);
  CHECK(message_of("{\"T\": 1,,}").rfind("line 1, column 9", 0) == 0);
}

TEST_CASE("steps and times") {
  const std::string head = R"({"H": {"poly": [1]}, "v": {"poly": [1]}, )";
  CHECK(message_of(head + R"("steps": 2, "times": [0, 1]})") ==
        "steps: give either steps or times, not both");
  CHECK(message_of(head + R"("times": [0, 0.5, 0.5]})").rfind("times: ", 0) == 0);
  CHECK(message_of(head + R"("times": [0.1, 1]})").rfind("times: ", 0) == 0);
  CHECK(message_of(head + R"("T": 2, "times": [0, 1]})") == "times: last time must equal T");

  const auto s = hj::parse_spec(head + R"("times": [0, 0.25, 1.5]})");
  CHECK(s.T == 1.5);
  CHECK(s.subdivision.steps() == 2);
  const auto u = hj::parse_spec(head + R"("T": 2, "steps": 4})");
  CHECK(u.subdivision.mesh() == 0.5);
}

TEST_CASE("grid forms") {
  const std::string head = R"({"H": {"poly": [1]}, "v": {"poly": [1]}, )";
  CHECK(hj::parse_spec(head + R"("grid": 64})").grid == 64);
  const auto s = hj::parse_spec(head + R"("grid": {"resolution": 128, "margin": 0.5}})");
  CHECK(s.grid == 128);
  CHECK(s.margin == 0.5);
  CHECK(message_of(head + R"("grid": 1})") == "grid: resolution must be at least 2");
  CHECK(message_of(head + R"("grid": {"margin": 0}})") == "grid.margin: must be positive");
}

TEST_CASE("explicit domain and json round trip") {
  const auto s = hj::parse_spec(R"({
    "name": "w",
    "H": {"points": [[-2, 2], [-1, 0.5], [0, 0], [1, 0.5], [2, 2]], "tails": [-2, 2]},
    "v": {"points": [[0, 0], [1, -1]], "tails": [2, 2]},
    "T": 2, "steps": 8, "domain": [-2, 4], "outputs": ["profiles", "shocks"]
  })");
  CHECK(s.xmin == -2.0);
  CHECK(s.xmax == 4.0);
  const auto back = hj::parse_spec(hj::to_json(s).dump());
  CHECK(back.name == "w");
  CHECK(back.T == 2.0);
  CHECK(back.subdivision.times == s.subdivision.times);
  CHECK(back.xmin == s.xmin);
  CHECK(back.xmax == s.xmax);
  CHECK(back.grid == s.grid);
  CHECK(back.outputs == s.outputs);
  CHECK(hj::approx_equal(back.H, s.H, 0.0));
  CHECK(hj::approx_equal(back.v, s.v, 0.0));
}

TEST_CASE("load_spec reports unreadable paths") {
  CHECK_THROWS_AS((void)hj::load_spec("/nonexistent/spec.json"), hj::SpecError);
}
