#include "hj/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "hj/errors.hpp"

namespace hj {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw SpecError(field + ": " + what);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double d = j.get<double>();
  if (!std::isfinite(d)) fail(field, "must be finite");
  return d;
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::pair<double, double> pair_of(const json& j, const std::string& field) {
  const auto xs = numbers(j, field);
  if (xs.size() != 2) fail(field, "expected two numbers");
  return {xs[0], xs[1]};
}

PLFunction function_of(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  try {
    if (j.contains("poly")) {
      const auto coeffs = numbers(j["poly"], field + ".poly");
      if (coeffs.empty()) fail(field + ".poly", "needs at least one coefficient");
      int k = 200;
      if (j.contains("resolution")) {
        if (!j["resolution"].is_number_integer()) fail(field + ".resolution", "expected an integer");
        k = j["resolution"].get<int>();
      }
      if (k < 2) fail(field + ".resolution", "must be at least 2");
      auto [a, b] = j.contains("domain") ? pair_of(j["domain"], field + ".domain")
                                         : std::pair<double, double>{-2.0, 2.0};
      if (!(a < b)) fail(field + ".domain", "needs lo < hi");
      auto poly = [&coeffs](double p) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * p + *it;
        return acc;
      };
      return pl_approx(poly, k, a, b);
    }
    if (j.contains("points")) {
      const json& pts = j["points"];
      if (!pts.is_array() || pts.empty()) fail(field + ".points", "expected a nonempty array");
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto [x, y] = pair_of(pts[i], field + ".points[" + std::to_string(i) + "]");
        xs.push_back(x);
        ys.push_back(y);
      }
      if (!j.contains("tails")) fail(field + ".tails", "missing");
      const auto [l, r] = pair_of(j["tails"], field + ".tails");
      return PLFunction(xs, ys, l, r);
    }
    if (j.contains("breakpoints")) {
      const auto xs = numbers(j["breakpoints"], field + ".breakpoints");
      if (!j.contains("values")) fail(field + ".values", "missing");
      const auto ys = numbers(j["values"], field + ".values");
      if (ys.size() != xs.size()) fail(field + ".values", "length differs from breakpoints");
      if (!j.contains("tails")) fail(field + ".tails", "missing");
      const auto [l, r] = pair_of(j["tails"], field + ".tails");
      return PLFunction(xs, ys, l, r);
    }
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
  fail(field, "expected one of breakpoints/values/tails, points/tails or poly");
}

}  // namespace

ProblemSpec parse_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SpecError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                    ": invalid JSON");
  }
  if (!j.is_object()) throw SpecError("spec: expected a JSON object");

  ProblemSpec spec;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("name", "expected a string");
    spec.name = j["name"].get<std::string>();
  }
  if (!j.contains("H")) fail("H", "missing");
  if (!j.contains("v")) fail("v", "missing");
  spec.H = function_of(j["H"], "H");
  spec.v = function_of(j["v"], "v");

  if (j.contains("T")) {
    spec.T = number(j["T"], "T");
    if (!(spec.T > 0.0)) fail("T", "must be positive");
  }
  if (j.contains("times")) {
    if (j.contains("steps")) fail("steps", "give either steps or times, not both");
    spec.subdivision.times = numbers(j["times"], "times");
    try {
      spec.subdivision.validate();
    } catch (const std::invalid_argument& e) {
      fail("times", e.what());
    }
    if (!j.contains("T"))
      spec.T = spec.subdivision.times.back();
    else if (spec.subdivision.times.back() != spec.T)
      fail("times", "last time must equal T");
  } else {
    int n = 8;
    if (j.contains("steps")) {
      if (!j["steps"].is_number_integer()) fail("steps", "expected an integer");
      n = j["steps"].get<int>();
      if (n < 1) fail("steps", "must be at least 1");
    }
    spec.subdivision = Subdivision::uniform(spec.T, static_cast<std::size_t>(n));
  }

  if (j.contains("domain")) {
    std::tie(spec.xmin, spec.xmax) = pair_of(j["domain"], "domain");
    if (!(spec.xmin < spec.xmax)) fail("domain", "needs xmin < xmax");
  } else {
    const auto bp = spec.v.breakpoints();
    spec.xmin = bp.front() - 1.0;
    spec.xmax = bp.back() + 1.0;
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (g.is_number_integer()) {
      spec.grid = g.get<int>();
    } else if (g.is_object()) {
      if (g.contains("resolution")) {
        if (!g["resolution"].is_number_integer()) fail("grid.resolution", "expected an integer");
        spec.grid = g["resolution"].get<int>();
      }
      if (g.contains("margin")) {
        spec.margin = number(g["margin"], "grid.margin");
        if (!(spec.margin > 0.0)) fail("grid.margin", "must be positive");
      }
    } else {
      fail("grid", "expected an integer or an object");
    }
    if (spec.grid < 2) fail("grid", "resolution must be at least 2");
  }

  if (j.contains("outputs")) {
    if (!j["outputs"].is_array()) fail("outputs", "expected an array of strings");
    for (std::size_t i = 0; i < j["outputs"].size(); ++i) {
      if (!j["outputs"][i].is_string())
        fail("outputs[" + std::to_string(i) + "]", "expected a string");
      spec.outputs.push_back(j["outputs"][i].get<std::string>());
    }
  }
  return spec;
}

ProblemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

nlohmann::json to_json(const ProblemSpec& spec) {
  return {{"name", spec.name},
          {"H", to_json(spec.H)},
          {"v", to_json(spec.v)},
          {"T", spec.T},
          {"times", spec.subdivision.times},
          {"domain", {spec.xmin, spec.xmax}},
          {"grid", {{"resolution", spec.grid}, {"margin", spec.margin}}},
          {"outputs", spec.outputs}};
}

}  // namespace hj
