#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hj/iterate.hpp"
#include "hj/minmax.hpp"
#include "hj/plfun.hpp"

namespace hj {

/// A Cauchy problem u_t + H(u_x) = 0, u(0, .) = v, read from JSON.
///
/// H and v accept three forms:
///   {"breakpoints": [...], "values": [...], "tails": [left, right]}
///   {"points": [[x, y], ...], "tails": [left, right]}
///   {"poly": [c0, c1, ...], "resolution": k, "domain": [a, b]}
/// Polynomial coefficients are listed by ascending degree, so [0, 1, 1, -1]
/// is p + p^2 - p^3. The polynomial is interpolated at k + 1 equispaced nodes
/// of the domain (default [-2, 2]) and continued by its end chords.
struct ProblemSpec {
  std::string name;
  PLFunction H = PLFunction::affine(0.0, 0.0);
  PLFunction v = PLFunction::affine(0.0, 0.0);
  double T = 1.0;
  double xmin = 0.0;
  double xmax = 0.0;
  Subdivision subdivision;
  int grid = 512;
  double margin = 1.0;
  std::vector<std::string> outputs;
};

/// Throws SpecError naming the offending field, or the line and column of a
/// JSON syntax error.
[[nodiscard]] ProblemSpec parse_spec(std::string_view text);
[[nodiscard]] ProblemSpec load_spec(const std::string& path);

[[nodiscard]] nlohmann::json to_json(const ProblemSpec& spec);

}  // namespace hj
