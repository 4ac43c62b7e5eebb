#pragma once

#include <vector>

#include <json.hpp>

#include "hj/plfun.hpp"

namespace hj {

enum class FanKind { convex, concave, trivial };

/// Entropy solution of a single Riemann problem for a PL Hamiltonian.
///
/// slopes[0] is the left state, slopes.back() the right state; speeds[i] is
/// the Rankine-Hugoniot speed of the shock between slopes[i] and slopes[i+1],
/// strictly increasing.
struct RiemannFan {
  double t0 = 0.0;
  double x0 = 0.0;
  std::vector<double> slopes;
  std::vector<double> speeds;
  FanKind kind = FanKind::trivial;
};

/// Rankine-Hugoniot speed (H(b) - H(a)) / (b - a).
[[nodiscard]] double rh_speed(const PLFunction& H, double a, double b);

/// Builds the fan from the convex envelope of H on [p_minus, p_plus] when
/// p_minus < p_plus, or the concave envelope on [p_plus, p_minus] traversed
/// downward when p_minus > p_plus. Speeds closer than kMergeTol are merged.
[[nodiscard]] RiemannFan solve_fan(double p_minus, double p_plus, const PLFunction& H,
                                   double t0 = 0.0, double x0 = 0.0);

/// Closed-form solution of the fan at (t, x), anchored so that the value at
/// the apex is v_apex. Throws if t < t0.
[[nodiscard]] double fan_eval(const RiemannFan& fan, const PLFunction& H, double v_apex, double t,
                              double x);

/// Oleinik condition for a jump from p_minus (left) to p_plus (right): H lies
/// on or below the chord when p_plus < p_minus, on or above it when
/// p_minus < p_plus. With strict, interior breakpoints must be strictly on
/// the correct side. Throws "not a jump" when p_minus == p_plus.
[[nodiscard]] bool entropy_ok(double p_minus, double p_plus, const PLFunction& H,
                              bool strict = false);

[[nodiscard]] nlohmann::json to_json(const RiemannFan& fan);

}  // namespace hj
