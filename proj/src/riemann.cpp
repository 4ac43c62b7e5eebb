#include "hj/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hj {

double rh_speed(const PLFunction& H, double a, double b) { return (H(b) - H(a)) / (b - a); }

RiemannFan solve_fan(double p_minus, double p_plus, const PLFunction& H, double t0, double x0) {
  RiemannFan fan;
  fan.t0 = t0;
  fan.x0 = x0;
  if (std::abs(p_minus - p_plus) <= kMergeTol * std::max(1.0, std::abs(p_minus))) {
    fan.kind = FanKind::trivial;
    fan.slopes = {p_minus};
    return fan;
  }
  std::vector<double> ps;
  if (p_minus < p_plus) {
    fan.kind = FanKind::convex;
    const PLFunction env = envelope(H, p_minus, p_plus, EnvelopeKind::convex);
    ps.push_back(p_minus);
    for (double z : env.breakpoints())
      if (z > p_minus && z < p_plus) ps.push_back(z);
    ps.push_back(p_plus);
  } else {
    fan.kind = FanKind::concave;
    const PLFunction env = envelope(H, p_plus, p_minus, EnvelopeKind::concave);
    ps.push_back(p_minus);
    for (auto it = env.breakpoints().rbegin(); it != env.breakpoints().rend(); ++it)
      if (*it > p_plus && *it < p_minus) ps.push_back(*it);
    ps.push_back(p_plus);
  }

  fan.slopes.push_back(ps.front());
  for (std::size_t i = 1; i < ps.size(); ++i) {
    fan.slopes.push_back(ps[i]);
    fan.speeds.push_back(rh_speed(H, fan.slopes[fan.slopes.size() - 2], ps[i]));
    // merge shocks whose speeds are not strictly increasing
    while (fan.speeds.size() >= 2) {
      const double s = fan.speeds.back(), prev = fan.speeds[fan.speeds.size() - 2];
      if (s > prev + kMergeTol * std::max(1.0, std::abs(s))) break;
      fan.slopes.erase(fan.slopes.end() - 2);
      fan.speeds.pop_back();
      fan.speeds.back() = rh_speed(H, fan.slopes[fan.slopes.size() - 2], fan.slopes.back());
    }
  }
  return fan;
}

double fan_eval(const RiemannFan& fan, const PLFunction& H, double v_apex, double t, double x) {
  const double tau = t - fan.t0;
  if (tau < 0.0) throw std::invalid_argument("fan_eval: t precedes the fan apex");
  const double dx = x - fan.x0;
  std::size_t j = 0;
  while (j < fan.speeds.size() && dx > tau * fan.speeds[j]) ++j;
  const double p = fan.slopes[j];
  return v_apex + p * dx - tau * H(p);
}

bool entropy_ok(double p_minus, double p_plus, const PLFunction& H, bool strict) {
  if (p_minus == p_plus) throw std::invalid_argument("not a jump");
  const double lo = std::min(p_minus, p_plus), hi = std::max(p_minus, p_plus);
  const double hlo = H(lo), hhi = H(hi);
  // +1: graph must lie above the chord; -1: below
  const double side = p_minus < p_plus ? 1.0 : -1.0;
  for (double p : H.breakpoints()) {
    if (p <= lo || p >= hi) continue;
    const double chord = hlo + (hhi - hlo) * (p - lo) / (hi - lo);
    const double gap = side * (H(p) - chord);
    const double tol = 1e-12 * std::max({1.0, std::abs(chord), std::abs(H(p))});
    if (gap < -tol) return false;
    if (strict && gap <= tol) return false;
  }
  return true;
}

nlohmann::json to_json(const RiemannFan& fan) {
  const char* kind = fan.kind == FanKind::convex    ? "convex"
                     : fan.kind == FanKind::concave ? "concave"
                                                    : "trivial";
  return {{"apex", {fan.t0, fan.x0}}, {"slopes", fan.slopes}, {"speeds", fan.speeds},
          {"kind", kind}};
}

}  // namespace hj
