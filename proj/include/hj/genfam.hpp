#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hj/plfun.hpp"

namespace hj {

/// S_t(x, x0, y0) = v(x0) - t H(y0) + (x - x0) y0.
struct GenFamily {
  PLFunction v;
  PLFunction H;
  double t = 0.0;
};

[[nodiscard]] double s_eval(const GenFamily& gf, double x, double x0, double y0);

enum class SegmentLabel { genuine, fan };

struct FrontSegment {
  double xa = 0.0, ua = 0.0;  // start, in source order
  double xb = 0.0, ub = 0.0;  // end
  double slope = 0.0;
  SegmentLabel label = SegmentLabel::genuine;
  // genuine: source interval [src_lo, src_hi] of v (may be truncated tails);
  // fan: src_lo = src_hi = the kink.
  double src_lo = 0.0;
  double src_hi = 0.0;
};

struct WaveFrontCurve {
  double t = 0.0;
  std::vector<FrontSegment> segments;
  std::vector<std::string> warnings;
};

/// Front at time t. Infinite tails of v are truncated `tail` units beyond the
/// outermost breakpoints.
[[nodiscard]] WaveFrontCurve build_wavefront(const PLFunction& v, const PLFunction& H, double t,
                                             double tail = 1.0);

/// Fronts over a time grid.
[[nodiscard]] std::vector<WaveFrontCurve> big_front(const PLFunction& v, const PLFunction& H,
                                                    const std::vector<double>& times,
                                                    double tail = 1.0);

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

/// Image of the enlarged pseudograph of dv under the generalized flow, as a
/// single polyline in the (x, p) plane in source order.
struct PhaseCurve {
  double t = 0.0;
  std::vector<PhasePoint> points;
};

[[nodiscard]] PhaseCurve build_phase_curve(const PLFunction& v, const PLFunction& H, double t,
                                           double tail = 1.0);

/// Number of times the phase curve crosses the vertical line through x.
[[nodiscard]] int preimage_count(const PhaseCurve& curve, double x);

/// Largest Euclidean distance from (x, u(x)) to the union of front segments,
/// over `samples` uniform abscissae in [a, b].
[[nodiscard]] double section_distance(const WaveFrontCurve& front, const PLFunction& u, double a,
                                      double b, int samples = 1000);

/// section_distance over [a, b] is at most tol.
[[nodiscard]] bool section_check(const WaveFrontCurve& front, const PLFunction& u, double a,
                                 double b, double tol = 1e-8, int samples = 1000);

/// Largest distance between a fan extremity and the matching end of the
/// adjacent genuine segment.
[[nodiscard]] double endpoint_mismatch(const WaveFrontCurve& front);

/// Signs of (fan vertex value - viscosity value) over the fans of a front:
/// returns the smallest and largest difference over all fan vertices.
struct PositionReport {
  double min_diff = 0.0;
  double max_diff = 0.0;
  std::size_t vertices = 0;
};
template <typename Viscosity>
[[nodiscard]] PositionReport fan_position(const WaveFrontCurve& front, Viscosity&& u) {
  PositionReport r{kInf, -kInf, 0};
  for (const auto& s : front.segments) {
    if (s.label != SegmentLabel::fan) continue;
    for (auto [x, val] : {std::pair{s.xa, s.ua}, std::pair{s.xb, s.ub}}) {
      const double d = val - u(x);
      r.min_diff = std::min(r.min_diff, d);
      r.max_diff = std::max(r.max_diff, d);
      ++r.vertices;
    }
  }
  return r;
}

enum class CornerKind { corner, cusp };

struct FrontCorner {
  double x = 0.0;
  double u = 0.0;
  CornerKind kind = CornerKind::corner;
};

/// Vertices of the front polyline (in source order) where the direction
/// changes; a reversal of the x direction is reported as a cusp.
[[nodiscard]] std::vector<FrontCorner> front_corners(const WaveFrontCurve& front,
                                                     double angle_tol = 1e-9);

[[nodiscard]] nlohmann::json to_json(const WaveFrontCurve& front);
[[nodiscard]] nlohmann::json to_json(const PhaseCurve& curve);

}  // namespace hj
