#include "hj/genfam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hj {

namespace {

struct SideSlopes {
  double left;
  double right;
  [[nodiscard]] double lo() const { return std::min(left, right); }
  [[nodiscard]] double hi() const { return std::max(left, right); }
};

SideSlopes side_slopes(const PLFunction& H, double p) {
  const auto bp = H.breakpoints();
  auto it = std::lower_bound(bp.begin(), bp.end(), p);
  for (auto c : {it, it == bp.begin() ? it : std::prev(it)}) {
    if (c != bp.end() && std::abs(*c - p) <= kMergeTol * std::max(1.0, std::abs(p))) {
      const auto i = static_cast<std::size_t>(c - bp.begin());
      return {H.slope(i), H.slope(i + 1)};
    }
  }
  const double q = H.slope(H.slope_index(p));
  return {q, q};
}

// H breakpoints strictly between a and b, ordered from a towards b.
std::vector<double> breakpoints_between(const PLFunction& H, double a, double b) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double tol = kMergeTol * std::max({1.0, std::abs(lo), std::abs(hi)});
  std::vector<double> r;
  for (double h : H.breakpoints())
    if (h > lo + tol && h < hi - tol) r.push_back(h);
  if (a > b) std::reverse(r.begin(), r.end());
  return r;
}

double point_segment_distance(double px, double py, const FrontSegment& s) {
  const double dx = s.xb - s.xa, dy = s.ub - s.ua;
  const double len2 = dx * dx + dy * dy;
  double lam = 0.0;
  if (len2 > 0.0) lam = std::clamp(((px - s.xa) * dx + (py - s.ua) * dy) / len2, 0.0, 1.0);
  return std::hypot(px - (s.xa + lam * dx), py - (s.ua + lam * dy));
}

// Source pieces of v: slope and x-interval, tails truncated.
struct SourcePiece {
  double lo, hi, slope;
};

std::vector<SourcePiece> source_pieces(const PLFunction& v, double tail) {
  const auto xs = v.breakpoints();
  const std::size_t n = xs.size();
  std::vector<SourcePiece> out;
  out.push_back({xs.front() - tail, xs.front(), v.slope(0)});
  for (std::size_t i = 1; i < n; ++i) out.push_back({xs[i - 1], xs[i], v.slope(i)});
  out.push_back({xs.back(), xs.back() + tail, v.slope(n)});
  return out;
}

}  // namespace

double s_eval(const GenFamily& gf, double x, double x0, double y0) {
  return gf.v(x0) - gf.t * gf.H(y0) + (x - x0) * y0;
}

WaveFrontCurve build_wavefront(const PLFunction& v_in, const PLFunction& H_in, double t,
                               double tail) {
  if (!(t > 0.0)) throw std::invalid_argument("build_wavefront: t must be positive");
  const PLFunction v = v_in.normalized();
  const PLFunction H = H_in.normalized();
  WaveFrontCurve front;
  front.t = t;
  const auto pieces = source_pieces(v, tail);

  auto genuine = [&](const SourcePiece& sp) {
    const SideSlopes q = side_slopes(H, sp.slope);
    const double shift = -t * H(sp.slope);
    FrontSegment s;
    s.xa = sp.lo + t * q.lo();
    s.xb = sp.hi + t * q.hi();
    s.ua = v(sp.lo) + sp.slope * (s.xa - sp.lo) + shift;
    s.ub = v(sp.hi) + sp.slope * (s.xb - sp.hi) + shift;
    s.slope = sp.slope;
    s.label = SegmentLabel::genuine;
    s.src_lo = sp.lo;
    s.src_hi = sp.hi;
    front.segments.push_back(s);
  };

  const bool affine = pieces.size() == 2 && pieces[0].slope == pieces[1].slope;
  if (affine) {
    genuine({pieces[0].lo, pieces[1].hi, pieces[0].slope});
    return front;
  }

  genuine(pieces.front());
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const double xbar = pieces[k].hi;
    const double pm = pieces[k].slope, pp = pieces[k + 1].slope;
    const double vbar = v(xbar);
    for (double h : breakpoints_between(H, pm, pp)) {
      const SideSlopes q = side_slopes(H, h);
      const double qa = pm < pp ? q.left : q.right;
      const double qb = pm < pp ? q.right : q.left;
      FrontSegment s;
      s.xa = xbar + t * qa;
      s.ua = vbar + t * (h * qa - H(h));
      s.xb = xbar + t * qb;
      s.ub = vbar + t * (h * qb - H(h));
      s.slope = h;
      s.label = SegmentLabel::fan;
      s.src_lo = s.src_hi = xbar;
      front.segments.push_back(s);
    }
    genuine(pieces[k + 1]);
  }
  return front;
}

std::vector<WaveFrontCurve> big_front(const PLFunction& v, const PLFunction& H,
                                      const std::vector<double>& times, double tail) {
  std::vector<WaveFrontCurve> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(build_wavefront(v, H, t, tail));
  return out;
}

PhaseCurve build_phase_curve(const PLFunction& v_in, const PLFunction& H_in, double t,
                             double tail) {
  if (t < 0.0) throw std::invalid_argument("build_phase_curve: t must be nonnegative");
  const PLFunction v = v_in.normalized();
  const PLFunction H = H_in.normalized();
  PhaseCurve curve;
  curve.t = t;
  auto push = [&](double x, double p) {
    if (!curve.points.empty() && curve.points.back().x == x && curve.points.back().p == p) return;
    curve.points.push_back({x, p});
  };
  const auto pieces = source_pieces(v, tail);
  push(pieces.front().lo + t * side_slopes(H, pieces.front().slope).lo(), pieces.front().slope);
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const double pm = pieces[k].slope, pp = pieces[k + 1].slope;
    const double xbar = pieces[k].hi;
    const SideSlopes q = side_slopes(H, pm);
    double x = xbar + t * (pm < pp ? q.right : q.left);
    push(x, pm);
    for (double h : breakpoints_between(H, pm, pp)) {
      push(x, h);
      const SideSlopes qh = side_slopes(H, h);
      x = xbar + t * (pm < pp ? qh.right : qh.left);
      push(x, h);
    }
    push(x, pp);
  }
  push(pieces.back().hi + t * side_slopes(H, pieces.back().slope).hi(), pieces.back().slope);
  return curve;
}

int preimage_count(const PhaseCurve& curve, double x) {
  int n = 0;
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const double a = curve.points[i].x, b = curve.points[i + 1].x;
    if (a == b) continue;
    if ((a <= x && x < b) || (b <= x && x < a)) ++n;
  }
  return n;
}

double section_distance(const WaveFrontCurve& front, const PLFunction& u, double a, double b,
                        int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = samples == 1 ? a : a + (b - a) * i / (samples - 1);
    const double y = u(x);
    double best = kInf;
    for (const auto& s : front.segments) best = std::min(best, point_segment_distance(x, y, s));
    worst = std::max(worst, best);
  }
  return worst;
}

bool section_check(const WaveFrontCurve& front, const PLFunction& u, double a, double b,
                   double tol, int samples) {
  return section_distance(front, u, a, b, samples) <= tol;
}

double endpoint_mismatch(const WaveFrontCurve& front) {
  double worst = 0.0;
  const auto& segs = front.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].label != SegmentLabel::fan) continue;
    if (i == 0 || segs[i - 1].label != SegmentLabel::fan) {
      std::size_t g = i;
      while (g > 0 && segs[g - 1].label == SegmentLabel::fan) --g;
      if (g > 0) {
        worst = std::max(worst, point_segment_distance(segs[i].xa, segs[i].ua, segs[g - 1]));
      }
    }
    if (i + 1 == segs.size() || segs[i + 1].label != SegmentLabel::fan) {
      if (i + 1 < segs.size())
        worst = std::max(worst, point_segment_distance(segs[i].xb, segs[i].ub, segs[i + 1]));
    }
  }
  return worst;
}

std::vector<FrontCorner> front_corners(const WaveFrontCurve& front, double angle_tol) {
  std::vector<FrontCorner> out;
  const auto& segs = front.segments;
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const FrontSegment& a = segs[i];
    const FrontSegment& b = segs[i + 1];
    const double ax = a.xb - a.xa, ay = a.ub - a.ua;
    const double bx = b.xb - b.xa, by = b.ub - b.ua;
    const double la = std::hypot(ax, ay), lb = std::hypot(bx, by);
    if (la == 0.0 || lb == 0.0) continue;
    const double cross = (ax * by - ay * bx) / (la * lb);
    const double dot = (ax * bx + ay * by) / (la * lb);
    if (std::abs(cross) <= angle_tol && dot > 0.0) continue;
    const bool reversal = ax * bx < 0.0;
    out.push_back({b.xa, b.ua, reversal ? CornerKind::cusp : CornerKind::corner});
  }
  return out;
}

nlohmann::json to_json(const WaveFrontCurve& front) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : front.segments) {
    segs.push_back({{"a", {s.xa, s.ua}},
                    {"b", {s.xb, s.ub}},
                    {"slope", s.slope},
                    {"label", s.label == SegmentLabel::fan ? "fan" : "genuine"},
                    {"source", {s.src_lo, s.src_hi}}});
  }
  return {{"t", front.t}, {"segments", segs}, {"warnings", front.warnings}};
}

nlohmann::json to_json(const PhaseCurve& curve) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : curve.points) pts.push_back({p.x, p.p});
  return {{"t", curve.t}, {"points", pts}};
}

}  // namespace hj
