#include "hj/plfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hj {

namespace {

bool near(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

}  // namespace

PLFunction::PLFunction(std::vector<double> breakpoints, std::vector<double> values,
                       double left_tail_slope, double right_tail_slope)
    : xs_(std::move(breakpoints)), ys_(std::move(values)), left_(left_tail_slope),
      right_(right_tail_slope) {
  if (xs_.empty()) throw std::invalid_argument("PLFunction needs at least one breakpoint");
  if (xs_.size() != ys_.size())
    throw std::invalid_argument("PLFunction breakpoints and values differ in length");
  if (!std::isfinite(left_) || !std::isfinite(right_))
    throw std::invalid_argument("PLFunction tail slopes must be finite");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i]))
      throw std::invalid_argument("PLFunction data must be finite");
    if (i > 0 && !(xs_[i] > xs_[i - 1]))
      throw std::invalid_argument("PLFunction breakpoints must be strictly increasing");
  }
}

PLFunction PLFunction::affine(double slope, double intercept) {
  return PLFunction({0.0}, {intercept}, slope, slope);
}

PLFunction PLFunction::through(std::span<const std::pair<double, double>> points) {
  if (points.empty()) throw std::invalid_argument("PLFunction::through needs points");
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& [x, y] : points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  double left = 0.0, right = 0.0;
  if (xs.size() >= 2) {
    left = (ys[1] - ys[0]) / (xs[1] - xs[0]);
    const std::size_t n = xs.size();
    right = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
  }
  return PLFunction(std::move(xs), std::move(ys), left, right);
}

PLFunction PLFunction::through(std::initializer_list<std::pair<double, double>> points) {
  return through(std::span<const std::pair<double, double>>(points.begin(), points.size()));
}

std::size_t PLFunction::slope_index(double x) const {
  return static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
}

double PLFunction::slope(std::size_t i) const {
  if (i == 0) return left_;
  if (i >= xs_.size()) return right_;
  return (ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]);
}

std::vector<double> PLFunction::slopes() const {
  std::vector<double> out(xs_.size() + 1);
  for (std::size_t i = 0; i <= xs_.size(); ++i) out[i] = slope(i);
  return out;
}

double PLFunction::operator()(double x) const {
  const std::size_t i = slope_index(x);
  if (i == 0) return ys_.front() + left_ * (x - xs_.front());
  if (i == xs_.size()) return ys_.back() + right_ * (x - xs_.back());
  const double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
}

SlopeInterval PLFunction::clarke(double x) const {
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  // snap to a breakpoint on either side
  for (auto cand : {it, it == xs_.begin() ? it : std::prev(it)}) {
    if (cand != xs_.end() && near(*cand, x, kMergeTol)) {
      const auto i = static_cast<std::size_t>(cand - xs_.begin());
      const double a = slope(i), b = slope(i + 1);
      return {std::min(a, b), std::max(a, b)};
    }
  }
  const double s = slope(slope_index(x));
  return {s, s};
}

double PLFunction::lipschitz() const {
  double m = 0.0;
  for (std::size_t i = 0; i <= xs_.size(); ++i) m = std::max(m, std::abs(slope(i)));
  return m;
}

SlopeInterval PLFunction::slope_range() const {
  SlopeInterval r{kInf, -kInf};
  for (std::size_t i = 0; i <= xs_.size(); ++i) {
    r.lo = std::min(r.lo, slope(i));
    r.hi = std::max(r.hi, slope(i));
  }
  return r;
}

bool PLFunction::is_convex(double tol) const {
  for (std::size_t i = 0; i < xs_.size(); ++i)
    if (slope(i + 1) < slope(i) - tol * std::max(1.0, std::abs(slope(i)))) return false;
  return true;
}

bool PLFunction::is_concave(double tol) const {
  for (std::size_t i = 0; i < xs_.size(); ++i)
    if (slope(i + 1) > slope(i) + tol * std::max(1.0, std::abs(slope(i)))) return false;
  return true;
}

PLFunction PLFunction::normalized(double tol) const {
  // merge near-duplicate breakpoints
  std::vector<double> xs{xs_.front()}, ys{ys_.front()};
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (xs_[i] - xs.back() <= tol * std::max(1.0, std::abs(xs_[i]))) continue;
    xs.push_back(xs_[i]);
    ys.push_back(ys_[i]);
  }
  // drop collinear breakpoints; a kept point is compared against the last kept
  std::vector<double> ox, oy;
  const std::size_t n = xs.size();
  auto seg_slope = [&](std::size_t i, std::size_t j) { return (ys[j] - ys[i]) / (xs[j] - xs[i]); };
  for (std::size_t i = 0; i < n; ++i) {
    double sl = ox.empty() ? left_ : (ys[i] - oy.back()) / (xs[i] - ox.back());
    double sr = (i + 1 < n) ? seg_slope(i, i + 1) : right_;
    if (near(sl, sr, tol)) continue;
    ox.push_back(xs[i]);
    oy.push_back(ys[i]);
  }
  if (ox.empty()) {
    // affine: canonical anchor at x = 0
    const double value0 = ys.front() + left_ * (0.0 - xs.front());
    return PLFunction({0.0}, {value0}, left_, left_);
  }
  return PLFunction(std::move(ox), std::move(oy), left_, right_);
}

std::vector<double> PLFunction::kinks() const {
  const PLFunction n = normalized();
  if (n.size() == 1 && near(n.left_tail_slope(), n.right_tail_slope(), kMergeTol)) return {};
  return {n.breakpoints().begin(), n.breakpoints().end()};
}

PLFunction PLFunction::shifted(double dy) const {
  std::vector<double> ys = ys_;
  for (double& y : ys) y += dy;
  return PLFunction(xs_, std::move(ys), left_, right_);
}

PLFunction PLFunction::scaled(double factor) const {
  std::vector<double> ys = ys_;
  for (double& y : ys) y *= factor;
  return PLFunction(xs_, std::move(ys), left_ * factor, right_ * factor);
}

ExtendedPL::ExtendedPL(PLFunction core, double lo, double hi)
    : core_(std::move(core)), lo_(lo), hi_(hi) {
  if (!(lo_ <= hi_)) throw std::invalid_argument("ExtendedPL domain must satisfy lo <= hi");
  if (lo_ < hi_) {
    // convexity on the domain: check the restriction
    const PLFunction r = envelope(core_, lo_, hi_, EnvelopeKind::convex);
    for (double y : core_.breakpoints()) {
      if (y <= lo_ || y >= hi_) continue;
      if (std::abs(r(y) - core_(y)) > 1e-9 * std::max(1.0, std::abs(core_(y))))
        throw std::invalid_argument("ExtendedPL core must be convex on its domain");
    }
  }
}

double ExtendedPL::operator()(double y) const {
  if (y < lo_ || y > hi_) return kInf;
  return core_(y);
}

PLFunction envelope(const PLFunction& f, double a, double b, EnvelopeKind kind) {
  if (!(a < b)) throw std::invalid_argument("empty interval");
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(a, f(a));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.breakpoints()[i];
    if (x > a && x < b) pts.emplace_back(x, f.values()[i]);
  }
  pts.emplace_back(b, f(b));

  const double sign = kind == EnvelopeKind::convex ? 1.0 : -1.0;
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& q = hull.back();
      if (sign * cross(o.first, o.second, q.first, q.second, p.first, p.second) <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return PLFunction::through(hull);
}

ExtendedPL conjugate(const PLFunction& f_in) {
  if (!f_in.is_convex()) throw std::invalid_argument("conjugate requires convexity");
  const PLFunction f = f_in.normalized();
  const std::size_t n = f.size();
  const auto xs = f.breakpoints();
  const auto ys = f.values();
  if (n == 1 && f.left_tail_slope() == f.right_tail_slope()) {
    const double s = f.left_tail_slope();
    const double c = ys[0] - s * xs[0];
    return ExtendedPL(PLFunction({s}, {-c}, 0.0, 0.0), s, s);
  }
  std::vector<double> sig(n + 1), val(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    sig[i] = f.slope(i);
    const std::size_t j = std::min(i, n - 1);
    val[i] = xs[j] * sig[i] - ys[j];
  }
  PLFunction core(std::move(sig), std::move(val), xs.front(), xs.back());
  const double lo = core.breakpoints().front(), hi = core.breakpoints().back();
  return ExtendedPL(std::move(core), lo, hi);
}

PLFunction conjugate(const ExtendedPL& g) {
  const PLFunction& c = g.core();
  if (g.lo() == g.hi()) return PLFunction::affine(g.lo(), -c(g.lo())).normalized();
  std::vector<double> ys{g.lo()}, gs{c(g.lo())};
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double y = c.breakpoints()[i];
    if (y > g.lo() && y < g.hi()) {
      ys.push_back(y);
      gs.push_back(c.values()[i]);
    }
  }
  ys.push_back(g.hi());
  gs.push_back(c(g.hi()));
  const PLFunction restricted = PLFunction(ys, gs, 0.0, 0.0);
  const std::size_t m = ys.size() - 1;
  std::vector<double> xi, val;
  for (std::size_t j = 1; j <= m; ++j) {
    const double s = restricted.slope(j);
    if (!xi.empty() && s < xi.back() - kMergeTol * std::max(1.0, std::abs(s)))
      throw std::invalid_argument("conjugate requires convexity");
    if (!xi.empty() && near(s, xi.back(), kMergeTol)) continue;
    xi.push_back(s);
    val.push_back(s * ys[j - 1] - gs[j - 1]);
  }
  return PLFunction(std::move(xi), std::move(val), g.lo(), g.hi()).normalized();
}

PLFunction pl_approx(const std::function<double(double)>& target, int k, double a, double b) {
  if (k < 1) throw std::invalid_argument("pl_approx needs k >= 1");
  if (!(a < b)) throw std::invalid_argument("empty interval");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) {
    const double x = i == k ? b : a + (b - a) * static_cast<double>(i) / k;
    const double y = target(x);
    if (!std::isfinite(y)) throw std::invalid_argument("pl_approx: non-finite sample value");
    pts.emplace_back(x, y);
  }
  return PLFunction::through(pts);
}

PLFunction pl_approx(std::span<const std::pair<double, double>> samples, int k, double a,
                     double b) {
  std::vector<std::pair<double, double>> s(samples.begin(), samples.end());
  for (const auto& [x, y] : s)
    if (!std::isfinite(x) || !std::isfinite(y))
      throw std::invalid_argument("pl_approx: non-finite sample value");
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(),
                      [](const auto& p, const auto& q) { return p.first == q.first; }),
          s.end());
  const PLFunction interp = PLFunction::through(s);
  return pl_approx([&](double x) { return interp(x); }, k, a, b);
}

namespace {

std::vector<double> merged_breakpoints(const PLFunction& f, const PLFunction& g) {
  std::vector<double> xs(f.breakpoints().begin(), f.breakpoints().end());
  xs.insert(xs.end(), g.breakpoints().begin(), g.breakpoints().end());
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (out.empty() || x - out.back() > kMergeTol * std::max(1.0, std::abs(x))) out.push_back(x);
  return out;
}

}  // namespace

PLFunction add(const PLFunction& f, const PLFunction& g) {
  std::vector<double> xs = merged_breakpoints(f, g);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]) + g(xs[i]);
  return PLFunction(std::move(xs), std::move(ys), f.left_tail_slope() + g.left_tail_slope(),
                    f.right_tail_slope() + g.right_tail_slope());
}

PLFunction subtract(const PLFunction& f, const PLFunction& g) { return add(f, g.scaled(-1.0)); }

double sup_distance(const PLFunction& f, const PLFunction& g) {
  const PLFunction d = subtract(f, g);
  if (std::abs(d.left_tail_slope()) > 1e-12 || std::abs(d.right_tail_slope()) > 1e-12) return kInf;
  double m = 0.0;
  for (double y : d.values()) m = std::max(m, std::abs(y));
  return m;
}

double sup_distance(const PLFunction& f, const PLFunction& g, double a, double b) {
  double m = std::max(std::abs(f(a) - g(a)), std::abs(f(b) - g(b)));
  for (const PLFunction* h : {&f, &g})
    for (double x : h->breakpoints())
      if (x > a && x < b) m = std::max(m, std::abs(f(x) - g(x)));
  return m;
}

bool approx_equal(const PLFunction& f_in, const PLFunction& g_in, double tol) {
  const PLFunction f = f_in.normalized(), g = g_in.normalized();
  if (f.size() != g.size()) return false;
  if (std::abs(f.left_tail_slope() - g.left_tail_slope()) > tol) return false;
  if (std::abs(f.right_tail_slope() - g.right_tail_slope()) > tol) return false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f.breakpoints()[i] - g.breakpoints()[i]) > tol) return false;
    if (std::abs(f.values()[i] - g.values()[i]) > tol) return false;
  }
  return true;
}

double max_abs(const PLFunction& f, double a, double b) {
  double m = std::max(std::abs(f(a)), std::abs(f(b)));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.breakpoints()[i];
    if (x > a && x < b) m = std::max(m, std::abs(f.values()[i]));
  }
  return m;
}

SlopeInterval slope_range_on(const PLFunction& f, double a, double b) {
  SlopeInterval r{kInf, -kInf};
  const std::size_t i0 = f.slope_index(a), i1 = f.slope_index(b);
  for (std::size_t i = i0; i <= i1; ++i) {
    r.lo = std::min(r.lo, f.slope(i));
    r.hi = std::max(r.hi, f.slope(i));
  }
  return r;
}

nlohmann::json to_json(const PLFunction& f) {
  return {{"breakpoints", std::vector<double>(f.breakpoints().begin(), f.breakpoints().end())},
          {"values", std::vector<double>(f.values().begin(), f.values().end())},
          {"tails", {f.left_tail_slope(), f.right_tail_slope()}}};
}

nlohmann::json to_json(const ExtendedPL& g) {
  nlohmann::json j = to_json(g.core());
  j["domain"] = {g.lo(), g.hi()};
  return j;
}

PLFunction pl_from_json(const nlohmann::json& j) {
  const auto xs = j.at("breakpoints").get<std::vector<double>>();
  const auto ys = j.at("values").get<std::vector<double>>();
  const auto tails = j.at("tails").get<std::vector<double>>();
  if (tails.size() != 2) throw std::invalid_argument("tails must have two entries");
  return PLFunction(xs, ys, tails[0], tails[1]);
}

ExtendedPL extended_from_json(const nlohmann::json& j) {
  const auto dom = j.at("domain").get<std::vector<double>>();
  if (dom.size() != 2) throw std::invalid_argument("domain must have two entries");
  return ExtendedPL(pl_from_json(j), dom[0], dom[1]);
}

}  // namespace hj
