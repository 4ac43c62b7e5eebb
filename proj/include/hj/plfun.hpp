#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hj {

/// Breakpoints closer than this are merged; slopes closer than this are
/// treated as collinear.
inline constexpr double kMergeTol = 1e-12;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi] of slopes (a Clarke generalized derivative in 1D).
struct SlopeInterval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double y, double tol = 0.0) const {
    return y >= lo - tol && y <= hi + tol;
  }
  [[nodiscard]] double distance(double y) const {
    if (y < lo) return lo - y;
    if (y > hi) return y - hi;
    return 0.0;
  }
  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] SlopeInterval hull(const SlopeInterval& o) const {
    return {std::min(lo, o.lo), std::max(hi, o.hi)};
  }
};

enum class EnvelopeKind { convex, concave };

/// Continuous piecewise-linear function on the real line with affine tails.
///
/// Stored as strictly increasing breakpoints with values; between consecutive
/// breakpoints the function interpolates linearly and beyond the outermost
/// breakpoints it continues with the given tail slopes. An affine function is
/// represented by a single anchor point.
class PLFunction {
public:
  PLFunction(std::vector<double> breakpoints, std::vector<double> values,
             double left_tail_slope, double right_tail_slope);

  /// Affine function slope * x + intercept, anchored at x = 0.
  static PLFunction affine(double slope, double intercept);

  /// Interpolates the given points; tails continue the end slopes (or are
  /// flat if a single point is given).
  static PLFunction through(std::span<const std::pair<double, double>> points);
  static PLFunction through(std::initializer_list<std::pair<double, double>> points);

  [[nodiscard]] double operator()(double x) const;

  [[nodiscard]] std::span<const double> breakpoints() const { return xs_; }
  [[nodiscard]] std::span<const double> values() const { return ys_; }
  [[nodiscard]] std::size_t size() const { return xs_.size(); }
  [[nodiscard]] double left_tail_slope() const { return left_; }
  [[nodiscard]] double right_tail_slope() const { return right_; }

  /// Slope number i, 0 <= i <= size(): 0 is the left tail, size() the right
  /// tail, otherwise the slope on [x_{i-1}, x_i].
  [[nodiscard]] double slope(std::size_t i) const;
  [[nodiscard]] std::vector<double> slopes() const;
  /// Index of the slope active at x (right-continuous).
  [[nodiscard]] std::size_t slope_index(double x) const;

  [[nodiscard]] SlopeInterval clarke(double x) const;
  /// Lipschitz constant: max |slope|.
  [[nodiscard]] double lipschitz() const;
  /// Smallest and largest slope.
  [[nodiscard]] SlopeInterval slope_range() const;

  [[nodiscard]] bool is_convex(double tol = kMergeTol) const;
  [[nodiscard]] bool is_concave(double tol = kMergeTol) const;

  /// Merges near-duplicate breakpoints and removes collinear ones.
  [[nodiscard]] PLFunction normalized(double tol = kMergeTol) const;

  /// Breakpoints x where the slope actually changes (after normalization).
  [[nodiscard]] std::vector<double> kinks() const;

  [[nodiscard]] PLFunction shifted(double dy) const;
  [[nodiscard]] PLFunction scaled(double factor) const;

private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  double left_;
  double right_;
};

/// Convex PL function finite exactly on [lo, hi], +infinity outside.
/// lo == hi is allowed (finite at a single point).
class ExtendedPL {
public:
  ExtendedPL(PLFunction core, double lo, double hi);

  [[nodiscard]] double operator()(double y) const;
  [[nodiscard]] const PLFunction& core() const { return core_; }
  [[nodiscard]] double lo() const { return lo_; }
  [[nodiscard]] double hi() const { return hi_; }
  [[nodiscard]] bool in_domain(double y, double tol = 0.0) const {
    return y >= lo_ - tol && y <= hi_ + tol;
  }

private:
  PLFunction core_;
  double lo_;
  double hi_;
};

[[nodiscard]] inline double eval(const PLFunction& f, double x) { return f(x); }
[[nodiscard]] inline SlopeInterval clarke(const PLFunction& f, double x) { return f.clarke(x); }

/// Convex (resp. concave) envelope of f restricted to [a, b]: the lower
/// (resp. upper) hull of {(a, f(a))} U {interior breakpoints} U {(b, f(b))}.
/// Tails of the result continue its end slopes; a and b are always breakpoints.
[[nodiscard]] PLFunction envelope(const PLFunction& f, double a, double b, EnvelopeKind kind);

/// Legendre-Fenchel conjugate of a convex PL function. Throws if not convex.
[[nodiscard]] ExtendedPL conjugate(const PLFunction& f);
/// Conjugate of a convex function with bounded domain; the result is globally
/// Lipschitz with slope range [lo, hi].
[[nodiscard]] PLFunction conjugate(const ExtendedPL& g);

/// Interpolates target at k + 1 uniform nodes on [a, b]; tails continue the
/// end slopes.
[[nodiscard]] PLFunction pl_approx(const std::function<double(double)>& target, int k, double a,
                                   double b);
/// Same, with the target given as samples (interpolated linearly first).
[[nodiscard]] PLFunction pl_approx(std::span<const std::pair<double, double>> samples, int k,
                                   double a, double b);

/// Pointwise sum, exact (breakpoints are the union).
[[nodiscard]] PLFunction add(const PLFunction& f, const PLFunction& g);
/// f - g.
[[nodiscard]] PLFunction subtract(const PLFunction& f, const PLFunction& g);

/// sup_x |f(x) - g(x)| over the whole line (infinite if tail slopes differ).
[[nodiscard]] double sup_distance(const PLFunction& f, const PLFunction& g);
/// sup over [a, b].
[[nodiscard]] double sup_distance(const PLFunction& f, const PLFunction& g, double a, double b);

/// Structural equality after normalization, with absolute tolerance on
/// breakpoints, values and tail slopes.
[[nodiscard]] bool approx_equal(const PLFunction& f, const PLFunction& g, double tol = 1e-9);

/// max |f| over [a, b].
[[nodiscard]] double max_abs(const PLFunction& f, double a, double b);

/// Slopes of f on [a, b], sorted unique.
[[nodiscard]] SlopeInterval slope_range_on(const PLFunction& f, double a, double b);

[[nodiscard]] nlohmann::json to_json(const PLFunction& f);
[[nodiscard]] nlohmann::json to_json(const ExtendedPL& g);
[[nodiscard]] PLFunction pl_from_json(const nlohmann::json& j);
[[nodiscard]] ExtendedPL extended_from_json(const nlohmann::json& j);

}  // namespace hj
