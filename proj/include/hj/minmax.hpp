#pragma once

#include <cstddef>
#include <vector>

#include "hj/plfun.hpp"

namespace hj {

/// Rectangle of fiber variables (x0, y0) with a vertex grid resolution.
struct FiberBox {
  double x0_lo = 0.0;
  double x0_hi = 0.0;
  double y0_lo = 0.0;
  double y0_hi = 0.0;
  int n_x0 = 512;
  int n_y0 = 512;
};

/// Default box: y0 in [-Lip(v) - margin, Lip(v) + margin], x0 in
/// x +- (t M + margin) with M = max |H'| on the y0 range.
[[nodiscard]] FiberBox fiber_box(const PLFunction& v, const PLFunction& H, double t, double x,
                                 int n_x0 = 512, int n_y0 = 512, double margin = 1.0);

struct PassResult {
  double minmax_value = 0.0;
  double maxmin_value = 0.0;
  int saddle_i = 0;  // x0 index of the vertex closing the ascending pass
  int saddle_j = 0;  // y0 index
  double saddle_x0 = 0.0;
  double saddle_y0 = 0.0;
  FiberBox box;            // box actually used
  double h = 0.0;          // max grid step
  double lipschitz = 0.0;  // Lipschitz bound of S on the box
  double tol = 0.0;        // h * lipschitz
  int enlargements = 0;
};

/// Mountain pass of S_t(x, ., .) on a vertex grid. The ascending filtration
/// (8-neighbour) joins (x0 max, y0 max) with (x0 min, y0 min); the descending
/// one (4-neighbour) joins (x0 max, y0 min) with (x0 min, y0 max). The box is
/// doubled up to three times when a seed is not strictly deeper than the pass
/// or the pass sits on the box boundary.
[[nodiscard]] PassResult minmax_grid(const PLFunction& v, const PLFunction& H, double t, double x,
                                     const FiberBox& box);
[[nodiscard]] PassResult minmax_grid(const PLFunction& v, const PLFunction& H, double t, double x,
                                     int resolution = 512);

struct ExactOptions {
  double slope_margin = 0.1;
  double x_margin = 0.1;
  int max_enlargements = 3;
  bool maxmin = true;          // also run the descending pass
  std::vector<double> hints;   // guesses of the pass level; they only affect speed
};

/// Mountain pass computed exactly: S is bilinear on each cell of the mesh
/// spanned by the breakpoints of v and of H, so connectivity of its sublevel
/// sets is decided by mesh edges and the cell saddles.
struct ExactPass {
  double minmax_value = 0.0;
  double maxmin_value = 0.0;  // NaN when the descending pass is skipped
  double x0 = 0.0;  // location of the pass
  double y0 = 0.0;
  bool saddle = false;  // pass at a cell saddle rather than a mesh vertex
  /// Local germ: near x, the value is slope * x' + intercept.
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t mesh_x0 = 0;
  std::size_t mesh_y0 = 0;
  int enlargements = 0;
};

[[nodiscard]] ExactPass minmax_exact(const PLFunction& v, const PLFunction& H, double t, double x,
                                     const ExactOptions& options = {});

/// min over x0 of v(x0) + t H*((x - x0) / t), exact. Requires convex H, t > 0.
[[nodiscard]] double hopf_lax(const PLFunction& v, const PLFunction& H, double t, double x);

/// (v* + tH)*(x) = max over y0 of x y0 - v*(y0) - t H(y0), exact. Requires
/// convex v.
[[nodiscard]] double hopf_conj(const PLFunction& v, const PLFunction& H, double t, double x);

/// Critical values of S_t(x, ., .) (Clarke sense) with fiber point inside
/// [x0_lo, x0_hi] x [y0_lo, y0_hi], sorted.
[[nodiscard]] std::vector<double> critical_values(const PLFunction& v, const PLFunction& H,
                                                  double t, double x, double x0_lo, double x0_hi,
                                                  double y0_lo, double y0_hi);

enum class StepEngine { exact, grid };

struct StepPlan {
  StepEngine engine = StepEngine::exact;
  ExactOptions exact;
  int samples = 256;     // grid engine: uniform x samples
  int resolution = 128;  // grid engine: fiber grid per axis
  double margin = 1.0;   // window beyond the outermost kinks, added to tau M
  int max_rounds = 60;   // exact engine refinement rounds
};

struct StepStats {
  std::size_t evaluations = 0;
  std::size_t unsnapped = 0;  // grid engine: secant slopes kept raw
  double h = 0.0;             // grid engine: largest fiber grid step
};

/// One-step minmax operator R^tau applied to v, returned as a normalized PL
/// profile.
[[nodiscard]] PLFunction minmax_step(const PLFunction& v, const PLFunction& H, double tau,
                                     const StepPlan& plan = {}, StepStats* stats = nullptr);

/// max |H'| over the slope range of v widened by `widen`.
[[nodiscard]] double max_speed(const PLFunction& v, const PLFunction& H, double widen = 0.0);

}  // namespace hj
