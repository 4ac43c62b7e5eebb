#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "hj/minmax.hpp"
#include "hj/plfun.hpp"

namespace hj {

/// Time grid 0 = t_0 < t_1 < ... < t_n = T.
struct Subdivision {
  std::vector<double> times;

  static Subdivision uniform(double T, std::size_t n);
  /// Throws std::invalid_argument unless times start at 0 and increase strictly.
  void validate() const;
  [[nodiscard]] double mesh() const;
  [[nodiscard]] std::size_t steps() const { return times.size() - 1; }
  /// Index i with t_i <= s < t_{i+1}.
  [[nodiscard]] std::size_t index(double s) const;
  /// Union with extra times inside (0, T); near-duplicates are dropped.
  [[nodiscard]] Subdivision refined(const std::vector<double>& extra) const;
};

enum class IterEngine { exact_riemann, grid };

struct IterOptions {
  IterEngine engine = IterEngine::exact_riemann;
  StepPlan plan;  // used for steps that need a minmax computation
};

struct ShockPoint {
  double t = 0.0;
  double x = 0.0;
  double left_slope = 0.0;
  double right_slope = 0.0;
};

struct ShockPath {
  std::vector<ShockPoint> points;
  std::vector<double> speeds;        // per step
  std::vector<double> rh_residuals;  // distance of the speed to the chord slopes at the step ends
  bool born_late = false;            // first seen after t = 0
  bool died = false;                 // lost before the last step
};

struct IterationTrace {
  Subdivision zeta;
  std::vector<PLFunction> profiles;          // v_0 = v, ..., v_n
  std::vector<bool> exact_step;              // step k used front tracking
  std::vector<std::size_t> evaluations;      // minmax evaluations per step
  std::vector<double> errors;                // sup |v_k - reference(t_k)|, when computed
};

[[nodiscard]] IterationTrace iterated_minmax(const PLFunction& v, const PLFunction& H,
                                             const Subdivision& zeta,
                                             const IterOptions& options = {});

/// Fills trace.errors against front tracking of v on [0, T].
void attach_errors(IterationTrace& trace, const PLFunction& H);

struct ConvergenceRow {
  std::size_t n = 0;
  double mesh = 0.0;
  double error = 0.0;  // max over the nodes of the sup error
  double bound = 0.0;  // 2 k max|H| mesh
};

struct ConvergenceTable {
  std::size_t collisions = 0;  // k in the bound
  double h_max = 0.0;          // max |H| on |p| <= Lip(v)
  std::vector<ConvergenceRow> rows;
};

[[nodiscard]] ConvergenceTable convergence_study(const PLFunction& v, const PLFunction& H, double T,
                                                 const std::vector<std::size_t>& ns,
                                                 const IterOptions& options = {});

struct ShockOptions {
  double min_jump = 0.05;  // kinks with smaller slope jumps are ignored
};

/// Kinks with large jumps matched step to step by nearest neighbour within
/// max|H'| times the step length.
[[nodiscard]] std::vector<ShockPath> extract_shocks(const IterationTrace& trace,
                                                    const PLFunction& H,
                                                    const ShockOptions& options = {});

enum class ContactSide { none, minus, plus };

struct ContactVerdict {
  std::size_t path = 0;
  double rh_residual = 0.0;       // median over the steps
  double contact_residual = 0.0;  // median distance of the speed to dH swept by the closer state
  double tangent_residual = 0.0;  // same, against dH at the state at the step end only
  ContactSide side = ContactSide::none;
  bool rh_ok = false;
  bool contact = false;
};

/// Per path: RH holds if the median residual is below tol; the shock is a
/// contact shock if, in addition, its speed over each step is within tol of
/// the values of dH taken by one of its states during the step.
[[nodiscard]] std::vector<ContactVerdict> contact_shock_check(const std::vector<ShockPath>& paths,
                                                              const PLFunction& H, double tol,
                                                              std::size_t min_steps = 2);

[[nodiscard]] nlohmann::json to_json(const IterationTrace& trace);
[[nodiscard]] nlohmann::json to_json(const std::vector<ShockPath>& paths);
[[nodiscard]] nlohmann::json to_json(const ConvergenceTable& table);

}  // namespace hj
