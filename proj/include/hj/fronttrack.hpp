#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "hj/plfun.hpp"
#include "hj/riemann.hpp"

namespace hj {

/// Affine patch u(t, x) = slope * x - H(slope) * t + constant.
struct Piece {
  double slope = 0.0;
  double constant = 0.0;
  double birth_time = 0.0;
  double death_time = kInf;
};

/// Straight shock line x(t) = birth_x + speed * (t - birth_t).
struct ShockTrack {
  double birth_t = 0.0;
  double birth_x = 0.0;
  double death_t = kInf;
  double death_x = 0.0;
  double speed = 0.0;
  double left_slope = 0.0;
  double right_slope = 0.0;
  int left_piece = -1;
  int right_piece = -1;

  [[nodiscard]] double position(double t) const { return birth_x + speed * (t - birth_t); }
  [[nodiscard]] bool alive_at(double t) const { return t >= birth_t && t < death_t; }
};

struct CollisionRecord {
  double t = 0.0;
  double x = 0.0;
  std::vector<int> merged_shocks;
  std::vector<int> spawned_shocks;
  RiemannFan fan;
};

/// Ordered alive pieces and shocks, valid from time t until the next event.
struct Snapshot {
  double t = 0.0;
  std::vector<int> pieces;
  std::vector<int> shocks;  // shocks[i] separates pieces[i] and pieces[i + 1]
};

struct PendingEvent {
  double t = 0.0;
  double x = 0.0;
  std::vector<int> shock_ids;  // consecutive alive shocks meeting at (t, x)
};

/// Complete space-time record of a front-tracking run.
class FrontTrace {
public:
  FrontTrace(PLFunction v, PLFunction H) : v_(std::move(v)), H_(std::move(H)) {}

  std::vector<Piece> pieces;
  std::vector<ShockTrack> shocks;
  std::vector<CollisionRecord> events;
  std::vector<Snapshot> snapshots;
  double horizon = 0.0;

  [[nodiscard]] const PLFunction& initial() const { return v_; }
  [[nodiscard]] const PLFunction& hamiltonian() const { return H_; }
  [[nodiscard]] const Snapshot& current() const { return snapshots.back(); }

  [[nodiscard]] double eval(double t, double x) const;
  [[nodiscard]] SlopeInterval slope(double t, double x) const;
  /// Normalized PL profile u(t, .).
  [[nodiscard]] PLFunction profile(double t) const;
  [[nodiscard]] double piece_value(int piece, double t, double x) const;
  /// Largest number of simultaneously alive shocks observed.
  [[nodiscard]] std::size_t max_alive_shocks() const;
  /// Collision times in increasing order (grouped events count once).
  [[nodiscard]] std::vector<double> collision_times() const;
  [[nodiscard]] const Snapshot& snapshot_at(double t) const;

private:
  PLFunction v_;
  PLFunction H_;
};

/// State at t = 0+: one fan per kink of v.
[[nodiscard]] FrontTrace init(const PLFunction& v, const PLFunction& H);

/// Earliest collision of adjacent alive shocks at or after t_now, grouping all
/// shocks that meet at the same point within 1e-10.
[[nodiscard]] std::optional<PendingEvent> next_event(const FrontTrace& trace, double t_now);

/// Kills the colliding shocks and the pieces between them, spawns the fan of
/// the outer slopes at the apex. Throws std::logic_error on a stale event.
void resolve_collision(FrontTrace& trace, const PendingEvent& event);

/// Runs the event loop from the current state up to time T.
void advance(FrontTrace& trace, double T, std::size_t budget);

/// 10 * (initial kinks * H breakpoints + 100).
[[nodiscard]] std::size_t collision_budget(const PLFunction& v, const PLFunction& H);

/// init + event loop to T. Throws NumericalError("collision budget exceeded").
[[nodiscard]] FrontTrace evolve(const PLFunction& v, const PLFunction& H, double T);

/// Structural checks of a completed trace.
struct TraceAudit {
  bool alphabet_ok = true;
  bool entropy_ok = true;
  bool ordered_ok = true;
  bool adjacency_ok = true;
  bool rh_ok = true;
  std::size_t events = 0;
  std::size_t max_alive = 0;
  [[nodiscard]] bool ok() const {
    return alphabet_ok && entropy_ok && ordered_ok && adjacency_ok && rh_ok;
  }
};
[[nodiscard]] TraceAudit audit(const FrontTrace& trace);

[[nodiscard]] nlohmann::json to_json(const FrontTrace& trace);
[[nodiscard]] FrontTrace trace_from_json(const nlohmann::json& j);

}  // namespace hj
