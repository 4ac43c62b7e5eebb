#include "hj/fronttrack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "hj/errors.hpp"

namespace hj {

namespace {

constexpr double kEventTol = 1e-10;

double scaled(double tol, double x) { return tol * std::max(1.0, std::abs(x)); }

int add_piece(FrontTrace& tr, double slope, double constant, double t) {
  tr.pieces.push_back({slope, constant, t, kInf});
  return static_cast<int>(tr.pieces.size()) - 1;
}

int add_shock(FrontTrace& tr, double t, double x, double speed, int left, int right) {
  ShockTrack s;
  s.birth_t = t;
  s.birth_x = x;
  s.speed = speed;
  s.left_piece = left;
  s.right_piece = right;
  s.left_slope = tr.pieces[static_cast<std::size_t>(left)].slope;
  s.right_slope = tr.pieces[static_cast<std::size_t>(right)].slope;
  tr.shocks.push_back(s);
  return static_cast<int>(tr.shocks.size()) - 1;
}

// Appends the fan of (left piece, right piece) at apex (t, x) with value u to
// the snapshot being built. The left piece is already in `snap`.
void spawn_fan(FrontTrace& tr, Snapshot& snap, int left, int right, double t, double x, double u,
               RiemannFan* fan_out, std::vector<int>* spawned) {
  const PLFunction& H = tr.hamiltonian();
  const double a = tr.pieces[static_cast<std::size_t>(left)].slope;
  const double c = tr.pieces[static_cast<std::size_t>(right)].slope;
  RiemannFan fan = solve_fan(a, c, H, t, x);
  int prev = left;
  for (std::size_t i = 1; i + 1 < fan.slopes.size(); ++i) {
    const double p = fan.slopes[i];
    const int id = add_piece(tr, p, u - p * x + H(p) * t, t);
    const int sid = add_shock(tr, t, x, fan.speeds[i - 1], prev, id);
    snap.shocks.push_back(sid);
    snap.pieces.push_back(id);
    if (spawned) spawned->push_back(sid);
    prev = id;
  }
  if (fan.kind != FanKind::trivial) {
    const int sid = add_shock(tr, t, x, fan.speeds.back(), prev, right);
    snap.shocks.push_back(sid);
    if (spawned) spawned->push_back(sid);
  }
  snap.pieces.push_back(right);
  if (fan_out) *fan_out = std::move(fan);
}

}  // namespace

double FrontTrace::piece_value(int piece, double t, double x) const {
  const Piece& p = pieces[static_cast<std::size_t>(piece)];
  return p.slope * x - H_(p.slope) * t + p.constant;
}

const Snapshot& FrontTrace::snapshot_at(double t) const {
  if (t < 0.0 || t > horizon * (1.0 + 1e-12) + 1e-12)
    throw std::out_of_range("FrontTrace: time outside [0, horizon]");
  auto it = std::upper_bound(snapshots.begin(), snapshots.end(), t,
                             [](double tv, const Snapshot& s) { return tv < s.t; });
  if (it == snapshots.begin()) return snapshots.front();
  return *std::prev(it);
}

double FrontTrace::eval(double t, double x) const {
  const Snapshot& s = snapshot_at(t);
  auto it = std::partition_point(s.shocks.begin(), s.shocks.end(), [&](int id) {
    return shocks[static_cast<std::size_t>(id)].position(t) <= x;
  });
  const auto k = static_cast<std::size_t>(it - s.shocks.begin());
  return piece_value(s.pieces[k], t, x);
}

SlopeInterval FrontTrace::slope(double t, double x) const {
  const Snapshot& s = snapshot_at(t);
  SlopeInterval r{kInf, -kInf};
  for (std::size_t i = 0; i < s.shocks.size(); ++i) {
    const ShockTrack& sh = shocks[static_cast<std::size_t>(s.shocks[i])];
    if (std::abs(sh.position(t) - x) <= scaled(1e-9, x)) {
      for (int pid : {s.pieces[i], s.pieces[i + 1]}) {
        const double p = pieces[static_cast<std::size_t>(pid)].slope;
        r.lo = std::min(r.lo, p);
        r.hi = std::max(r.hi, p);
      }
    }
  }
  if (r.lo <= r.hi) return r;
  auto it = std::partition_point(s.shocks.begin(), s.shocks.end(), [&](int id) {
    return shocks[static_cast<std::size_t>(id)].position(t) <= x;
  });
  const double p =
      pieces[static_cast<std::size_t>(s.pieces[static_cast<std::size_t>(it - s.shocks.begin())])]
          .slope;
  return {p, p};
}

PLFunction FrontTrace::profile(double t) const {
  const Snapshot& s = snapshot_at(t);
  const Piece& first = pieces[static_cast<std::size_t>(s.pieces.front())];
  const Piece& last = pieces[static_cast<std::size_t>(s.pieces.back())];
  if (s.shocks.empty()) {
    return PLFunction::affine(first.slope, first.constant - H_(first.slope) * t);
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < s.shocks.size(); ++i) {
    const double x = shocks[static_cast<std::size_t>(s.shocks[i])].position(t);
    if (!xs.empty() && x <= xs.back() + scaled(kMergeTol, x)) continue;
    xs.push_back(x);
    ys.push_back(piece_value(s.pieces[i], t, x));
  }
  return PLFunction(std::move(xs), std::move(ys), first.slope, last.slope).normalized();
}

std::size_t FrontTrace::max_alive_shocks() const {
  std::size_t m = 0;
  for (const auto& s : snapshots) m = std::max(m, s.shocks.size());
  return m;
}

std::vector<double> FrontTrace::collision_times() const {
  std::vector<double> ts;
  for (const auto& e : events)
    if (ts.empty() || e.t > ts.back() + scaled(kEventTol, e.t)) ts.push_back(e.t);
  return ts;
}

FrontTrace init(const PLFunction& v_in, const PLFunction& H) {
  const PLFunction v = v_in.normalized();
  FrontTrace tr(v, H);
  Snapshot snap;
  snap.t = 0.0;
  const std::size_t n = v.size();
  const bool affine = n == 1 && v.left_tail_slope() == v.right_tail_slope();
  const auto xs = v.breakpoints();
  const auto ys = v.values();
  auto piece_for = [&](std::size_t i) {
    const double p = v.slope(i);
    const std::size_t j = std::min(i, n - 1);
    return add_piece(tr, p, ys[j] - p * xs[j], 0.0);
  };
  int left = piece_for(0);
  snap.pieces.push_back(left);
  if (!affine) {
    for (std::size_t k = 0; k < n; ++k) {
      const int right = piece_for(k + 1);
      spawn_fan(tr, snap, left, right, 0.0, xs[k], ys[k], nullptr, nullptr);
      left = right;
    }
  }
  tr.snapshots.push_back(std::move(snap));
  return tr;
}

std::optional<PendingEvent> next_event(const FrontTrace& tr, double t_now) {
  const Snapshot& snap = tr.current();
  const auto& ids = snap.shocks;
  if (ids.size() < 2) return std::nullopt;
  auto sh = [&](std::size_t i) -> const ShockTrack& {
    return tr.shocks[static_cast<std::size_t>(ids[i])];
  };

  bool found = false;
  std::tuple<double, double, std::size_t> best{kInf, kInf, 0};
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    const ShockTrack& a = sh(i);
    const ShockTrack& b = sh(i + 1);
    const double ds = a.speed - b.speed;
    if (ds <= 1e-14 * std::max({1.0, std::abs(a.speed), std::abs(b.speed)})) continue;
    const double gap = std::max(0.0, b.position(t_now) - a.position(t_now));
    const double tc = t_now + gap / ds;
    const double xc = 0.5 * (a.position(tc) + b.position(tc));
    const auto key = std::make_tuple(tc, xc, i);
    if (!found || key < best) {
      best = key;
      found = true;
    }
  }
  if (!found) return std::nullopt;

  const auto [tc, xc, i0] = best;
  const double tol = scaled(kEventTol, xc);
  std::size_t lo = i0, hi = i0 + 1;
  while (lo > 0 && std::abs(sh(lo - 1).position(tc) - xc) <= tol) --lo;
  while (hi + 1 < ids.size() && std::abs(sh(hi + 1).position(tc) - xc) <= tol) ++hi;

  PendingEvent ev;
  ev.t = tc;
  ev.x = xc;
  for (std::size_t i = lo; i <= hi; ++i) ev.shock_ids.push_back(ids[i]);
  return ev;
}

void resolve_collision(FrontTrace& tr, const PendingEvent& ev) {
  const Snapshot old = tr.current();
  if (ev.shock_ids.size() < 2) throw std::logic_error("resolve_collision: event needs two shocks");
  auto it = std::find(old.shocks.begin(), old.shocks.end(), ev.shock_ids.front());
  if (it == old.shocks.end()) throw std::logic_error("resolve_collision: stale event");
  const auto k = static_cast<std::size_t>(it - old.shocks.begin());
  const std::size_t r = ev.shock_ids.size();
  if (k + r > old.shocks.size()) throw std::logic_error("resolve_collision: stale event");
  for (std::size_t j = 0; j < r; ++j)
    if (old.shocks[k + j] != ev.shock_ids[j])
      throw std::logic_error("resolve_collision: stale event");

  const double t = ev.t, x = ev.x;
  for (int sid : ev.shock_ids) {
    auto& s = tr.shocks[static_cast<std::size_t>(sid)];
    s.death_t = t;
    s.death_x = x;
  }
  for (std::size_t j = k + 1; j < k + r; ++j)
    tr.pieces[static_cast<std::size_t>(old.pieces[j])].death_time = t;

  const int left = old.pieces[k];
  const int right = old.pieces[k + r];
  const double u = tr.piece_value(left, t, x);

  Snapshot snap;
  snap.t = t;
  snap.pieces.assign(old.pieces.begin(), old.pieces.begin() + static_cast<long>(k) + 1);
  snap.shocks.assign(old.shocks.begin(), old.shocks.begin() + static_cast<long>(k));

  CollisionRecord rec;
  rec.t = t;
  rec.x = x;
  rec.merged_shocks = ev.shock_ids;

  const double a = tr.pieces[static_cast<std::size_t>(left)].slope;
  const double c = tr.pieces[static_cast<std::size_t>(right)].slope;
  std::size_t tail_from = k + r;  // index in old.shocks of first surviving shock to the right
  if (std::abs(a - c) <= scaled(kMergeTol, a)) {
    // outer states agree: the right piece is absorbed by the left one
    tr.pieces[static_cast<std::size_t>(right)].death_time = t;
    rec.fan = solve_fan(a, c, tr.hamiltonian(), t, x);
    if (tail_from < old.shocks.size()) {
      auto& s = tr.shocks[static_cast<std::size_t>(old.shocks[tail_from])];
      s.left_piece = left;
    }
    for (std::size_t j = k + r + 1; j < old.pieces.size(); ++j) snap.pieces.push_back(old.pieces[j]);
  } else {
    spawn_fan(tr, snap, left, right, t, x, u, &rec.fan, &rec.spawned_shocks);
    for (std::size_t j = k + r + 1; j < old.pieces.size(); ++j) snap.pieces.push_back(old.pieces[j]);
  }
  for (std::size_t j = tail_from; j < old.shocks.size(); ++j) snap.shocks.push_back(old.shocks[j]);

  tr.events.push_back(std::move(rec));
  tr.snapshots.push_back(std::move(snap));
}

std::size_t collision_budget(const PLFunction& v, const PLFunction& H) {
  return 10 * (v.kinks().size() * H.size() + 100);
}

void advance(FrontTrace& tr, double T, std::size_t budget) {
  double t_now = tr.current().t;
  while (true) {
    auto ev = next_event(tr, t_now);
    if (!ev || ev->t > T) break;
    if (tr.events.size() >= budget) throw NumericalError("collision budget exceeded");
    resolve_collision(tr, *ev);
    t_now = ev->t;
  }
  tr.horizon = std::max(tr.horizon, T);
}

FrontTrace evolve(const PLFunction& v, const PLFunction& H, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("evolve: horizon must be positive");
  FrontTrace tr = init(v, H);
  advance(tr, T, collision_budget(v, H));
  return tr;
}

TraceAudit audit(const FrontTrace& tr) {
  TraceAudit a;
  a.events = tr.events.size();
  a.max_alive = tr.max_alive_shocks();
  const PLFunction& H = tr.hamiltonian();
  std::vector<double> alphabet = tr.initial().slopes();
  alphabet.insert(alphabet.end(), H.breakpoints().begin(), H.breakpoints().end());
  auto in_alphabet = [&](double p) {
    for (double q : alphabet)
      if (std::abs(p - q) <= scaled(1e-12, q)) return true;
    return false;
  };
  for (const Piece& p : tr.pieces)
    if (!in_alphabet(p.slope)) a.alphabet_ok = false;
  for (const ShockTrack& s : tr.shocks) {
    if (!entropy_ok(s.left_slope, s.right_slope, H)) a.entropy_ok = false;
    const double rh = rh_speed(H, s.left_slope, s.right_slope);
    if (std::abs(rh - s.speed) > scaled(1e-9, rh)) a.rh_ok = false;
  }
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    const Snapshot& s = tr.snapshots[k];
    const double t_end = k + 1 < tr.snapshots.size() ? tr.snapshots[k + 1].t : tr.horizon;
    for (std::size_t i = 0; i < s.shocks.size(); ++i) {
      const ShockTrack& sh = tr.shocks[static_cast<std::size_t>(s.shocks[i])];
      if (sh.left_piece != s.pieces[i] || sh.right_piece != s.pieces[i + 1]) a.adjacency_ok = false;
      if (i + 1 < s.shocks.size()) {
        const ShockTrack& nx = tr.shocks[static_cast<std::size_t>(s.shocks[i + 1])];
        // strictly ordered strictly inside the interval; may touch at its end
        const double tm = 0.5 * (s.t + t_end);
        if (t_end > s.t && !(sh.position(tm) < nx.position(tm) + scaled(1e-9, sh.position(tm))))
          a.ordered_ok = false;
      }
    }
  }
  return a;
}

nlohmann::json to_json(const FrontTrace& tr) {
  using nlohmann::json;
  auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json(nullptr); };
  json pieces = json::array();
  for (const auto& p : tr.pieces)
    pieces.push_back({{"slope", p.slope}, {"constant", p.constant}, {"birth", p.birth_time},
                      {"death", num(p.death_time)}});
  json shocks = json::array();
  for (const auto& s : tr.shocks)
    shocks.push_back({{"birth", {s.birth_t, s.birth_x}},
                      {"death", std::isfinite(s.death_t) ? json{s.death_t, s.death_x} : json(nullptr)},
                      {"speed", s.speed},
                      {"left_slope", s.left_slope},
                      {"right_slope", s.right_slope},
                      {"left_piece", s.left_piece},
                      {"right_piece", s.right_piece}});
  json events = json::array();
  for (const auto& e : tr.events)
    events.push_back({{"t", e.t}, {"x", e.x}, {"merged", e.merged_shocks},
                      {"spawned", e.spawned_shocks}, {"fan", to_json(e.fan)}});
  json snaps = json::array();
  for (const auto& s : tr.snapshots)
    snaps.push_back({{"t", s.t}, {"pieces", s.pieces}, {"shocks", s.shocks}});
  return {{"v", to_json(tr.initial())}, {"H", to_json(tr.hamiltonian())},
          {"horizon", tr.horizon},      {"pieces", pieces},
          {"shocks", shocks},           {"events", events},
          {"snapshots", snaps}};
}

FrontTrace trace_from_json(const nlohmann::json& j) {
  FrontTrace tr(pl_from_json(j.at("v")), pl_from_json(j.at("H")));
  tr.horizon = j.at("horizon").get<double>();
  auto num = [](const nlohmann::json& x) { return x.is_null() ? kInf : x.get<double>(); };
  for (const auto& p : j.at("pieces"))
    tr.pieces.push_back({p.at("slope").get<double>(), p.at("constant").get<double>(),
                         p.at("birth").get<double>(), num(p.at("death"))});
  for (const auto& s : j.at("shocks")) {
    ShockTrack st;
    st.birth_t = s.at("birth")[0].get<double>();
    st.birth_x = s.at("birth")[1].get<double>();
    if (!s.at("death").is_null()) {
      st.death_t = s.at("death")[0].get<double>();
      st.death_x = s.at("death")[1].get<double>();
    }
    st.speed = s.at("speed").get<double>();
    st.left_slope = s.at("left_slope").get<double>();
    st.right_slope = s.at("right_slope").get<double>();
    st.left_piece = s.at("left_piece").get<int>();
    st.right_piece = s.at("right_piece").get<int>();
    tr.shocks.push_back(st);
  }
  for (const auto& e : j.at("events")) {
    CollisionRecord rec;
    rec.t = e.at("t").get<double>();
    rec.x = e.at("x").get<double>();
    rec.merged_shocks = e.at("merged").get<std::vector<int>>();
    rec.spawned_shocks = e.at("spawned").get<std::vector<int>>();
    const auto& f = e.at("fan");
    rec.fan.t0 = f.at("apex")[0].get<double>();
    rec.fan.x0 = f.at("apex")[1].get<double>();
    rec.fan.slopes = f.at("slopes").get<std::vector<double>>();
    rec.fan.speeds = f.at("speeds").get<std::vector<double>>();
    const auto kind = f.at("kind").get<std::string>();
    rec.fan.kind = kind == "convex" ? FanKind::convex
                   : kind == "concave" ? FanKind::concave
                                       : FanKind::trivial;
    tr.events.push_back(std::move(rec));
  }
  for (const auto& s : j.at("snapshots"))
    tr.snapshots.push_back({s.at("t").get<double>(), s.at("pieces").get<std::vector<int>>(),
                            s.at("shocks").get<std::vector<int>>()});
  return tr;
}

}  // namespace hj
