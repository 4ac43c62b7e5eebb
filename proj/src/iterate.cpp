#include "hj/iterate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "hj/fronttrack.hpp"
#include "hj/riemann.hpp"

namespace hj {

Subdivision Subdivision::uniform(double T, std::size_t n) {
  if (!(T > 0.0) || n == 0) throw std::invalid_argument("uniform subdivision needs T > 0, n >= 1");
  Subdivision z;
  for (std::size_t i = 0; i <= n; ++i)
    z.times.push_back(i == n ? T : T * static_cast<double>(i) / static_cast<double>(n));
  return z;
}

void Subdivision::validate() const {
  if (times.size() < 2) throw std::invalid_argument("subdivision needs at least two times");
  if (times.front() != 0.0) throw std::invalid_argument("subdivision must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("subdivision times must increase strictly");
}

double Subdivision::mesh() const {
  double m = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) m = std::max(m, times[i] - times[i - 1]);
  return m;
}

std::size_t Subdivision::index(double s) const {
  if (s < times.front() || s >= times.back()) throw std::out_of_range("time outside [0, T)");
  return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), s) - times.begin()) -
         1;
}

Subdivision Subdivision::refined(const std::vector<double>& extra) const {
  std::vector<double> all = times;
  const double T = times.back();
  for (double s : extra)
    if (s > 0.0 && s < T) all.push_back(s);
  std::sort(all.begin(), all.end());
  Subdivision z;
  for (double s : all)
    if (z.times.empty() || s - z.times.back() > 1e-12 * std::max(1.0, s)) z.times.push_back(s);
  if (z.times.back() != T) z.times.back() = T;
  return z;
}

IterationTrace iterated_minmax(const PLFunction& v, const PLFunction& H, const Subdivision& zeta,
                               const IterOptions& options) {
  zeta.validate();
  IterationTrace trace;
  trace.zeta = zeta;
  trace.profiles.push_back(v.normalized());
  StepPlan plan = options.plan;
  plan.engine = options.engine == IterEngine::grid ? StepEngine::grid : StepEngine::exact;
  for (std::size_t k = 0; k + 1 < zeta.times.size(); ++k) {
    const double tau = zeta.times[k + 1] - zeta.times[k];
    const PLFunction& vk = trace.profiles.back();
    if (options.engine == IterEngine::exact_riemann) {
      FrontTrace ft = init(vk, H);
      const auto ev = next_event(ft, 0.0);
      if (!ev || ev->t >= tau * (1.0 - 1e-12)) {
        advance(ft, tau, collision_budget(vk, H));
        trace.profiles.push_back(ft.profile(tau));
        trace.exact_step.push_back(true);
        trace.evaluations.push_back(0);
        continue;
      }
    }
    StepStats stats;
    trace.profiles.push_back(minmax_step(vk, H, tau, plan, &stats));
    trace.exact_step.push_back(false);
    trace.evaluations.push_back(stats.evaluations);
  }
  return trace;
}

namespace {

void fill_errors(IterationTrace& trace, const FrontTrace& ref) {
  trace.errors.clear();
  for (std::size_t k = 0; k < trace.profiles.size(); ++k)
    trace.errors.push_back(sup_distance(trace.profiles[k], ref.profile(trace.zeta.times[k])));
}

}  // namespace

void attach_errors(IterationTrace& trace, const PLFunction& H) {
  const FrontTrace ref = evolve(trace.profiles.front(), H, trace.zeta.times.back());
  fill_errors(trace, ref);
}

ConvergenceTable convergence_study(const PLFunction& v, const PLFunction& H, double T,
                                   const std::vector<std::size_t>& ns,
                                   const IterOptions& options) {
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw std::invalid_argument("step counts must increase");
  const FrontTrace ref = evolve(v, H, T);
  ConvergenceTable table;
  table.collisions = ref.collision_times().size();
  const double L = v.lipschitz();
  table.h_max = max_abs(H, -L, L);
  for (std::size_t n : ns) {
    IterationTrace tr = iterated_minmax(v, H, Subdivision::uniform(T, n), options);
    fill_errors(tr, ref);
    ConvergenceRow row;
    row.n = n;
    row.mesh = tr.zeta.mesh();
    row.error = *std::max_element(tr.errors.begin(), tr.errors.end());
    row.bound = 2.0 * static_cast<double>(table.collisions) * table.h_max * row.mesh;
    table.rows.push_back(row);
  }
  return table;
}

std::vector<ShockPath> extract_shocks(const IterationTrace& trace, const PLFunction& H,
                                      const ShockOptions& options) {
  struct Kink {
    double x, pl, pr;
  };
  std::vector<std::vector<Kink>> kinks;
  for (const PLFunction& f : trace.profiles) {
    std::vector<Kink> ks;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double pl = f.slope(i), pr = f.slope(i + 1);
      if (std::abs(pr - pl) >= options.min_jump) ks.push_back({f.breakpoints()[i], pl, pr});
    }
    kinks.push_back(std::move(ks));
  }
  const double smax = max_speed(trace.profiles.front(), H);
  const auto& ts = trace.zeta.times;

  std::vector<ShockPath> paths;
  std::vector<std::size_t> active;
  for (const Kink& k : kinks.front()) {
    paths.push_back({});
    paths.back().points.push_back({ts[0], k.x, k.pl, k.pr});
    active.push_back(paths.size() - 1);
  }
  for (std::size_t s = 0; s + 1 < kinks.size(); ++s) {
    const double dt = ts[s + 1] - ts[s];
    const double window = smax * dt * (1.0 + 1e-9) + 1e-12;
    const auto& next = kinks[s + 1];
    // a kink keeping both of its slopes is matched before any nearer one
    std::vector<std::tuple<int, double, std::size_t, std::size_t>> cand;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const ShockPoint& last = paths[active[a]].points.back();
      for (std::size_t b = 0; b < next.size(); ++b) {
        const double d = std::abs(next[b].x - last.x);
        const bool same = std::abs(next[b].pl - last.left_slope) <= 1e-9 &&
                          std::abs(next[b].pr - last.right_slope) <= 1e-9;
        if (d <= window) cand.emplace_back(same ? 0 : 1, d, a, b);
      }
    }
    std::sort(cand.begin(), cand.end());
    std::vector<char> used_a(active.size(), 0), used_b(next.size(), 0);
    std::vector<std::size_t> still;
    for (const auto& [rank, d, a, b] : cand) {
      if (used_a[a] || used_b[b]) continue;
      used_a[a] = used_b[b] = 1;
      ShockPath& p = paths[active[a]];
      const ShockPoint start = p.points.back();
      const double speed = (next[b].x - start.x) / dt;
      const double r0 = rh_speed(H, start.left_slope, start.right_slope);
      const double r1 = rh_speed(H, next[b].pl, next[b].pr);
      p.speeds.push_back(speed);
      p.rh_residuals.push_back(SlopeInterval{std::min(r0, r1), std::max(r0, r1)}.distance(speed));
      p.points.push_back({ts[s + 1], next[b].x, next[b].pl, next[b].pr});
    }
    for (std::size_t a = 0; a < active.size(); ++a) {
      if (used_a[a])
        still.push_back(active[a]);
      else
        paths[active[a]].died = true;
    }
    for (std::size_t b = 0; b < next.size(); ++b) {
      if (used_b[b]) continue;
      paths.push_back({});
      paths.back().points.push_back({ts[s + 1], next[b].x, next[b].pl, next[b].pr});
      paths.back().born_late = true;
      still.push_back(paths.size() - 1);
    }
    std::sort(still.begin(), still.end());
    active = std::move(still);
  }
  return paths;
}

namespace {

double median(std::vector<double> xs) {
  if (xs.empty()) return kInf;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

}  // namespace

std::vector<ContactVerdict> contact_shock_check(const std::vector<ShockPath>& paths,
                                                const PLFunction& H, double tol,
                                                std::size_t min_steps) {
  std::vector<ContactVerdict> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const ShockPath& p = paths[i];
    if (p.speeds.size() < min_steps) continue;
    std::vector<double> cm, cp, tm, tp;
    for (std::size_t s = 0; s < p.speeds.size(); ++s) {
      const ShockPoint& a = p.points[s];
      const ShockPoint& b = p.points[s + 1];
      const double c = p.speeds[s];
      cm.push_back(H.clarke(a.left_slope).hull(H.clarke(b.left_slope)).distance(c));
      cp.push_back(H.clarke(a.right_slope).hull(H.clarke(b.right_slope)).distance(c));
      tm.push_back(H.clarke(b.left_slope).distance(c));
      tp.push_back(H.clarke(b.right_slope).distance(c));
    }
    ContactVerdict v;
    v.path = i;
    v.rh_residual = median(p.rh_residuals);
    const double mm = median(cm), mp = median(cp);
    v.contact_residual = std::min(mm, mp);
    v.rh_ok = v.rh_residual < tol;
    v.contact = v.rh_ok && v.contact_residual < tol;
    v.side = !v.contact ? ContactSide::none : (mm <= mp ? ContactSide::minus : ContactSide::plus);
    v.tangent_residual = v.side == ContactSide::plus ? median(tp) : median(tm);
    out.push_back(v);
  }
  return out;
}

nlohmann::json to_json(const IterationTrace& trace) {
  nlohmann::json profiles = nlohmann::json::array();
  for (const auto& f : trace.profiles) profiles.push_back(to_json(f));
  std::vector<int> exact(trace.exact_step.begin(), trace.exact_step.end());
  return {{"times", trace.zeta.times},
          {"profiles", profiles},
          {"front_tracking_step", exact},
          {"evaluations", trace.evaluations},
          {"errors", trace.errors}};
}

nlohmann::json to_json(const std::vector<ShockPath>& paths) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : paths) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& q : p.points) pts.push_back({q.t, q.x, q.left_slope, q.right_slope});
    out.push_back({{"points", pts},
                   {"speeds", p.speeds},
                   {"rh_residuals", p.rh_residuals},
                   {"born_late", p.born_late},
                   {"died", p.died}});
  }
  return out;
}

nlohmann::json to_json(const ConvergenceTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"n", r.n}, {"mesh", r.mesh}, {"error", r.error}, {"bound", r.bound}});
  return {{"collisions", table.collisions}, {"h_max", table.h_max}, {"rows", rows}};
}

}  // namespace hj
