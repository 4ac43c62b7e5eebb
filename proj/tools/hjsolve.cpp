// hjsolve: command-line front end for the 1D Hamilton-Jacobi solvers.
//
// Every subcommand writes <out>/dump.json and regenerates its CSV/SVG
// artifacts from that dump, so `hjsolve render <out>/dump.json` reproduces
// them byte for byte.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hj/emit.hpp"
#include "hj/errors.hpp"
#include "hj/fronttrack.hpp"
#include "hj/genfam.hpp"
#include "hj/iterate.hpp"
#include "hj/minmax.hpp"
#include "hj/problem.hpp"
#include "hj/riemann.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kColumns = R"(CSV columns:
  solve      profiles.csv   t,x,u
             shocks.csv     shock,birth_t,birth_x,death_t,death_x,speed,left_slope,right_slope
  minmax     minmax.csv     x,minmax,maxmin,saddle_x0,saddle_y0,viscosity
  iterate    profiles.csv   t,x,u
             shocks.csv     path,t,x,left_slope,right_slope
             contacts.csv   path,rh_residual,contact_residual,tangent_residual,side,contact
                            (side: 0 none, 1 left state, 2 right state; contact: 0 or 1)
             errors.csv     t,error
  wavefront  wavefront.csv  segment,label,xa,ua,xb,ub,slope
             phase.csv      x,p
  riemann    fan.csv        wave,left_slope,right_slope,speed
  conjugate  conjugate.csv  y,value
  envelope   envelope.csv   p,value
  compare    compare.csv    x,front_tracking,one_step,iterated
             convergence.csv n,mesh,error,bound

Exit status: 0 success, 2 spec or usage error, 3 numerical failure.
HJ_THREADS caps the number of worker threads.)";

std::vector<double> uniform(double a, double b, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return xs;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw hj::SpecError(p.string() + ": cannot write");
  out << content;
}

void emit(const json& dump, const std::string& dir) {
  fs::create_directories(dir);
  write_file(fs::path(dir) / "dump.json", dump.dump(1) + "\n");
  for (const auto& [name, content] : hj::render(dump)) {
    write_file(fs::path(dir) / name, content);
    std::cout << "wrote " << (fs::path(dir) / name).string() << '\n';
  }
}

json domain_of(const hj::ProblemSpec& s) { return {s.xmin, s.xmax}; }

hj::PLFunction pick(const hj::ProblemSpec& s, const std::string& which) {
  if (which == "v") return s.v;
  if (which == "H") return s.H;
  throw hj::SpecError("--of: expected v or H");
}

hj::PLFunction function_arg(const std::string& spec_path, const std::string& inline_fn,
                            const std::string& which) {
  if (!inline_fn.empty()) {
    // reuse the spec parser on a one-function document
    const std::string doc = "{\"H\": " + inline_fn + ", \"v\": " + inline_fn + "}";
    return hj::parse_spec(doc).H;
  }
  if (spec_path.empty()) throw hj::SpecError("--spec or --fn is required");
  return pick(hj::load_spec(spec_path), which);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hjsolve: viscosity and minmax solutions of u_t + H(u_x) = 0 in one dimension"};
  app.footer(kColumns);
  app.require_subcommand(1);

  std::string spec_path, out_dir = "hj_out";
  auto add_common = [&](CLI::App* sub, bool need_spec = true) {
    auto* o = sub->add_option("-s,--spec", spec_path, "problem spec (JSON)");
    if (need_spec) o->required();
    sub->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
  };

  auto* solve = app.add_subcommand("solve", "front tracking of the viscosity solution");
  add_common(solve);

  double t_opt = -1.0;
  int samples = 101, resolution = -1;
  double margin = -1.0;
  std::string mm_engine = "grid";
  auto* mm = app.add_subcommand("minmax", "minmax and maxmin of the generating family at time t");
  add_common(mm);
  mm->add_option("-t,--time", t_opt, "time (default T)");
  mm->add_option("-n,--samples", samples, "number of x samples")->capture_default_str();
  mm->add_option("-r,--resolution", resolution, "fiber grid per axis (default from spec)");
  mm->add_option("-m,--margin", margin, "fiber box margin (default from spec)");
  mm->add_option("-e,--engine", mm_engine, "grid or exact")
      ->check(CLI::IsMember({"grid", "exact"}))
      ->capture_default_str();

  int steps = -1;
  std::string it_engine = "exact";
  std::vector<std::string> emits;
  auto* it = app.add_subcommand("iterate", "iterated minmax over a time subdivision");
  add_common(it);
  it->add_option("--steps", steps, "uniform steps (default from spec)");
  it->add_option("-e,--engine", it_engine, "exact or grid")
      ->check(CLI::IsMember({"exact", "grid"}))
      ->capture_default_str();
  it->add_option("--emit", emits, "profiles, shocks and/or errors (default all)")
      ->check(CLI::IsMember({"profiles", "shocks", "errors"}));
  it->add_option("-r,--resolution", resolution, "fiber grid per axis, grid engine");
  it->add_option("-n,--samples", samples, "x samples per step, grid engine")->capture_default_str();

  auto* wf = app.add_subcommand("wavefront", "wave front, phase curve and 1-step minmax section");
  add_common(wf);
  wf->add_option("-t,--time", t_opt, "time (default T)");

  double p_left = 0.0, p_right = 0.0, x0 = 0.0, t0 = 0.0;
  auto* rm = app.add_subcommand("riemann", "entropy fan of a Riemann problem for the spec's H");
  add_common(rm);
  rm->add_option("--left", p_left, "slope on the left")->required();
  rm->add_option("--right", p_right, "slope on the right")->required();
  rm->add_option("--x0", x0, "apex position")->capture_default_str();
  rm->add_option("--t0", t0, "apex time")->capture_default_str();
  rm->add_option("-t,--time", t_opt, "time span of the diagram (default T)");

  std::string which = "H", inline_fn;
  auto* cj = app.add_subcommand("conjugate", "Legendre conjugate of a convex PL function");
  add_common(cj, false);
  cj->add_option("--of", which, "v or H from the spec")->capture_default_str();
  cj->add_option("--fn", inline_fn, "inline function JSON instead of a spec");

  double env_a = 0.0, env_b = 0.0;
  std::string env_kind = "convex";
  auto* ev = app.add_subcommand("envelope", "convex or concave envelope on [a, b]");
  add_common(ev, false);
  ev->add_option("--of", which, "v or H from the spec")->capture_default_str();
  ev->add_option("--fn", inline_fn, "inline function JSON instead of a spec");
  ev->add_option("-a", env_a, "left end")->required();
  ev->add_option("-b", env_b, "right end")->required();
  ev->add_option("-k,--kind", env_kind, "convex or concave")
      ->check(CLI::IsMember({"convex", "concave"}))
      ->capture_default_str();

  std::vector<std::size_t> study = {1, 2, 4, 8};
  auto* cmp = app.add_subcommand("compare", "front tracking vs 1-step and iterated minmax");
  add_common(cmp);
  cmp->add_option("--study", study, "step counts of the convergence table")->capture_default_str();
  cmp->add_option("-n,--samples", samples, "x samples")->capture_default_str();

  std::string dump_path;
  auto* rd = app.add_subcommand("render", "regenerate artifacts from a JSON dump");
  rd->add_option("dump", dump_path, "dump.json")->required();
  rd->add_option("-o,--out", out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*solve) {
      const hj::ProblemSpec s = hj::load_spec(spec_path);
      const hj::FrontTrace tr = hj::evolve(s.v, s.H, s.T);
      const auto audit = hj::audit(tr);
      std::cout << "events " << tr.events.size() << ", max alive shocks " << tr.max_alive_shocks()
                << ", audit " << (audit.ok() ? "ok" : "FAILED") << '\n';
      for (const auto& e : tr.events)
        std::cout << "collision t=" << hj::fmt(e.t) << " x=" << hj::fmt(e.x) << '\n';
      emit({{"kind", "solve"},
            {"spec", hj::to_json(s)},
            {"trace", hj::to_json(tr)},
            {"times", s.subdivision.times},
            {"domain", domain_of(s)}},
           out_dir);
    } else if (*mm) {
      const hj::ProblemSpec s = hj::load_spec(spec_path);
      const double t = t_opt >= 0.0 ? t_opt : s.T;
      const int res = resolution > 0 ? resolution : s.grid;
      const double mg = margin > 0.0 ? margin : s.margin;
      const hj::FrontTrace ref = hj::evolve(s.v, s.H, t);
      const auto xs = uniform(s.xmin, s.xmax, samples);
      std::vector<json> rows(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        json row{{"x", x}, {"viscosity", ref.eval(t, x)}};
        if (mm_engine == "grid") {
          const auto r = hj::minmax_grid(s.v, s.H, t, x, hj::fiber_box(s.v, s.H, t, x, res, res, mg));
          row.update({{"minmax", r.minmax_value}, {"maxmin", r.maxmin_value},
                      {"saddle_x0", r.saddle_x0}, {"saddle_y0", r.saddle_y0}});
        } else {
          const auto r = hj::minmax_exact(s.v, s.H, t, x);
          row.update({{"minmax", r.minmax_value}, {"maxmin", r.maxmin_value},
                      {"saddle_x0", r.x0}, {"saddle_y0", r.y0}});
        }
        rows[i] = row;
      }
      emit({{"kind", "minmax"}, {"spec", hj::to_json(s)}, {"t", t}, {"engine", mm_engine},
            {"rows", rows}},
           out_dir);
    } else if (*it) {
      hj::ProblemSpec s = hj::load_spec(spec_path);
      if (steps > 0) s.subdivision = hj::Subdivision::uniform(s.T, static_cast<std::size_t>(steps));
      hj::IterOptions opt;
      opt.engine = it_engine == "grid" ? hj::IterEngine::grid : hj::IterEngine::exact_riemann;
      opt.plan.samples = samples;
      if (resolution > 0) opt.plan.resolution = resolution;
      hj::IterationTrace tr = hj::iterated_minmax(s.v, s.H, s.subdivision, opt);
      const hj::FrontTrace ref = hj::evolve(s.v, s.H, s.T);
      hj::attach_errors(tr, s.H);
      const auto paths = hj::extract_shocks(tr, s.H, {0.1});
      const auto verdicts = hj::contact_shock_check(paths, s.H, 0.05);
      json contacts = json::array();
      std::size_t n_contact = 0;
      for (const auto& c : verdicts) {
        n_contact += c.contact ? 1 : 0;
        contacts.push_back({{"path", c.path},
                            {"rh_residual", c.rh_residual},
                            {"contact_residual", c.contact_residual},
                            {"tangent_residual", c.tangent_residual},
                            {"side", static_cast<int>(c.side)},
                            {"contact", c.contact ? 1 : 0}});
      }
      std::cout << "steps " << tr.zeta.steps() << ", max error "
                << hj::fmt(*std::max_element(tr.errors.begin(), tr.errors.end()))
                << ", contact shocks " << n_contact << '\n';
      if (emits.empty()) emits = {"profiles", "shocks", "errors"};
      emit({{"kind", "iterate"},
            {"spec", hj::to_json(s)},
            {"engine", it_engine},
            {"emit", emits},
            {"domain", domain_of(s)},
            {"trace", hj::to_json(tr)},
            {"reference", hj::to_json(ref)},
            {"paths", hj::to_json(paths)},
            {"contacts", contacts}},
           out_dir);
    } else if (*wf) {
      const hj::ProblemSpec s = hj::load_spec(spec_path);
      const double t = t_opt > 0.0 ? t_opt : s.T;
      const auto front = hj::build_wavefront(s.v, s.H, t);
      const auto phase = hj::build_phase_curve(s.v, s.H, t);
      const hj::PLFunction section = hj::minmax_step(s.v, s.H, t);
      // the front is built from v truncated one unit beyond its kinks; beyond
      // this window it misses characteristics from the discarded tails
      const auto bp = s.v.breakpoints();
      const double reach = t * hj::max_speed(s.v, s.H);
      const double a = bp.front() - 1.0 + reach, b = bp.back() + 1.0 - reach;
      std::cout << "segments " << front.segments.size() << ", section distance "
                << (a < b ? hj::fmt(hj::section_distance(front, section, a, b, 1000)) : "n/a") << ", endpoint mismatch "
                << hj::fmt(hj::endpoint_mismatch(front)) << '\n';
      emit({{"kind", "wavefront"},
            {"spec", hj::to_json(s)},
            {"front", hj::to_json(front)},
            {"phase", hj::to_json(phase)},
            {"section", hj::to_json(section)}},
           out_dir);
    } else if (*rm) {
      const hj::ProblemSpec s = hj::load_spec(spec_path);
      const auto fan = hj::solve_fan(p_left, p_right, s.H, t0, x0);
      std::cout << hj::to_json(fan).dump() << '\n';
      emit({{"kind", "riemann"},
            {"H", hj::to_json(s.H)},
            {"fan", hj::to_json(fan)},
            {"T", t_opt > 0.0 ? t_opt : s.T}},
           out_dir);
    } else if (*cj) {
      const hj::PLFunction f = function_arg(spec_path, inline_fn, which);
      const hj::ExtendedPL g = hj::conjugate(f);
      std::cout << "domain [" << hj::fmt(g.lo()) << ", " << hj::fmt(g.hi()) << "]\n";
      std::vector<double> ys{g.lo()};
      for (double y : g.core().breakpoints())
        if (y > g.lo() && y < g.hi()) ys.push_back(y);
      if (g.hi() > g.lo()) ys.push_back(g.hi());
      for (double y : ys) std::cout << "value at " << hj::fmt(y) << ": " << hj::fmt(g(y)) << '\n';
      json conj = hj::to_json(g);
      conj["breakpoints"] = ys;
      std::vector<double> vals;
      for (double y : ys) vals.push_back(g(y));
      conj["values"] = vals;
      emit({{"kind", "conjugate"}, {"input", hj::to_json(f)}, {"conjugate", conj}}, out_dir);
    } else if (*ev) {
      const hj::PLFunction f = function_arg(spec_path, inline_fn, which);
      if (!(env_a < env_b)) throw hj::SpecError("envelope: needs a < b");
      const hj::PLFunction e = hj::envelope(
          f, env_a, env_b, env_kind == "convex" ? hj::EnvelopeKind::convex : hj::EnvelopeKind::concave);
      std::cout << "breakpoints";
      for (double p : e.breakpoints())
        if (p > env_a && p < env_b) std::cout << ' ' << hj::fmt(p);
      std::cout << '\n';
      emit({{"kind", "envelope"},
            {"function", hj::to_json(f)},
            {"envelope", hj::to_json(e)},
            {"which", env_kind},
            {"a", env_a},
            {"b", env_b}},
           out_dir);
    } else if (*cmp) {
      const hj::ProblemSpec s = hj::load_spec(spec_path);
      const hj::FrontTrace ref = hj::evolve(s.v, s.H, s.T);
      const hj::PLFunction one = hj::minmax_step(s.v, s.H, s.T);
      const hj::IterationTrace tr = hj::iterated_minmax(s.v, s.H, s.subdivision);
      const hj::PLFunction& last = tr.profiles.back();
      json rows = json::array();
      double e1 = 0.0, en = 0.0;
      for (double x : uniform(s.xmin, s.xmax, samples)) {
        const double u = ref.eval(s.T, x);
        rows.push_back({{"x", x}, {"front_tracking", u}, {"one_step", one(x)}, {"iterated", last(x)}});
        e1 = std::max(e1, std::abs(one(x) - u));
        en = std::max(en, std::abs(last(x) - u));
      }
      std::sort(study.begin(), study.end());
      study.erase(std::unique(study.begin(), study.end()), study.end());
      const auto table = hj::convergence_study(s.v, s.H, s.T, study);
      std::cout << "sup |one step - viscosity| " << hj::fmt(e1) << "\n";
      std::cout << "sup |iterated (" << tr.zeta.steps() << " steps) - viscosity| " << hj::fmt(en)
                << "\n";
      for (const auto& r : table.rows)
        std::cout << "n=" << r.n << " error " << hj::fmt(r.error) << " bound " << hj::fmt(r.bound)
                  << '\n';
      emit({{"kind", "compare"},
            {"spec", hj::to_json(s)},
            {"t", s.T},
            {"rows", rows},
            {"convergence", hj::to_json(table)}},
           out_dir);
    } else if (*rd) {
      std::ifstream in(dump_path);
      if (!in) throw hj::SpecError(dump_path + ": cannot open");
      json dump;
      try {
        in >> dump;
      } catch (const json::parse_error& e) {
        throw hj::SpecError(dump_path + ": invalid JSON");
      }
      fs::create_directories(out_dir);
      for (const auto& [name, content] : hj::render(dump)) {
        write_file(fs::path(out_dir) / name, content);
        std::cout << "wrote " << (fs::path(out_dir) / name).string() << '\n';
      }
    }
  } catch (const hj::SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return 2;
  } catch (const hj::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
