#include "hj/emit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hj/errors.hpp"
#include "hj/riemann.hpp"

namespace hj {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string color_at(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string px_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> padded(double lo, double hi) {
  if (!(hi > lo)) {
    const double c = std::isfinite(lo) ? lo : 0.0;
    return {c - 1.0, c + 1.0};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::vector<double> uniform(double a, double b, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return xs;
}

// -- JSON readers for dump sections ---------------------------------------

std::vector<PLFunction> profiles_from(const nlohmann::json& arr) {
  std::vector<PLFunction> out;
  for (const auto& p : arr) out.push_back(pl_from_json(p));
  return out;
}

std::vector<ShockPath> paths_from(const nlohmann::json& arr) {
  std::vector<ShockPath> out;
  for (const auto& p : arr) {
    ShockPath sp;
    for (const auto& q : p.at("points"))
      sp.points.push_back({q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                           q[3].get<double>()});
    sp.speeds = p.at("speeds").get<std::vector<double>>();
    sp.rh_residuals = p.at("rh_residuals").get<std::vector<double>>();
    sp.born_late = p.at("born_late").get<bool>();
    sp.died = p.at("died").get<bool>();
    out.push_back(std::move(sp));
  }
  return out;
}

WaveFrontCurve front_from(const nlohmann::json& j) {
  WaveFrontCurve f;
  f.t = j.at("t").get<double>();
  for (const auto& s : j.at("segments")) {
    FrontSegment seg;
    seg.xa = s.at("a")[0].get<double>();
    seg.ua = s.at("a")[1].get<double>();
    seg.xb = s.at("b")[0].get<double>();
    seg.ub = s.at("b")[1].get<double>();
    seg.slope = s.at("slope").get<double>();
    seg.label = s.at("label").get<std::string>() == "fan" ? SegmentLabel::fan : SegmentLabel::genuine;
    seg.src_lo = s.at("source")[0].get<double>();
    seg.src_hi = s.at("source")[1].get<double>();
    f.segments.push_back(seg);
  }
  f.warnings = j.at("warnings").get<std::vector<std::string>>();
  return f;
}

PhaseCurve phase_from(const nlohmann::json& j) {
  PhaseCurve c;
  c.t = j.at("t").get<double>();
  for (const auto& p : j.at("points")) c.points.push_back({p[0].get<double>(), p[1].get<double>()});
  return c;
}

ConvergenceTable table_from(const nlohmann::json& j) {
  ConvergenceTable t;
  t.collisions = j.at("collisions").get<std::size_t>();
  t.h_max = j.at("h_max").get<double>();
  for (const auto& r : j.at("rows"))
    t.rows.push_back({r.at("n").get<std::size_t>(), r.at("mesh").get<double>(),
                      r.at("error").get<double>(), r.at("bound").get<double>()});
  return t;
}

IterationTrace iteration_from(const nlohmann::json& j) {
  IterationTrace tr;
  tr.zeta.times = j.at("times").get<std::vector<double>>();
  tr.profiles = profiles_from(j.at("profiles"));
  for (int b : j.at("front_tracking_step").get<std::vector<int>>()) tr.exact_step.push_back(b != 0);
  tr.evaluations = j.at("evaluations").get<std::vector<std::size_t>>();
  tr.errors = j.at("errors").get<std::vector<double>>();
  return tr;
}

std::string table_csv(const std::vector<std::string>& header, const nlohmann::json& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto& c = r.at(header[i]);
      os << (i ? "," : "") << (c.is_null() ? std::string("nan") : fmt(c.get<double>()));
    }
    os << '\n';
  }
  return os.str();
}

std::string curves_svg(const nlohmann::json& rows, const std::string& xkey,
                       const std::vector<std::string>& keys, const std::string& ylabel,
                       const std::string& title) {
  double ylo = kInf, yhi = -kInf, xlo = kInf, xhi = -kInf;
  for (const auto& r : rows) {
    xlo = std::min(xlo, r.at(xkey).get<double>());
    xhi = std::max(xhi, r.at(xkey).get<double>());
    for (const auto& k : keys) {
      if (r.at(k).is_null()) continue;
      ylo = std::min(ylo, r.at(k).get<double>());
      yhi = std::max(yhi, r.at(k).get<double>());
    }
  }
  const auto [a, b] = padded(ylo, yhi);
  SvgPlot plot(xlo, xhi, a, b, xkey, ylabel, title);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
      if (!r.at(keys[i]).is_null()) pts.emplace_back(r.at(xkey).get<double>(), r.at(keys[i]).get<double>());
    plot.polyline(pts, color_at(i), 1.5, i > 0);
    plot.legend(keys[i], color_at(i), i > 0);
  }
  return plot.str();
}

}  // namespace

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- SvgPlot

SvgPlot::SvgPlot(double xlo, double xhi, double ylo, double yhi, std::string xlabel,
                 std::string ylabel, std::string title)
    : xlo_(xlo), xhi_(xhi), ylo_(ylo), yhi_(yhi), xlabel_(std::move(xlabel)),
      ylabel_(std::move(ylabel)), title_(std::move(title)) {
  if (!(xhi_ > xlo_)) std::tie(xlo_, xhi_) = padded(xlo_, xlo_);
  if (!(yhi_ > ylo_)) std::tie(ylo_, yhi_) = padded(ylo_, ylo_);
  const std::size_t label_chars =
      std::max({fmt(ylo_).size(), fmt(yhi_).size(), std::size_t{4}});
  left_ = 30.0 + 6.5 * static_cast<double>(std::min<std::size_t>(label_chars, 14));
  right_ = 20.0;
  top_ = title_.empty() ? 20.0 : 40.0;
  bottom_ = 50.0;
}

double SvgPlot::px(double x) const {
  return left_ + (x - xlo_) / (xhi_ - xlo_) * (kWidth - left_ - right_);
}

double SvgPlot::py(double y) const {
  return kHeight - bottom_ - (y - ylo_) / (yhi_ - ylo_) * (kHeight - top_ - bottom_);
}

void SvgPlot::polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                       double width, bool dashed) {
  if (pts.empty()) return;
  std::string s = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + px_str(width) +
                  "\"" + (dashed ? " stroke-dasharray=\"6 4\"" : "") + " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i)
    s += (i ? " " : "") + px_str(px(pts[i].first)) + "," + px_str(py(pts[i].second));
  s += "\"/>";
  body_.push_back(std::move(s));
}

void SvgPlot::segment(double x1, double y1, double x2, double y2, const std::string& color,
                      double width, bool dashed) {
  polyline({{x1, y1}, {x2, y2}}, color, width, dashed);
}

void SvgPlot::marker(double x, double y, const std::string& color, double radius) {
  body_.push_back("<circle cx=\"" + px_str(px(x)) + "\" cy=\"" + px_str(py(y)) + "\" r=\"" +
                  px_str(radius) + "\" fill=\"" + color + "\"/>");
}

void SvgPlot::legend(const std::string& label, const std::string& color, bool dashed) {
  legend_.push_back({label, {color, dashed}});
}

std::string SvgPlot::str() const {
  std::ostringstream os;
  const double x0 = left_, x1 = kWidth - right_, y0 = top_, y1 = kHeight - bottom_;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" "
        "height=\"600\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  if (!title_.empty())
    os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title_)
       << "</text>\n";
  os << "<rect x=\"" << px_str(x0) << "\" y=\"" << px_str(y0) << "\" width=\"" << px_str(x1 - x0)
     << "\" height=\"" << px_str(y1 - y0) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xlo_ + (xhi_ - xlo_) * i / 4.0, fy = ylo_ + (yhi_ - ylo_) * i / 4.0;
    const double gx = px(fx), gy = py(fy);
    os << "<line x1=\"" << px_str(gx) << "\" y1=\"" << px_str(y1) << "\" x2=\"" << px_str(gx)
       << "\" y2=\"" << px_str(y1 + 5) << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << px_str(gx) << "\" y=\"" << px_str(y1 + 18)
       << "\" text-anchor=\"middle\">" << fmt(std::round(fx * 1e4) / 1e4) << "</text>\n";
    os << "<line x1=\"" << px_str(x0 - 5) << "\" y1=\"" << px_str(gy) << "\" x2=\"" << px_str(x0)
       << "\" y2=\"" << px_str(gy) << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << px_str(x0 - 8) << "\" y=\"" << px_str(gy + 4)
       << "\" text-anchor=\"end\">" << fmt(std::round(fy * 1e4) / 1e4) << "</text>\n";
  }
  os << "<text x=\"" << px_str(0.5 * (x0 + x1)) << "\" y=\"" << px_str(kHeight - 12)
     << "\" text-anchor=\"middle\">" << escape(xlabel_) << "</text>\n";
  os << "<text x=\"14\" y=\"" << px_str(0.5 * (y0 + y1)) << "\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 14 " << px_str(0.5 * (y0 + y1)) << ")\">" << escape(ylabel_)
     << "</text>\n";
  os << "<g clip-path=\"url(#plot)\">\n";
  for (const auto& b : body_) os << b << '\n';
  os << "</g>\n";
  os << "<defs><clipPath id=\"plot\"><rect x=\"" << px_str(x0) << "\" y=\"" << px_str(y0)
     << "\" width=\"" << px_str(x1 - x0) << "\" height=\"" << px_str(y1 - y0)
     << "\"/></clipPath></defs>\n";
  for (std::size_t i = 0; i < legend_.size(); ++i) {
    const double ly = y0 + 16 + 16 * static_cast<double>(i);
    const auto& [label, style] = legend_[i];
    os << "<line x1=\"" << px_str(x1 - 150) << "\" y1=\"" << px_str(ly - 4) << "\" x2=\""
       << px_str(x1 - 124) << "\" y2=\"" << px_str(ly - 4) << "\" stroke=\"" << style.first
       << "\" stroke-width=\"2\"" << (style.second ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    os << "<text x=\"" << px_str(x1 - 118) << "\" y=\"" << px_str(ly) << "\">" << escape(label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ------------------------------------------------------------ emitters

std::string profiles_csv(const std::vector<double>& times, const std::vector<PLFunction>& profiles,
                         double xmin, double xmax, int samples) {
  std::ostringstream os;
  os << "t,x,u\n";
  const auto xs = uniform(xmin, xmax, samples);
  for (std::size_t k = 0; k < profiles.size(); ++k)
    for (double x : xs) os << fmt(times[k]) << ',' << fmt(x) << ',' << fmt(profiles[k](x)) << '\n';
  return os.str();
}

std::string profiles_svg(const std::vector<double>& times, const std::vector<PLFunction>& profiles,
                         double xmin, double xmax, const std::vector<PLFunction>& reference,
                         int samples) {
  const auto xs = uniform(xmin, xmax, samples);
  double lo = kInf, hi = -kInf;
  for (const auto* set : {&profiles, &reference})
    for (const auto& f : *set)
      for (double x : xs) {
        lo = std::min(lo, f(x));
        hi = std::max(hi, f(x));
      }
  const auto [a, b] = padded(lo, hi);
  SvgPlot plot(xmin, xmax, a, b, "x", "u", "profiles u(t, x)");
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    std::vector<std::pair<double, double>> pts;
    for (double x : xs) pts.emplace_back(x, profiles[k](x));
    plot.polyline(pts, color_at(k));
    plot.legend("t = " + fmt(times[k]), color_at(k));
    if (k < reference.size()) {
      std::vector<std::pair<double, double>> ref;
      for (double x : xs) ref.emplace_back(x, reference[k](x));
      plot.polyline(ref, "#000000", 1.0, true);
    }
  }
  if (!reference.empty()) plot.legend("front tracking", "#000000", true);
  return plot.str();
}

std::string shocks_csv(const FrontTrace& trace, double T) {
  std::ostringstream os;
  os << "shock,birth_t,birth_x,death_t,death_x,speed,left_slope,right_slope\n";
  for (std::size_t i = 0; i < trace.shocks.size(); ++i) {
    const ShockTrack& s = trace.shocks[i];
    if (s.birth_t > T) continue;
    const double dt = std::min(s.death_t, T);
    os << i << ',' << fmt(s.birth_t) << ',' << fmt(s.birth_x) << ',' << fmt(dt) << ','
       << fmt(s.position(dt)) << ',' << fmt(s.speed) << ',' << fmt(s.left_slope) << ','
       << fmt(s.right_slope) << '\n';
  }
  return os.str();
}

std::string shock_diagram_svg(const FrontTrace& trace, double T, double xmin, double xmax,
                              const std::vector<ShockPath>* iterated) {
  SvgPlot plot(xmin, xmax, 0.0, T, "x", "t", "shock diagram");
  for (const ShockTrack& s : trace.shocks) {
    if (s.birth_t > T) continue;
    const double dt = std::min(s.death_t, T);
    plot.segment(s.birth_x, s.birth_t, s.position(dt), dt, "#1f77b4");
  }
  for (const CollisionRecord& e : trace.events)
    if (e.t <= T) plot.marker(e.x, e.t, "#d62728");
  plot.legend("front tracking", "#1f77b4");
  if (iterated) {
    for (const ShockPath& p : *iterated) {
      std::vector<std::pair<double, double>> pts;
      for (const ShockPoint& q : p.points) pts.emplace_back(q.x, q.t);
      plot.polyline(pts, "#ff7f0e", 1.5, true);
    }
    plot.legend("iterated minmax", "#ff7f0e", true);
  }
  return plot.str();
}

std::string shock_paths_csv(const std::vector<ShockPath>& paths) {
  std::ostringstream os;
  os << "path,t,x,left_slope,right_slope\n";
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (const ShockPoint& q : paths[i].points)
      os << i << ',' << fmt(q.t) << ',' << fmt(q.x) << ',' << fmt(q.left_slope) << ','
         << fmt(q.right_slope) << '\n';
  return os.str();
}

std::string wavefront_csv(const WaveFrontCurve& front) {
  std::ostringstream os;
  os << "segment,label,xa,ua,xb,ub,slope\n";
  for (std::size_t i = 0; i < front.segments.size(); ++i) {
    const FrontSegment& s = front.segments[i];
    os << i << ',' << (s.label == SegmentLabel::fan ? "fan" : "genuine") << ',' << fmt(s.xa) << ','
       << fmt(s.ua) << ',' << fmt(s.xb) << ',' << fmt(s.ub) << ',' << fmt(s.slope) << '\n';
  }
  return os.str();
}

std::string wavefront_svg(const WaveFrontCurve& front, const PLFunction* section) {
  double xlo = kInf, xhi = -kInf, ulo = kInf, uhi = -kInf;
  for (const FrontSegment& s : front.segments) {
    xlo = std::min({xlo, s.xa, s.xb});
    xhi = std::max({xhi, s.xa, s.xb});
    ulo = std::min({ulo, s.ua, s.ub});
    uhi = std::max({uhi, s.ua, s.ub});
  }
  const auto [a, b] = padded(ulo, uhi);
  SvgPlot plot(xlo, xhi, a, b, "x", "u", "wave front at t = " + fmt(front.t));
  for (const FrontSegment& s : front.segments)
    plot.segment(s.xa, s.ua, s.xb, s.ub, s.label == SegmentLabel::fan ? "#d62728" : "#1f77b4", 2.0);
  plot.legend("genuine", "#1f77b4");
  plot.legend("fan", "#d62728");
  if (section) {
    std::vector<std::pair<double, double>> pts;
    for (double x : uniform(xlo, xhi, 401)) pts.emplace_back(x, (*section)(x));
    plot.polyline(pts, "#000000", 1.0, true);
    plot.legend("minmax section", "#000000", true);
  }
  return plot.str();
}

std::string phase_csv(const PhaseCurve& curve) {
  std::ostringstream os;
  os << "x,p\n";
  for (const PhasePoint& p : curve.points) os << fmt(p.x) << ',' << fmt(p.p) << '\n';
  return os.str();
}

std::string phase_svg(const PhaseCurve& curve) {
  double xlo = kInf, xhi = -kInf, plo = kInf, phi = -kInf;
  for (const PhasePoint& p : curve.points) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    plo = std::min(plo, p.p);
    phi = std::max(phi, p.p);
  }
  const auto [a, b] = padded(plo, phi);
  SvgPlot plot(xlo, xhi, a, b, "x", "p", "geometric solution at t = " + fmt(curve.t));
  std::vector<std::pair<double, double>> pts;
  for (const PhasePoint& p : curve.points) pts.emplace_back(p.x, p.p);
  plot.polyline(pts, "#1f77b4", 2.0);
  return plot.str();
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream os;
  os << "n,mesh,error,bound\n";
  for (const ConvergenceRow& r : table.rows)
    os << r.n << ',' << fmt(r.mesh) << ',' << fmt(r.error) << ',' << fmt(r.bound) << '\n';
  return os.str();
}

std::string errors_csv(const IterationTrace& trace) {
  std::ostringstream os;
  os << "t,error\n";
  for (std::size_t k = 0; k < trace.errors.size(); ++k)
    os << fmt(trace.zeta.times[k]) << ',' << fmt(trace.errors[k]) << '\n';
  return os.str();
}

// --------------------------------------------------------------- render

Artifacts render(const nlohmann::json& dump) {
  if (!dump.is_object() || !dump.contains("kind")) throw SpecError("dump: missing kind");
  const std::string kind = dump.at("kind").get<std::string>();
  Artifacts out;
  try {
    if (kind == "solve") {
      const FrontTrace tr = trace_from_json(dump.at("trace"));
      const auto times = dump.at("times").get<std::vector<double>>();
      const double xmin = dump.at("domain")[0].get<double>(), xmax = dump.at("domain")[1].get<double>();
      std::vector<PLFunction> profiles;
      for (double t : times) profiles.push_back(tr.profile(t));
      out["profiles.csv"] = profiles_csv(times, profiles, xmin, xmax);
      out["profiles.svg"] = profiles_svg(times, profiles, xmin, xmax);
      out["shocks.csv"] = shocks_csv(tr, times.back());
      out["shocks.svg"] = shock_diagram_svg(tr, times.back(), xmin, xmax);
    } else if (kind == "minmax") {
      const auto& rows = dump.at("rows");
      out["minmax.csv"] =
          table_csv({"x", "minmax", "maxmin", "saddle_x0", "saddle_y0", "viscosity"}, rows);
      out["minmax.svg"] = curves_svg(rows, "x", {"minmax", "maxmin", "viscosity"}, "u",
                                     "minmax at t = " + fmt(dump.at("t").get<double>()));
    } else if (kind == "iterate") {
      const IterationTrace it = iteration_from(dump.at("trace"));
      const FrontTrace ref = trace_from_json(dump.at("reference"));
      const double xmin = dump.at("domain")[0].get<double>(), xmax = dump.at("domain")[1].get<double>();
      const auto emit = dump.at("emit").get<std::vector<std::string>>();
      auto wants = [&](const std::string& s) {
        return std::find(emit.begin(), emit.end(), s) != emit.end();
      };
      if (wants("profiles")) {
        std::vector<PLFunction> refs;
        for (double t : it.zeta.times) refs.push_back(ref.profile(t));
        out["profiles.csv"] = profiles_csv(it.zeta.times, it.profiles, xmin, xmax);
        out["profiles.svg"] = profiles_svg(it.zeta.times, it.profiles, xmin, xmax, refs);
      }
      if (wants("shocks")) {
        const auto paths = paths_from(dump.at("paths"));
        out["shocks.csv"] = shock_paths_csv(paths);
        out["contacts.csv"] = table_csv({"path", "rh_residual", "contact_residual",
                                         "tangent_residual", "side", "contact"},
                                        dump.at("contacts"));
        out["shocks.svg"] = shock_diagram_svg(ref, it.zeta.times.back(), xmin, xmax, &paths);
      }
      if (wants("errors")) out["errors.csv"] = errors_csv(it);
    } else if (kind == "wavefront") {
      const WaveFrontCurve front = front_from(dump.at("front"));
      const PhaseCurve phase = phase_from(dump.at("phase"));
      const PLFunction section = pl_from_json(dump.at("section"));
      out["wavefront.csv"] = wavefront_csv(front);
      out["wavefront.svg"] = wavefront_svg(front, &section);
      out["phase.csv"] = phase_csv(phase);
      out["phase.svg"] = phase_svg(phase);
    } else if (kind == "riemann") {
      const auto& fan = dump.at("fan");
      const auto slopes = fan.at("slopes").get<std::vector<double>>();
      const auto speeds = fan.at("speeds").get<std::vector<double>>();
      const double t0 = fan.at("apex")[0].get<double>(), x0 = fan.at("apex")[1].get<double>();
      std::ostringstream os;
      os << "wave,left_slope,right_slope,speed\n";
      for (std::size_t i = 0; i < speeds.size(); ++i)
        os << i << ',' << fmt(slopes[i]) << ',' << fmt(slopes[i + 1]) << ',' << fmt(speeds[i]) << '\n';
      out["fan.csv"] = os.str();
      const double T = dump.at("T").get<double>();
      double reach = 1.0;
      for (double c : speeds) reach = std::max(reach, std::abs(c) * T);
      SvgPlot plot(x0 - 1.1 * reach, x0 + 1.1 * reach, t0, t0 + T, "x", "t", "Riemann fan");
      for (double c : speeds) plot.segment(x0, t0, x0 + c * T, t0 + T, "#1f77b4");
      out["fan.svg"] = plot.str();
    } else if (kind == "conjugate") {
      const auto& g = dump.at("conjugate");
      std::ostringstream os;
      os << "y,value\n";
      const auto xs = g.at("breakpoints").get<std::vector<double>>();
      const auto ys = g.at("values").get<std::vector<double>>();
      for (std::size_t i = 0; i < xs.size(); ++i) os << fmt(xs[i]) << ',' << fmt(ys[i]) << '\n';
      out["conjugate.csv"] = os.str();
    } else if (kind == "envelope") {
      const PLFunction f = pl_from_json(dump.at("function"));
      const PLFunction e = pl_from_json(dump.at("envelope"));
      const double a = dump.at("a").get<double>(), b = dump.at("b").get<double>();
      std::ostringstream os;
      os << "p,value\n";
      std::vector<double> ps{a};
      for (double x : e.breakpoints())
        if (x > a && x < b) ps.push_back(x);
      ps.push_back(b);
      for (double p : ps) os << fmt(p) << ',' << fmt(e(p)) << '\n';
      out["envelope.csv"] = os.str();
      nlohmann::json rows = nlohmann::json::array();
      for (double p : uniform(a, b, 401)) rows.push_back({{"p", p}, {"H", f(p)}, {"envelope", e(p)}});
      out["envelope.svg"] = curves_svg(rows, "p", {"H", "envelope"}, "value",
                                       dump.at("which").get<std::string>() + " envelope");
    } else if (kind == "compare") {
      const auto& rows = dump.at("rows");
      out["compare.csv"] = table_csv({"x", "front_tracking", "one_step", "iterated"}, rows);
      out["compare.svg"] = curves_svg(rows, "x", {"front_tracking", "one_step", "iterated"}, "u",
                                      "t = " + fmt(dump.at("t").get<double>()));
      out["convergence.csv"] = convergence_csv(table_from(dump.at("convergence")));
    } else {
      throw SpecError("dump: unknown kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("dump: ") + e.what());
  }
  return out;
}

}  // namespace hj
