#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hj/fronttrack.hpp"
#include "hj/genfam.hpp"
#include "hj/iterate.hpp"
#include "hj/plfun.hpp"

namespace hj {

/// Shortest round-trip decimal form; the same double always prints the same.
[[nodiscard]] std::string fmt(double x);

/// Line plot on a fixed 800x600 viewBox; x grows rightward, y upward.
class SvgPlot {
public:
  SvgPlot(double xlo, double xhi, double ylo, double yhi, std::string xlabel, std::string ylabel,
          std::string title = "");

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double width = 1.5, bool dashed = false);
  void segment(double x1, double y1, double x2, double y2, const std::string& color,
               double width = 1.5, bool dashed = false);
  void marker(double x, double y, const std::string& color, double radius = 3.0);
  void legend(const std::string& label, const std::string& color, bool dashed = false);

  [[nodiscard]] std::string str() const;

private:
  [[nodiscard]] double px(double x) const;
  [[nodiscard]] double py(double y) const;

  double xlo_, xhi_, ylo_, yhi_;
  double left_, right_, top_, bottom_;
  std::string xlabel_, ylabel_, title_;
  std::vector<std::string> body_;
  std::vector<std::pair<std::string, std::pair<std::string, bool>>> legend_;
};

/// Long format t,x,u sampled at `samples` uniform points of [xmin, xmax].
[[nodiscard]] std::string profiles_csv(const std::vector<double>& times,
                                       const std::vector<PLFunction>& profiles, double xmin,
                                       double xmax, int samples = 401);
[[nodiscard]] std::string profiles_svg(const std::vector<double>& times,
                                       const std::vector<PLFunction>& profiles, double xmin,
                                       double xmax, const std::vector<PLFunction>& reference = {},
                                       int samples = 401);

/// shock,birth_t,birth_x,death_t,death_x,speed,left_slope,right_slope; shocks
/// alive at T end there.
[[nodiscard]] std::string shocks_csv(const FrontTrace& trace, double T);
/// Shock lines in the (x, t) plane; iterated shock paths, if given, overlay
/// the front-tracking shocks as dashed polylines.
[[nodiscard]] std::string shock_diagram_svg(const FrontTrace& trace, double T, double xmin,
                                            double xmax,
                                            const std::vector<ShockPath>* iterated = nullptr);
/// path,t,x,left_slope,right_slope
[[nodiscard]] std::string shock_paths_csv(const std::vector<ShockPath>& paths);

/// segment,label,xa,ua,xb,ub,slope
[[nodiscard]] std::string wavefront_csv(const WaveFrontCurve& front);
/// Genuine segments in blue, fan segments in red; the profile, if given, in black.
[[nodiscard]] std::string wavefront_svg(const WaveFrontCurve& front,
                                        const PLFunction* section = nullptr);
/// x,p
[[nodiscard]] std::string phase_csv(const PhaseCurve& curve);
[[nodiscard]] std::string phase_svg(const PhaseCurve& curve);

/// n,mesh,error,bound
[[nodiscard]] std::string convergence_csv(const ConvergenceTable& table);
/// t,error
[[nodiscard]] std::string errors_csv(const IterationTrace& trace);

/// Artifact file name -> content.
using Artifacts = std::map<std::string, std::string>;

/// Regenerates every CSV/SVG artifact of a run from its JSON dump.
[[nodiscard]] Artifacts render(const nlohmann::json& dump);

}  // namespace hj
