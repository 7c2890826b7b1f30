#ifndef SNNE_PLOT_HPP
#define SNNE_PLOT_HPP

#include <string>
#include <vector>

#include "snne/eval.hpp"

namespace snne {

// Minimal deterministic SVG line/scatter plots. No timestamps, no randomness:
// the same inputs produce byte-identical files.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool scatter = false;  // markers only instead of a polyline
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 640;
  int height = 480;
};

std::string render_svg(const PlotSpec& spec);
void write_svg(const PlotSpec& spec, const std::string& path);

void write_retention_svg(const RetentionCurve& curve, const std::string& path,
                         const std::string& title = "Error retention");

}  // namespace snne

#endif  // SNNE_PLOT_HPP
