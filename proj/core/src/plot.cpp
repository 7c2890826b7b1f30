#include "snne/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "snne/errors.hpp"

namespace snne {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range data_range(const PlotSpec& spec, bool y_axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const PlotSeries& s : spec.series) {
    const std::vector<double>& v = y_axis ? s.y : s.x;
    for (double e : v) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

// Round tick spacing to 1/2/5 times a power of ten.
std::vector<double> ticks(const Range& r, int target) {
  const double span = r.hi - r.lo;
  double step = std::pow(10.0, std::floor(std::log10(span / target)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (span / (step * m) <= target) {
      step *= m;
      break;
    }
  }
  std::vector<double> out;
  double t = std::ceil(r.lo / step) * step;
  for (; t <= r.hi + 1e-12 * span; t += step) out.push_back(t == 0.0 ? 0.0 : t);
  return out;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  const int w = spec.width;
  const int h = spec.height;
  const double ml = 62, mr = 18, mt = 34, mb = 46;  // margins
  const double pw = w - ml - mr;
  const double ph = h - mt - mb;

  const Range rx = data_range(spec, false);
  const Range ry = data_range(spec, true);
  auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) +
         " " + std::to_string(h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(w / 2.0) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">" + escape_xml(spec.title) +
         "</text>\n";

  for (double t : ticks(rx, 6)) {
    const double x = px(t);
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(x) +
           "\" y2=\"" + fmt(mt + ph) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(mt + ph + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           fmt(t) + "</text>\n";
  }
  for (double t : ticks(ry, 6)) {
    const double y = py(t);
    svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(ml + pw) +
           "\" y2=\"" + fmt(y) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           fmt(t) + "</text>\n";
  }
  svg += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) +
         "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg += "<text x=\"" + fmt(ml + pw / 2.0) + "\" y=\"" + fmt(h - 10.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape_xml(spec.x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt(mt + ph / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " + fmt(mt + ph / 2.0) + ")\">" +
         escape_xml(spec.y_label) + "</text>\n";

  double legend_y = mt + 14;
  for (const PlotSeries& s : spec.series) {
    if (s.x.size() != s.y.size()) throw ShapeError("render_svg: series length mismatch");
    if (s.scatter) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        svg += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.y[i])) +
               "\" r=\"2.4\" fill=\"" + s.color + "\"/>\n";
      }
    } else if (!s.x.empty()) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) pts += ' ';
        pts += fmt(px(s.x[i])) + "," + fmt(py(s.y[i]));
      }
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
             "\" stroke-width=\"1.6\"/>\n";
    }
    if (!s.label.empty()) {
      svg += "<rect x=\"" + fmt(ml + pw - 150) + "\" y=\"" + fmt(legend_y - 8) +
             "\" width=\"10\" height=\"10\" fill=\"" + s.color + "\"/>\n";
      svg += "<text x=\"" + fmt(ml + pw - 136) + "\" y=\"" + fmt(legend_y + 1) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + escape_xml(s.label) +
             "</text>\n";
      legend_y += 16;
    }
  }
  svg += "</svg>\n";
  return svg;
}

void write_svg(const PlotSpec& spec, const std::string& path) {
  const std::string svg = render_svg(spec);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fwrite(svg.data(), 1, svg.size(), f);
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

void write_retention_svg(const RetentionCurve& curve, const std::string& path,
                         const std::string& title) {
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "retention fraction";
  spec.y_label = "MSE";
  PlotSeries s;
  s.label = "model ordering";
  s.x = curve.retention;
  s.y = curve.mse;
  spec.series.push_back(std::move(s));
  write_svg(spec, path);
}

}  // namespace snne
