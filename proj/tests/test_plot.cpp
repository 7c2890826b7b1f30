#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "snne/eval.hpp"
#include "snne/plot.hpp"

using snne::PlotSeries;
using snne::PlotSpec;

namespace {

PlotSpec sample_spec() {
  PlotSpec spec;
  spec.title = "losses & gains";
  spec.x_label = "epoch";
  spec.y_label = "value < 1";
  PlotSeries line;
  line.label = "train";
  line.x = {0.0, 1.0, 2.0, 3.0};
  line.y = {1.0, 0.5, 0.3, 0.25};
  spec.series.push_back(line);
  PlotSeries dots;
  dots.label = "val";
  dots.x = {0.0, 1.5, 3.0};
  dots.y = {0.9, 0.4, 0.31};
  dots.scatter = true;
  dots.color = "#d62728";
  spec.series.push_back(dots);
  return spec;
}

}  // namespace

TEST_CASE("svg output is structurally sound and escaped") {
  const std::string svg = snne::render_svg(sample_spec());
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(svg.find("#d62728") != std::string::npos);
  CHECK(svg.find("train") != std::string::npos);
  CHECK(svg.find("epoch") != std::string::npos);
  // Raw & and < from the labels must be escaped.
  CHECK(svg.find("losses &amp; gains") != std::string::npos);
  CHECK(svg.find("value &lt; 1") != std::string::npos);
  CHECK(svg.find("losses & gains") == std::string::npos);
}

TEST_CASE("rendering is deterministic") {
  CHECK(snne::render_svg(sample_spec()) == snne::render_svg(sample_spec()));
}

TEST_CASE("series length mismatch is rejected") {
  PlotSpec spec = sample_spec();
  spec.series[0].y.pop_back();
  CHECK_THROWS_AS(snne::render_svg(spec), snne::ShapeError);

  PlotSpec empty;
  empty.title = "empty";
  CHECK_NOTHROW(snne::render_svg(empty));
}

TEST_CASE("degenerate ranges still render") {
  PlotSpec spec;
  PlotSeries s;
  s.label = "flat";
  s.x = {1.0, 2.0};
  s.y = {5.0, 5.0};
  spec.series.push_back(s);
  const std::string svg = snne::render_svg(spec);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg.find("inf") == std::string::npos);

  PlotSeries single;
  single.label = "dot";
  single.x = {3.0};
  single.y = {7.0};
  single.scatter = true;
  PlotSpec one;
  one.series.push_back(single);
  CHECK(snne::render_svg(one).find("nan") == std::string::npos);
}

TEST_CASE("files land on disk") {
  const std::string path = "plot_test_out.svg";
  snne::write_svg(sample_spec(), path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("<svg", 0) == 0);
  in.close();
  std::remove(path.c_str());

  const snne::RetentionCurve c = snne::retention_curve({1.0, 4.0}, {0.1, 0.2});
  const std::string rpath = "plot_retention_out.svg";
  snne::write_retention_svg(c, rpath);
  std::ifstream rin(rpath);
  REQUIRE(rin.good());
  std::string content((std::istreambuf_iterator<char>(rin)),
                      std::istreambuf_iterator<char>());
  CHECK(content.find("retention") != std::string::npos);
  rin.close();
  std::remove(rpath.c_str());
}