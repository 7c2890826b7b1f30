#include "snne/demo.hpp"

#include <cmath>
#include <vector>

#include "snne/ensemble.hpp"
#include "snne/plot.hpp"
#include "snne/rng.hpp"

namespace snne {

namespace {

constexpr double kNoiseSigma = 0.1;

double ground_truth(DemoGroundTruth truth, double x) {
  return truth == DemoGroundTruth::kLinear ? 1.5 * x + 0.5 : 0.5 * x * x * x - x;
}

struct Sample {
  FeatureMatrix x;
  std::vector<double> y;
};

Sample draw(DemoGroundTruth truth, std::size_t n, double lo, double hi, Rng& rng) {
  Sample s;
  s.x = FeatureMatrix(n, 1);
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = lo + (hi - lo) * rng.uniform();
    s.x(i, 0) = v;
    s.y[i] = ground_truth(truth, v) + kNoiseSigma * rng.gaussian();
  }
  return s;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double x) const { return slope * x + intercept; }
};

LinearFit least_squares(const Sample& s) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(s.y.size());
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    sx += s.x(i, 0);
    sy += s.y[i];
    sxx += s.x(i, 0) * s.x(i, 0);
    sxy += s.x(i, 0) * s.y[i];
  }
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

double mse_linear(const LinearFit& f, const Sample& s) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const double e = f(s.x(i, 0)) - s.y[i];
    total += e * e;
  }
  return total / static_cast<double>(s.y.size());
}

double mse_ensemble(const EnsembleModel& ens, const Sample& s) {
  const std::vector<GaussianPrediction> preds = predict(ens, s.x);
  double total = 0.0;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const double e = preds[i].mu - s.y[i];
    total += e * e;
  }
  return total / static_cast<double>(s.y.size());
}

TrainConfig demo_train_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.members = 1;
  cfg.batch_size = 64;
  cfg.max_epochs = 300;
  cfg.patience = 30;
  cfg.seed = seed;
  cfg.threads = 1;
  cfg.optim.learning_rate = 0.002;
  // A single member has no abort slack; clip so one hot batch cannot blow
  // up the sigma head.
  cfg.optim.grad_clip_norm = 5.0;
  cfg.model.hidden_dim = 48;
  cfg.model.trunk_layers = 3;
  cfg.model.upper_layers = 2;
  cfg.model.projection_dim = 16;
  return cfg;
}

void export_plot(const std::string& path, DemoGroundTruth truth, const Sample& train,
                 const Sample& test_out, const LinearFit& lin,
                 const EnsembleModel& ens) {
  PlotSpec spec;
  spec.title = "Extrapolation beyond the training range";
  spec.x_label = "x";
  spec.y_label = "y";

  PlotSeries train_pts{"training data", {}, {}, "#1f77b4", true};
  const std::size_t stride = std::max<std::size_t>(1, train.y.size() / 120);
  for (std::size_t i = 0; i < train.y.size(); i += stride) {
    train_pts.x.push_back(train.x(i, 0));
    train_pts.y.push_back(train.y[i]);
  }
  PlotSeries out_pts{"new data to predict", {}, {}, "#ff7f0e", true};
  const std::size_t out_stride = std::max<std::size_t>(1, test_out.y.size() / 80);
  for (std::size_t i = 0; i < test_out.y.size(); i += out_stride) {
    out_pts.x.push_back(test_out.x(i, 0));
    out_pts.y.push_back(test_out.y[i]);
  }

  const std::size_t grid_n = 220;
  FeatureMatrix grid(grid_n, 1);
  for (std::size_t i = 0; i < grid_n; ++i)
    grid(i, 0) = -2.2 + 6.4 * static_cast<double>(i) / static_cast<double>(grid_n - 1);
  const std::vector<GaussianPrediction> grid_preds = predict(ens, grid);

  PlotSeries snn_line{"network fit", {}, {}, "#2ca02c", false};
  PlotSeries lin_line{"linear fit", {}, {}, "#d62728", false};
  PlotSeries truth_line{"ground truth", {}, {}, "#999999", false};
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double x = grid(i, 0);
    snn_line.x.push_back(x);
    snn_line.y.push_back(grid_preds[i].mu);
    lin_line.x.push_back(x);
    lin_line.y.push_back(lin(x));
    truth_line.x.push_back(x);
    truth_line.y.push_back(ground_truth(truth, x));
  }

  spec.series.push_back(std::move(truth_line));
  spec.series.push_back(std::move(lin_line));
  spec.series.push_back(std::move(snn_line));
  spec.series.push_back(std::move(train_pts));
  spec.series.push_back(std::move(out_pts));
  write_svg(spec, path);
}

}  // namespace

ExtrapolationReport demo_extrapolation(std::uint64_t seed, const std::string& svg_path,
                                       DemoGroundTruth truth) {
  Rng rng(mix_seed(seed, 0x9e77));
  const Sample train = draw(truth, 400, -2.0, 2.0, rng);
  const Sample test_in = draw(truth, 300, -2.0, 2.0, rng);
  const Sample test_out = draw(truth, 300, 2.5, 4.0, rng);

  const LinearFit lin = least_squares(train);
  const EnsembleModel ens = train_ensemble(train.x, train.y, demo_train_config(seed));

  ExtrapolationReport report;
  report.noise_sigma = kNoiseSigma;
  report.linear_in_mse = mse_linear(lin, test_in);
  report.linear_out_mse = mse_linear(lin, test_out);
  report.snn_in_mse = mse_ensemble(ens, test_in);
  report.snn_out_mse = mse_ensemble(ens, test_out);

  if (!svg_path.empty()) export_plot(svg_path, truth, train, test_out, lin, ens);
  return report;
}

}  // namespace snne
