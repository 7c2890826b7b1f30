#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "snne/config.hpp"
#include "snne/container.hpp"
#include "snne/csv.hpp"
#include "snne/demo.hpp"
#include "snne/ensemble.hpp"
#include "snne/eval.hpp"
#include "snne/plot.hpp"
#include "snne/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Effective settings echoed into the container manifest, one config.* pair
// per key, so predict/evaluate can recover column handling later.
snne::Manifest manifest_echo(const snne::TrainSettings& settings,
                             const std::string& target_column) {
  snne::Manifest out;
  out.emplace_back("target_column", target_column);
  std::istringstream text(snne::config_text(settings));
  std::string line;
  while (std::getline(text, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    out.emplace_back("config." + trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

std::string manifest_value(const snne::Manifest& manifest, const std::string& key) {
  for (const auto& [k, v] : manifest)
    if (k == key) return v;
  return "";
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    if (comma == std::string::npos) comma = value.size();
    const std::string item = trim(value.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> csv_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw snne::IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw snne::IoError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out = split_list(line);
  return out;
}

// Feature CSV for a trained model: drop the manifest's excluded columns and
// its target column whenever they are present in this particular file.
snne::Dataset load_for_model(const std::string& path, const snne::Manifest& manifest,
                             bool want_target) {
  const std::vector<std::string> header = csv_header(path);
  auto has = [&](const std::string& name) {
    return std::find(header.begin(), header.end(), name) != header.end();
  };

  snne::CsvOptions opts;
  for (const std::string& name :
       split_list(manifest_value(manifest, "config.excluded_columns")))
    if (has(name)) opts.excluded_columns.push_back(name);

  const std::string target = manifest_value(manifest, "target_column");
  if (want_target) {
    if (!has(target))
      throw snne::IoError("target column '" + target + "' not in " + path);
    opts.target_column = target;
  } else if (!target.empty() && has(target)) {
    opts.excluded_columns.push_back(target);
  }
  return snne::load_csv(path, opts);
}

json metrics_json(const snne::SplitMetrics& m) {
  return json{{"count", m.count},
              {"mse", m.mse},
              {"mae", m.mae},
              {"r_auc_mse", m.r_auc},
              {"mean_uncertainty", m.mean_uncertainty}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw snne::IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw snne::IoError("write failed: " + path);
}

struct TrainArgs {
  std::string data, target, config, out;
  std::vector<std::string> exclude;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t members = 0;
  std::uint64_t threads = 0;
  bool threads_set = false;
  bool verbose = false;
};

int cmd_train(const TrainArgs& a) {
  snne::TrainSettings settings;
  if (!a.config.empty()) settings = snne::load_train_settings(a.config);
  if (!a.exclude.empty()) settings.excluded_columns = a.exclude;
  if (a.seed_set) settings.train.seed = a.seed;
  if (a.members > 0) settings.train.members = a.members;
  if (a.threads_set) settings.train.threads = a.threads;
  settings.train.validate();

  snne::CsvOptions opts;
  opts.target_column = a.target;
  opts.excluded_columns = settings.excluded_columns;
  const snne::Dataset data = snne::load_csv(a.data, opts);

  snne::TrainReport report;
  snne::ProgressFn progress;
  if (a.verbose) progress = [](const std::string& line) { std::cerr << line << "\n"; };
  const snne::EnsembleModel ens =
      snne::train_ensemble(data.features, data.target, settings.train, &report, progress);

  for (const snne::MemberReport& m : report.members) {
    if (m.aborted)
      std::cout << "member seed " << m.seed << " aborted: " << m.abort_reason << "\n";
    else
      std::cout << "member seed " << m.seed << " best epoch " << m.best_epoch
                << " val nll " << m.best_val_nll << "\n";
  }
  snne::save_ensemble(ens, a.out, manifest_echo(settings, a.target));
  std::cout << "wrote " << a.out << " (" << ens.size() << " members)\n";
  return 0;
}

struct PredictArgs {
  std::string model, data, out;
};

int cmd_predict(const PredictArgs& a) {
  const snne::EnsembleModel ens = snne::load_ensemble(a.model);
  const snne::Manifest manifest = snne::read_manifest(a.model);
  const snne::Dataset data = load_for_model(a.data, manifest, false);
  const std::vector<snne::GaussianPrediction> preds = snne::predict(ens, data.features);

  std::vector<std::vector<double>> rows(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i)
    rows[i] = {preds[i].mu, preds[i].sigma, preds[i].uncertainty};
  snne::write_csv(a.out, {"mu", "sigma", "uncertainty"}, rows);
  std::cout << "wrote " << a.out << " (" << preds.size() << " rows)\n";
  return 0;
}

struct EvaluateArgs {
  std::string model, in_csv, out_csv, report;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const snne::EnsembleModel ens = snne::load_ensemble(a.model);
  const snne::Manifest manifest = snne::read_manifest(a.model);
  const snne::Dataset in_data = load_for_model(a.in_csv, manifest, true);
  const snne::Dataset out_data = load_for_model(a.out_csv, manifest, true);

  const snne::EvalReport report = snne::evaluate_splits(ens, in_data, out_data);

  const fs::path report_path(a.report);
  fs::path stem = report_path;
  stem.replace_extension();
  const std::string curve_csv = stem.string() + "_retention.csv";
  const std::string curve_svg = stem.string() + "_retention.svg";
  snne::write_retention_csv(report.pooled_curve, curve_csv);
  snne::write_retention_svg(report.pooled_curve, curve_svg,
                            "Error retention, pooled in+out");

  json j{{"members", ens.size()},
         {"in", metrics_json(report.in_split)},
         {"out", metrics_json(report.out_split)},
         {"pooled", metrics_json(report.pooled)},
         {"retention_csv", curve_csv},
         {"retention_svg", curve_svg}};
  write_text(a.report, j.dump(2) + "\n");

  std::cout << "in    mse " << report.in_split.mse << " r_auc " << report.in_split.r_auc
            << " mean_unc " << report.in_split.mean_uncertainty << "\n";
  std::cout << "out   mse " << report.out_split.mse << " r_auc "
            << report.out_split.r_auc << " mean_unc "
            << report.out_split.mean_uncertainty << "\n";
  std::cout << "pooled mse " << report.pooled.mse << " r_auc " << report.pooled.r_auc
            << "\n";
  std::cout << "wrote " << a.report << ", " << curve_csv << ", " << curve_svg << "\n";
  return 0;
}

struct GenDataArgs {
  std::string spec, out_dir;
};

int cmd_gen_data(const GenDataArgs& a) {
  snne::SyntheticSpec spec;
  for (const std::string& item : split_list(a.spec)) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw snne::ContractError("gen-data spec items must be key=value: '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    const std::string value = trim(item.substr(eq + 1));
    char* end = nullptr;
    const double num = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size())
      throw snne::ContractError("gen-data spec: bad number for " + key);
    if (key == "n_train") spec.n_train = static_cast<std::size_t>(num);
    else if (key == "n_in") spec.n_in = static_cast<std::size_t>(num);
    else if (key == "n_out") spec.n_out = static_cast<std::size_t>(num);
    else if (key == "dims") spec.dims = static_cast<std::size_t>(num);
    else if (key == "noise") spec.noise_sigma = num;
    else if (key == "shift") spec.shift = num;
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(num);
    else throw snne::ContractError("gen-data spec: unknown key '" + key + "'");
  }

  fs::create_directories(a.out_dir);
  const snne::SyntheticData data = snne::gen_synthetic(spec);
  const fs::path dir(a.out_dir);
  snne::write_dataset_csv((dir / "train.csv").string(), data.train);
  snne::write_dataset_csv((dir / "dev_in.csv").string(), data.dev_in);
  snne::write_dataset_csv((dir / "dev_out.csv").string(), data.dev_out);
  std::cout << "wrote " << (dir / "train.csv").string() << " (" << data.train.rows()
            << " rows), dev_in.csv (" << data.dev_in.rows() << "), dev_out.csv ("
            << data.dev_out.rows() << ")\n";
  return 0;
}

struct DemoArgs {
  std::uint64_t seed = 0;
  std::string plot = "extrapolation.svg";
  std::string report;
  std::string truth = "cubic";
};

int cmd_demo(const DemoArgs& a) {
  const snne::DemoGroundTruth truth = a.truth == "linear"
                                          ? snne::DemoGroundTruth::kLinear
                                          : snne::DemoGroundTruth::kCubic;
  const snne::ExtrapolationReport r = snne::demo_extrapolation(a.seed, a.plot, truth);
  std::cout << "linear  in-mse " << r.linear_in_mse << "  out-mse " << r.linear_out_mse
            << "\n";
  std::cout << "network in-mse " << r.snn_in_mse << "  out-mse " << r.snn_out_mse
            << "\n";
  std::cout << "wrote " << a.plot << "\n";
  if (!a.report.empty()) {
    json j{{"linear_in_mse", r.linear_in_mse},
           {"linear_out_mse", r.linear_out_mse},
           {"snn_in_mse", r.snn_in_mse},
           {"snn_out_mse", r.snn_out_mse},
           {"noise_sigma", r.noise_sigma},
           {"plot", a.plot}};
    write_text(a.report, j.dump(2) + "\n");
    std::cout << "wrote " << a.report << "\n";
  }
  return 0;
}

struct PlotRetentionArgs {
  std::string curve;
  std::string predictions, data, target = "target";
  std::string out;
  std::string curve_out;
};

int cmd_plot_retention(const PlotRetentionArgs& a) {
  snne::RetentionCurve curve;
  if (!a.curve.empty()) {
    const snne::Dataset table = snne::load_csv(a.curve);
    if (table.feature_names != std::vector<std::string>{"retention", "mse"})
      throw snne::IoError("expected retention,mse columns in " + a.curve);
    for (std::size_t r = 0; r < table.rows(); ++r) {
      curve.retention.push_back(table.features(r, 0));
      curve.mse.push_back(table.features(r, 1));
    }
  } else {
    const snne::Dataset preds = snne::load_csv(a.predictions);
    snne::CsvOptions opts;
    opts.target_column = a.target;
    const snne::Dataset truth = snne::load_csv(a.data, opts);
    if (preds.rows() != truth.rows())
      throw snne::ShapeError("prediction and data row counts differ");
    const auto& names = preds.feature_names;
    const auto mu_it = std::find(names.begin(), names.end(), "mu");
    const auto unc_it = std::find(names.begin(), names.end(), "uncertainty");
    if (mu_it == names.end() || unc_it == names.end())
      throw snne::IoError("expected mu and uncertainty columns in " + a.predictions);
    const std::size_t mu_col = static_cast<std::size_t>(mu_it - names.begin());
    const std::size_t unc_col = static_cast<std::size_t>(unc_it - names.begin());
    std::vector<double> sq(preds.rows()), unc(preds.rows());
    for (std::size_t r = 0; r < preds.rows(); ++r) {
      const double e = preds.features(r, mu_col) - truth.target[r];
      sq[r] = e * e;
      unc[r] = preds.features(r, unc_col);
    }
    curve = snne::retention_curve(sq, unc);
    if (!a.curve_out.empty()) {
      snne::write_retention_csv(curve, a.curve_out);
      std::cout << "wrote " << a.curve_out << "\n";
    }
  }
  snne::write_retention_svg(curve, a.out);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep ensemble regression with predictive uncertainty"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Fit an ensemble on a CSV");
  train->add_option("--data", train_args.data, "training CSV")->required();
  train->add_option("--target", train_args.target, "target column name")->required();
  train->add_option("--config", train_args.config, "key = value config file");
  train->add_option("--out", train_args.out, "model container path")->required();
  train->add_option("--exclude", train_args.exclude, "columns to ignore");
  train->add_option("--seed", train_args.seed, "seed override")
      ->each([&](const std::string&) { train_args.seed_set = true; });
  train->add_option("--members", train_args.members, "member count override");
  train->add_option("--threads", train_args.threads, "thread count override")
      ->each([&](const std::string&) { train_args.threads_set = true; });
  train->add_flag("--verbose", train_args.verbose, "per-epoch progress on stderr");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand("predict", "Predict mu,sigma,uncertainty");
  predict->add_option("--model", predict_args.model, "model container")->required();
  predict->add_option("--data", predict_args.data, "input CSV")->required();
  predict->add_option("--out", predict_args.out, "output CSV")->required();

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Metrics on in/out splits");
  evaluate->add_option("--model", eval_args.model, "model container")->required();
  evaluate->add_option("--in", eval_args.in_csv, "in-distribution CSV")->required();
  evaluate->add_option("--out-shifted", eval_args.out_csv, "shifted CSV")->required();
  evaluate->add_option("--report", eval_args.report, "JSON report path")->required();

  GenDataArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen-data", "Write synthetic train/dev_in/dev_out");
  gen->add_option("--spec", gen_args.spec,
                  "comma list: n_train,n_in,n_out,dims,noise,shift,seed");
  gen->add_option("--out-dir", gen_args.out_dir, "output directory")->required();

  DemoArgs demo_args;
  CLI::App* demo = app.add_subcommand("demo-extrapolation",
                                      "Linear fit vs network beyond the data");
  demo->add_option("--seed", demo_args.seed, "seed");
  demo->add_option("--plot", demo_args.plot, "SVG path");
  demo->add_option("--report", demo_args.report, "JSON report path");
  demo->add_option("--truth", demo_args.truth, "linear or cubic")
      ->check(CLI::IsMember({"linear", "cubic"}));

  PlotRetentionArgs plot_args;
  CLI::App* plot = app.add_subcommand("plot-retention", "Render a retention curve SVG");
  CLI::Option* curve_opt = plot->add_option("--curve", plot_args.curve, "existing retention CSV");
  plot->add_option("--predictions", plot_args.predictions, "predict output CSV")
      ->excludes(curve_opt);
  plot->add_option("--data", plot_args.data, "CSV with the target column");
  plot->add_option("--target", plot_args.target, "target column name");
  plot->add_option("--out", plot_args.out, "SVG path")->required();
  plot->add_option("--curve-out", plot_args.curve_out, "also write the curve CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "snne: usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (predict->parsed()) return cmd_predict(predict_args);
    if (evaluate->parsed()) return cmd_evaluate(eval_args);
    if (gen->parsed()) return cmd_gen_data(gen_args);
    if (demo->parsed()) return cmd_demo(demo_args);
    if (plot->parsed()) {
      if (plot_args.curve.empty() &&
          (plot_args.predictions.empty() || plot_args.data.empty())) {
        std::cerr << "snne: usage error: plot-retention needs --curve or "
                     "--predictions with --data\n";
        return 2;
      }
      return cmd_plot_retention(plot_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "snne: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
