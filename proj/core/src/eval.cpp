#include "snne/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "snne/errors.hpp"

namespace snne {

RetentionCurve retention_curve(const std::vector<double>& squared_errors,
                               const std::vector<double>& uncertainty) {
  if (squared_errors.empty()) throw ContractError("retention_curve: empty input");
  if (squared_errors.size() != uncertainty.size())
    throw ShapeError("retention_curve: length mismatch");

  const std::size_t n = squared_errors.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return uncertainty[a] < uncertainty[b];
  });

  RetentionCurve curve;
  curve.retention.reserve(n + 1);
  curve.mse.reserve(n + 1);
  curve.retention.push_back(0.0);
  curve.mse.push_back(0.0);

  double running = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    running += squared_errors[order[j - 1]];
    curve.retention.push_back(static_cast<double>(j) / static_cast<double>(n));
    curve.mse.push_back(running / static_cast<double>(j));
  }

  double area = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    area += 0.5 * (curve.mse[j] + curve.mse[j - 1]) *
            (curve.retention[j] - curve.retention[j - 1]);
  }
  curve.area = area;
  return curve;
}

double r_auc_mse(const std::vector<GaussianPrediction>& preds,
                 const std::vector<double>& y) {
  if (preds.size() != y.size()) throw ShapeError("r_auc_mse: length mismatch");
  std::vector<double> sq(preds.size()), unc(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double e = preds[i].mu - y[i];
    sq[i] = e * e;
    unc[i] = preds[i].uncertainty;
  }
  return retention_curve(sq, unc).area;
}

SplitMetrics compute_metrics(const std::vector<GaussianPrediction>& preds,
                             const std::vector<double>& y) {
  if (preds.size() != y.size()) throw ShapeError("compute_metrics: length mismatch");
  if (preds.empty()) throw ContractError("compute_metrics: empty input");
  SplitMetrics m;
  m.count = preds.size();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double e = preds[i].mu - y[i];
    m.mse += e * e;
    m.mae += std::abs(e);
    m.mean_uncertainty += preds[i].uncertainty;
  }
  const double n = static_cast<double>(preds.size());
  m.mse /= n;
  m.mae /= n;
  m.mean_uncertainty /= n;
  m.r_auc = r_auc_mse(preds, y);
  return m;
}

EvalReport evaluate_splits(const EnsembleModel& ens, const Dataset& in_data,
                           const Dataset& out_data) {
  if (!in_data.has_target || !out_data.has_target)
    throw ContractError("evaluate_splits: both splits need targets");
  in_data.validate();
  out_data.validate();

  const std::vector<GaussianPrediction> in_preds = predict(ens, in_data.features);
  const std::vector<GaussianPrediction> out_preds = predict(ens, out_data.features);

  EvalReport report;
  report.in_split = compute_metrics(in_preds, in_data.target);
  report.out_split = compute_metrics(out_preds, out_data.target);

  std::vector<GaussianPrediction> pooled_preds = in_preds;
  pooled_preds.insert(pooled_preds.end(), out_preds.begin(), out_preds.end());
  std::vector<double> pooled_y = in_data.target;
  pooled_y.insert(pooled_y.end(), out_data.target.begin(), out_data.target.end());
  report.pooled = compute_metrics(pooled_preds, pooled_y);

  std::vector<double> sq(pooled_preds.size()), unc(pooled_preds.size());
  for (std::size_t i = 0; i < pooled_preds.size(); ++i) {
    const double e = pooled_preds[i].mu - pooled_y[i];
    sq[i] = e * e;
    unc[i] = pooled_preds[i].uncertainty;
  }
  report.pooled_curve = retention_curve(sq, unc);
  return report;
}

void write_retention_csv(const RetentionCurve& curve, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fputs("retention,mse\n", f);
  for (std::size_t i = 0; i < curve.size(); ++i)
    std::fprintf(f, "%.17g,%.17g\n", curve.retention[i], curve.mse[i]);
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

}  // namespace snne
