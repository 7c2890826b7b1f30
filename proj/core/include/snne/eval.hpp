#ifndef SNNE_EVAL_HPP
#define SNNE_EVAL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "snne/dataset.hpp"
#include "snne/ensemble.hpp"

namespace snne {

// MSE over the j lowest-uncertainty predictions, for j = 0..N. mse(0) = 0 by
// convention so the trapezoid is well posed; area is the trapezoidal integral
// over retention fraction.
struct RetentionCurve {
  std::vector<double> retention;  // j/N, strictly increasing, 0..1
  std::vector<double> mse;        // aligned with retention
  double area = 0.0;

  std::size_t size() const { return retention.size(); }
};

// Stable ascending sort by uncertainty, ties broken by original index.
RetentionCurve retention_curve(const std::vector<double>& squared_errors,
                               const std::vector<double>& uncertainty);

double r_auc_mse(const std::vector<GaussianPrediction>& preds,
                 const std::vector<double>& y);

struct SplitMetrics {
  std::size_t count = 0;
  double mse = 0.0;
  double mae = 0.0;
  double r_auc = 0.0;
  double mean_uncertainty = 0.0;
};

// Per-split metrics plus the pooled curve over both splits together.
struct EvalReport {
  SplitMetrics in_split;
  SplitMetrics out_split;
  SplitMetrics pooled;
  RetentionCurve pooled_curve;
};

EvalReport evaluate_splits(const EnsembleModel& ens, const Dataset& in_data,
                           const Dataset& out_data);

SplitMetrics compute_metrics(const std::vector<GaussianPrediction>& preds,
                             const std::vector<double>& y);

// Header `retention,mse`, one data row per curve point, 17 significant digits.
void write_retention_csv(const RetentionCurve& curve, const std::string& path);

}  // namespace snne

#endif  // SNNE_EVAL_HPP
