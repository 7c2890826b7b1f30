#include "snne/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snne/linalg.hpp"

namespace snne {

namespace {

double impute(double v, double fill) { return std::isnan(v) ? fill : v; }

// Bin id = number of edges <= v, so values beyond the fitted range fall
// into the extreme bins automatically.
std::size_t bin_id(const std::vector<double>& edges, double v) {
  return static_cast<std::size_t>(
      std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

std::vector<double> quantile_edges(std::vector<double> sorted, std::size_t bins) {
  std::vector<double> edges;
  if (bins < 2) return edges;
  edges.reserve(bins - 1);
  for (std::size_t i = 1; i < bins; ++i) {
    const double q = static_cast<double>(i) / static_cast<double>(bins);
    const double e = sorted_quantile(sorted, q);
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  return edges;
}

struct MeanStd {
  double mean;
  double std;  // population
};

MeanStd mean_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return {mean, std::sqrt(var)};
}

}  // namespace

const char* split_tag_name(SplitTag tag) {
  switch (tag) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kDevIn: return "dev_in";
    case SplitTag::kDevOut: return "dev_out";
    case SplitTag::kEvalIn: return "eval_in";
    case SplitTag::kEvalOut: return "eval_out";
  }
  return "unknown";
}

double sorted_quantile(const std::vector<double>& s, double q) {
  if (s.empty()) throw ContractError("sorted_quantile: empty sample");
  if (s.size() == 1) return s[0];
  const double pos = q * static_cast<double>(s.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= s.size()) return s.back();
  const double frac = pos - static_cast<double>(lo);
  return s[lo] * (1.0 - frac) + s[lo + 1] * frac;
}

FittedPipeline fit_pipeline(const FeatureMatrix& x, const std::vector<double>& y,
                            const PreprocessConfig& cfg) {
  if (x.empty()) throw ContractError("fit_pipeline: empty feature matrix");
  if (y.size() != x.rows()) throw ShapeError("fit_pipeline: target not aligned with rows");

  const std::size_t n = x.rows();
  const std::size_t d = x.cols();

  FittedPipeline p;
  p.fill_value = cfg.fill_value;
  p.bin_edges.resize(d);
  p.feature_means.resize(d);
  p.feature_scales.resize(d);
  p.degenerate_columns.assign(d, 0);

  // Bin count rule: per column min(distinct values, max(16, cbrt(N))),
  // hard-capped. Degrades to a single bin for constant columns.
  const std::size_t auto_bins = std::min<std::size_t>(
      cfg.max_bins,
      std::max<std::size_t>(16, static_cast<std::size_t>(std::cbrt(static_cast<double>(n)))));

  Matrix binned(n, d);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = impute(x(r, c), p.fill_value);
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < n; ++i)
      if (sorted[i] != sorted[i - 1]) ++distinct;

    const std::size_t bins = std::max<std::size_t>(1, std::min(distinct, auto_bins));
    p.bin_edges[c] = quantile_edges(std::move(sorted), bins);

    std::vector<double> ids(n);
    for (std::size_t r = 0; r < n; ++r)
      ids[r] = static_cast<double>(bin_id(p.bin_edges[c], col[r]));
    const MeanStd ms = mean_std(ids);
    p.feature_means[c] = ms.mean;
    if (ms.std > 0.0) {
      p.feature_scales[c] = ms.std;
    } else {
      p.feature_scales[c] = 1.0;
      p.degenerate_columns[c] = 1;
    }
    for (std::size_t r = 0; r < n; ++r)
      binned(r, c) = (ids[r] - p.feature_means[c]) / p.feature_scales[c];
  }

  // PCA on the standardized binned features.
  p.pca_mean.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < n; ++r) m += binned(r, c);
    p.pca_mean[c] = m / static_cast<double>(n);
  }
  Matrix centered = binned;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) centered(r, c) -= p.pca_mean[c];

  Matrix cov(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) acc += centered(r, i) * centered(r, j);
      acc /= static_cast<double>(n);
      cov(i, j) = acc;
      cov(j, i) = acc;
    }
  }

  const SymmetricEigen eig = symmetric_eigen(cov);
  const double lead = eig.values.empty() ? 0.0 : std::max(eig.values[0], 0.0);
  std::size_t keep = 0;
  for (std::size_t i = 0; i < eig.values.size(); ++i)
    if (eig.values[i] > cfg.eigenvalue_tolerance * lead) ++keep;
  keep = std::max<std::size_t>(1, keep);  // never project to nothing

  p.pca_basis = Matrix(keep, d);
  for (std::size_t i = 0; i < keep; ++i)
    for (std::size_t c = 0; c < d; ++c) p.pca_basis(i, c) = eig.vectors(i, c);

  const MeanStd ty = mean_std(y);
  p.target_mean = ty.mean;
  p.target_scale = ty.std > 0.0 ? ty.std : 1.0;
  return p;
}

Matrix transform_features(const FittedPipeline& p, const FeatureMatrix& x) {
  const std::size_t d = p.input_columns();
  if (x.cols() != d) {
    throw ShapeError("transform_features: fitted on " + std::to_string(d) +
                     " columns, got " + std::to_string(x.cols()));
  }
  const std::size_t n = x.rows();
  Matrix z(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double v = impute(x(r, c), p.fill_value);
      const double id = static_cast<double>(bin_id(p.bin_edges[c], v));
      z(r, c) = (id - p.feature_means[c]) / p.feature_scales[c] - p.pca_mean[c];
    }
  }
  return matmul_nt(z, p.pca_basis);
}

std::vector<double> transform_target(const FittedPipeline& p, const std::vector<double>& y) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - p.target_mean) / p.target_scale;
  return out;
}

OriginalUnits inverse_target(const FittedPipeline& p, double mu_std, double sigma_std) {
  return {mu_std * p.target_scale + p.target_mean, sigma_std * p.target_scale};
}

std::vector<int> coarse_classes(const std::vector<double>& y, std::size_t k) {
  if (k < 2) throw ContractError("coarse_classes: k must be >= 2");
  if (y.empty()) throw ContractError("coarse_classes: empty target");

  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i == 0 || sorted[i] != sorted[i - 1]) distinct.push_back(sorted[i]);

  std::vector<int> classes(y.size(), 0);
  if (distinct.size() < 2) return classes;  // all values equal

  if (distinct.size() <= k) {
    // One class per distinct value. Mass quantiles can merge values when the
    // distribution is skewed, which would starve the classification task.
    for (std::size_t i = 0; i < y.size(); ++i)
      classes[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(),
                                                     y[i]) -
                                    distinct.begin());
    return classes;
  }

  auto assign = [&](const std::vector<double>& edges) {
    for (std::size_t i = 0; i < y.size(); ++i)
      classes[i] = static_cast<int>(bin_id(edges, y[i]));
  };
  assign(quantile_edges(std::move(sorted), k));

  // Heavy point masses can drag every mass quantile onto one value; redo the
  // cuts over distinct values so at least two classes survive.
  if (std::all_of(classes.begin(), classes.end(),
                  [&](int c) { return c == classes[0]; })) {
    assign(quantile_edges(std::move(distinct), k));
  }
  return classes;
}

}  // namespace snne
