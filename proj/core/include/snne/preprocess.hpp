#ifndef SNNE_PREPROCESS_HPP
#define SNNE_PREPROCESS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "snne/dataset.hpp"
#include "snne/matrix.hpp"

namespace snne {

struct PreprocessConfig {
  double fill_value = -1.0;        // constant imputation for missing cells
  std::size_t max_bins = 128;      // hard cap on quantile bins per column
  double eigenvalue_tolerance = 1e-8;  // keep PCA components above tol * largest
};

// Frozen preprocessing state. Fitted once on training data and applied
// identically afterwards: impute -> quantile-bin -> standardize -> PCA
// rotation for features, plus standardization for targets.
struct FittedPipeline {
  double fill_value = -1.0;
  std::vector<std::vector<double>> bin_edges;  // per column, strictly increasing
  std::vector<double> feature_means;           // post-binning statistics
  std::vector<double> feature_scales;
  std::vector<std::uint8_t> degenerate_columns;  // zero variance after binning
  Matrix pca_basis;                // retained components x features, orthonormal rows
  std::vector<double> pca_mean;
  double target_mean = 0.0;
  double target_scale = 1.0;

  std::size_t input_columns() const { return bin_edges.size(); }
  std::size_t output_dim() const { return pca_basis.rows(); }
};

// Fits every stage on (x, y). Statistics never see anything but the data
// passed here.
FittedPipeline fit_pipeline(const FeatureMatrix& x, const std::vector<double>& y,
                            const PreprocessConfig& cfg = {});

// impute -> bin-id lookup -> standardize -> center and rotate. Values beyond
// the fitted range land in the extreme bins.
Matrix transform_features(const FittedPipeline& p, const FeatureMatrix& x);

std::vector<double> transform_target(const FittedPipeline& p, const std::vector<double>& y);

struct OriginalUnits {
  double mu;
  double sigma;
};

// Inverse of the target standardization; sigma scales but does not shift.
OriginalUnits inverse_target(const FittedPipeline& p, double mu_std, double sigma_std);

// Quantile partition of y into at most k classes (fewer when y has fewer
// distinct values). Used for the auxiliary task and stratified splits.
std::vector<int> coarse_classes(const std::vector<double>& y, std::size_t k);

// Linear-interpolation sample quantile of sorted values, q in [0, 1].
double sorted_quantile(const std::vector<double>& sorted_values, double q);

}  // namespace snne

#endif  // SNNE_PREPROCESS_HPP
