#ifndef SNNE_ENSEMBLE_HPP
#define SNNE_ENSEMBLE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "snne/dataset.hpp"
#include "snne/losses.hpp"
#include "snne/model.hpp"
#include "snne/optim.hpp"
#include "snne/preprocess.hpp"

namespace snne {

struct TrainConfig {
  std::size_t members = 20;
  std::size_t batch_size = 512;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;          // epochs without validation-NLL improvement
  double validation_fraction = 0.1;
  std::size_t coarse_class_count = 10;
  MultitaskLoss loss;
  OptimConfig optim;
  SnnSpec model;                      // input_dim is set from the fitted pipeline
  PreprocessConfig preprocess;
  std::uint64_t seed = 0;
  std::size_t threads = 0;            // 0 = hardware concurrency, capped at members

  void validate() const;
};

// (mu, sigma) in original target units plus the retention score
// (total variance, also in original units squared).
struct GaussianPrediction {
  double mu;
  double sigma;
  double uncertainty;
};

struct EnsembleModel {
  FittedPipeline pipeline;
  std::vector<SnnModel> members;
  std::vector<std::uint64_t> member_seeds;

  std::size_t size() const { return members.size(); }
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Per class, ceil(fraction * class size) samples go to validation;
// singleton classes stay in train. Deterministic per seed; the two lists
// are disjoint and cover everything.
SplitIndices stratified_split(const std::vector<int>& classes, double fraction,
                              std::uint64_t seed);

struct MemberReport {
  std::uint64_t seed = 0;
  bool aborted = false;
  std::string abort_reason;
  std::size_t best_epoch = 0;
  double best_val_nll = std::numeric_limits<double>::infinity();
  std::vector<double> val_nll_history;  // one entry per completed epoch
};

struct TrainReport {
  std::vector<MemberReport> members;
};

using ProgressFn = std::function<void(const std::string&)>;

// Fits the pipeline on the full pool, then trains each member on its own
// stratified train/validation split with the combined loss and
// RAdam+Lookahead, keeping the best-validation weights. Members whose loss
// goes non-finite are dropped; more than 25% of them aborting is an error.
EnsembleModel train_ensemble(const FeatureMatrix& x, const std::vector<double>& y,
                             const TrainConfig& cfg, TrainReport* report = nullptr,
                             const ProgressFn& progress = {});

// Ensemble aggregation in standardized space: mu_bar = mean(mu_i) and total
// variance = mean(sigma_i^2) + mean((mu_i - mu_bar)^2), then mapped back to
// original units (mu via scale+shift, variance via scale^2).
std::vector<GaussianPrediction> predict(const EnsembleModel& ens, const FeatureMatrix& x);

}  // namespace snne

#endif  // SNNE_ENSEMBLE_HPP
