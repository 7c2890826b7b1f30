#ifndef SNNE_DATASET_HPP
#define SNNE_DATASET_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "snne/errors.hpp"

namespace snne {

// Raw feature table as ingested. Unlike Matrix, cells may hold NaN, which
// marks a missing value until the pipeline imputes it.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& storage() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class SplitTag { kTrain, kDevIn, kDevOut, kEvalIn, kEvalOut };

const char* split_tag_name(SplitTag tag);

struct Dataset {
  FeatureMatrix features;
  std::vector<double> target;  // empty when targets are absent
  bool has_target = false;
  std::vector<std::string> feature_names;
  SplitTag split_tag = SplitTag::kTrain;

  std::size_t rows() const { return features.rows(); }

  void validate() const {
    if (has_target && target.size() != features.rows()) {
      throw ShapeError("dataset: target length does not match row count");
    }
  }
};

}  // namespace snne

#endif  // SNNE_DATASET_HPP
