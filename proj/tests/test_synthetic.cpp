#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "snne/synthetic.hpp"

using snne::SyntheticData;
using snne::SyntheticSpec;

namespace {

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.n_train = 600;
  s.n_in = 400;
  s.n_out = 400;
  s.dims = 5;
  s.seed = 3;
  return s;
}

std::vector<double> column_means(const snne::FeatureMatrix& x) {
  std::vector<double> out(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out[j] += x(i, j);
  for (double& v : out) v /= static_cast<double>(x.rows());
  return out;
}

}  // namespace

TEST_CASE("splits have the requested shapes, names, and tags") {
  const SyntheticSpec spec = small_spec();
  const SyntheticData d = snne::gen_synthetic(spec);

  CHECK(d.train.rows() == 600);
  CHECK(d.dev_in.rows() == 400);
  CHECK(d.dev_out.rows() == 400);
  CHECK(d.train.features.cols() == 5);
  CHECK(d.train.has_target);
  CHECK(d.dev_out.has_target);
  CHECK(d.train.feature_names.size() == 5);
  CHECK(d.train.feature_names[0] == "x0");
  CHECK(d.train.feature_names[4] == "x4");
  CHECK(d.train.split_tag == snne::SplitTag::kTrain);
  CHECK(d.dev_in.split_tag == snne::SplitTag::kDevIn);
  CHECK(d.dev_out.split_tag == snne::SplitTag::kDevOut);
  d.train.validate();
}

TEST_CASE("generation is deterministic per seed") {
  const SyntheticData a = snne::gen_synthetic(small_spec());
  const SyntheticData b = snne::gen_synthetic(small_spec());
  CHECK(a.train.features.storage() == b.train.features.storage());
  CHECK(a.train.target == b.train.target);
  CHECK(a.dev_out.features.storage() == b.dev_out.features.storage());

  SyntheticSpec other = small_spec();
  other.seed = 4;
  const SyntheticData c = snne::gen_synthetic(other);
  CHECK(a.train.features.storage() != c.train.features.storage());
}

TEST_CASE("in-distribution splits are centered, shifted split is displaced") {
  SyntheticSpec spec = small_spec();
  spec.n_train = 4000;
  spec.n_in = 4000;
  spec.n_out = 4000;
  spec.shift = 3.0;
  const SyntheticData d = snne::gen_synthetic(spec);

  // Standard normal columns: mean within 4 sigma / sqrt(n).
  const double bound = 4.0 / std::sqrt(4000.0);
  for (double m : column_means(d.train.features)) CHECK(std::abs(m) < bound);
  for (double m : column_means(d.dev_in.features)) CHECK(std::abs(m) < bound);

  // The out centroid sits at distance `shift` along some unit direction.
  const auto mu_out = column_means(d.dev_out.features);
  double dist = 0.0;
  for (double m : mu_out) dist += m * m;
  dist = std::sqrt(dist);
  CHECK(dist == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("shift zero makes the out split distributionally indistinct") {
  SyntheticSpec spec = small_spec();
  spec.n_out = 4000;
  spec.shift = 0.0;
  const SyntheticData d = snne::gen_synthetic(spec);
  const double bound = 4.0 / std::sqrt(4000.0);
  for (double m : column_means(d.dev_out.features)) CHECK(std::abs(m) < bound);
}

TEST_CASE("noise level only perturbs targets, never inputs") {
  SyntheticSpec spec = small_spec();
  spec.noise_sigma = 0.0;
  const SyntheticData clean = snne::gen_synthetic(spec);
  for (double t : clean.train.target) CHECK(std::isfinite(t));
  for (double t : clean.dev_out.target) CHECK(std::isfinite(t));

  SyntheticSpec noisy = spec;
  noisy.noise_sigma = 0.1;
  const SyntheticData d = snne::gen_synthetic(noisy);
  CHECK(d.train.features.storage() == clean.train.features.storage());
  CHECK(d.dev_out.features.storage() == clean.dev_out.features.storage());

  // Residuals against the zero-noise targets are the noise draws themselves.
  auto residual_std = [](const std::vector<double>& a, const std::vector<double>& b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sq / static_cast<double>(a.size()));
  };
  const double train_std = residual_std(d.train.target, clean.train.target);
  const double out_std = residual_std(d.dev_out.target, clean.dev_out.target);
  CHECK(train_std > 0.08);
  CHECK(train_std < 0.12);
  // The shifted split carries doubled noise.
  CHECK(out_std == doctest::Approx(2.0 * train_std).epsilon(0.15));
}

TEST_CASE("spec validation") {
  SyntheticSpec spec = small_spec();
  spec.dims = 0;
  CHECK_THROWS_AS(spec.validate(), snne::ContractError);
  spec = small_spec();
  spec.noise_sigma = -1.0;
  CHECK_THROWS_AS(spec.validate(), snne::ContractError);
  spec = small_spec();
  spec.n_train = 0;
  CHECK_THROWS_AS(spec.validate(), snne::ContractError);
}