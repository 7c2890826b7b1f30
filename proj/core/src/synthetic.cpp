#include "snne/synthetic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "snne/rng.hpp"

namespace snne {

void SyntheticSpec::validate() const {
  if (n_train == 0 || n_in == 0 || n_out == 0)
    throw ContractError("synthetic spec: split sizes must be positive");
  if (dims == 0) throw ContractError("synthetic spec: dims must be positive");
  if (noise_sigma < 0.0) throw ContractError("synthetic spec: negative noise");
  if (shift < 0.0) throw ContractError("synthetic spec: negative shift");
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

struct TargetFunction {
  std::vector<double> linear;
  std::vector<double> quadratic;
  std::vector<double> amplitude;
  std::vector<double> frequency;
  std::vector<double> phase;

  double operator()(const FeatureMatrix& x, std::size_t row) const {
    double y = 0.0;
    for (std::size_t d = 0; d < linear.size(); ++d) {
      const double v = x(row, d);
      y += linear[d] * v + quadratic[d] * v * v +
           amplitude[d] * std::sin(frequency[d] * v + phase[d]);
    }
    return y;
  }
};

TargetFunction draw_target_function(std::size_t dims, std::uint64_t seed) {
  Rng rng(seed);
  TargetFunction f;
  f.linear.resize(dims);
  f.quadratic.resize(dims);
  f.amplitude.resize(dims);
  f.frequency.resize(dims);
  f.phase.resize(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    f.linear[d] = 2.0 * rng.uniform() - 1.0;
    f.quadratic[d] = 2.0 * rng.uniform() - 1.0;
    f.amplitude[d] = 2.0 * rng.uniform() - 1.0;
    f.frequency[d] = 0.5 + 1.5 * rng.uniform();
    f.phase[d] = kTwoPi * rng.uniform();
  }
  return f;
}

std::vector<double> draw_unit_direction(std::size_t dims, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> u(dims);
  double norm_sq = 0.0;
  for (;;) {
    norm_sq = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      u[d] = rng.gaussian();
      norm_sq += u[d] * u[d];
    }
    if (norm_sq > 1e-12) break;
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : u) v *= inv;
  return u;
}

Dataset draw_split(std::size_t n, const SyntheticSpec& spec, const TargetFunction& f,
                   const std::vector<double>& offset, double noise_sigma,
                   SplitTag tag, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.split_tag = tag;
  data.has_target = true;
  data.features = FeatureMatrix(n, spec.dims);
  data.target.resize(n);
  for (std::size_t d = 0; d < spec.dims; ++d)
    data.feature_names.push_back("x" + std::to_string(d));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t d = 0; d < spec.dims; ++d)
      data.features(r, d) = rng.gaussian() + offset[d];
    data.target[r] = f(data.features, r) + noise_sigma * rng.gaussian();
  }
  return data;
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const TargetFunction f = draw_target_function(spec.dims, mix_seed(spec.seed, 0));
  std::vector<double> shift_vec = draw_unit_direction(spec.dims, mix_seed(spec.seed, 1));
  for (double& v : shift_vec) v *= spec.shift;
  const std::vector<double> zero(spec.dims, 0.0);

  SyntheticData out;
  out.train = draw_split(spec.n_train, spec, f, zero, spec.noise_sigma,
                         SplitTag::kTrain, mix_seed(spec.seed, 2));
  out.dev_in = draw_split(spec.n_in, spec, f, zero, spec.noise_sigma,
                          SplitTag::kDevIn, mix_seed(spec.seed, 3));
  out.dev_out = draw_split(spec.n_out, spec, f, shift_vec, 2.0 * spec.noise_sigma,
                           SplitTag::kDevOut, mix_seed(spec.seed, 4));
  return out;
}

}  // namespace snne
