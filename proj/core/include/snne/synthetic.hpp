#ifndef SNNE_SYNTHETIC_HPP
#define SNNE_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>

#include "snne/dataset.hpp"

namespace snne {

// Standard-normal inputs with a smooth nonlinear target (random low-order
// polynomial plus per-dimension sinusoids). The out split is shifted by
// `shift` along a fixed random unit direction and carries doubled noise, so
// it is both off-manifold and harder.
struct SyntheticSpec {
  std::size_t n_train = 5000;
  std::size_t n_in = 1000;
  std::size_t n_out = 1000;
  std::size_t dims = 8;
  double noise_sigma = 0.1;
  double shift = 3.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  Dataset train;
  Dataset dev_in;
  Dataset dev_out;
};

// Deterministic per seed; the target function and shift direction are shared
// across the three splits.
SyntheticData gen_synthetic(const SyntheticSpec& spec);

}  // namespace snne

#endif  // SNNE_SYNTHETIC_HPP
