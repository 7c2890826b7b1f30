#ifndef SNNE_MODEL_HPP
#define SNNE_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "snne/activations.hpp"
#include "snne/matrix.hpp"
#include "snne/rng.hpp"
#include "snne/tape.hpp"

namespace snne {

// Feed-forward self-normalizing network with two heads hanging off the same
// trunk: a low-dimensional projection after `trunk_layers` hidden layers and
// a Gaussian (mu, sigma) head after `trunk_layers + upper_layers`.
struct SnnSpec {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 512;
  std::size_t trunk_layers = 12;
  std::size_t upper_layers = 6;
  std::size_t projection_dim = 128;
  // Off for the crossentropy auxiliary variant, where the head carries class
  // logits instead of unit-norm embeddings.
  bool normalize_projection = true;
  double alpha_dropout_rate = 0.0003;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DenseLayer {
  Matrix weight;  // in x out
  Matrix bias;    // 1 x out
};

struct SnnModel {
  SnnSpec spec;
  std::vector<DenseLayer> trunk;
  std::vector<DenseLayer> upper;
  DenseLayer output_head;      // hidden -> 2 (mu~, sigma~)
  DenseLayer projection_head;  // hidden -> projection_dim

  // All trainable matrices in a fixed order (each layer's weight then bias).
  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
  std::size_t parameter_count() const;
};

// Weights ~ N(0, 1/n_in), biases zero, reproducible per seed.
SnnModel lecun_init(const SnnSpec& spec, std::uint64_t seed);

// Mean/variance-preserving affine correction applied after units are dropped
// to the SELU saturation value: out = a*(x*d + alpha'*(1-d)) + b.
struct AlphaDropoutCoeffs {
  double a;
  double b;
};
AlphaDropoutCoeffs alpha_dropout_coeffs(double rate);

// Inference mode returns x untouched. Training mode drops each unit with
// probability `rate`.
Matrix alpha_dropout(const Matrix& x, double rate, bool training, Rng& rng);

struct ForwardOutput {
  std::vector<double> mu_std;     // standardized-target mean per row
  std::vector<double> sigma_std;  // softplus'd, strictly positive
  Matrix projection;
  Matrix trunk_out;
};

// Deterministic inference pass (no dropout, no cross-row coupling).
ForwardOutput forward(const SnnModel& m, const Matrix& x);

struct TapeForward {
  Tape::NodeId mu = -1;          // N x 1
  Tape::NodeId sigma = -1;       // N x 1, softplus'd
  Tape::NodeId projection = -1;  // N x projection_dim
  Tape::NodeId trunk_out = -1;
  std::vector<Tape::NodeId> params;  // aligned with SnnModel::parameters()
};

// Training/inference pass recorded on a tape. With `training` set and a
// dropout rng provided, alpha-dropout masks are sampled after every hidden
// SELU; gradients flow through the masked affine map.
TapeForward forward_on_tape(Tape& tape, const SnnModel& m, const Matrix& x,
                            bool training, Rng* dropout_rng);

}  // namespace snne

#endif  // SNNE_MODEL_HPP
