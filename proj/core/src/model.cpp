#include "snne/model.hpp"

#include <cmath>
#include <string>

namespace snne {

void SnnSpec::validate() const {
  if (input_dim < 1 || hidden_dim < 1 || trunk_layers < 1 || upper_layers < 1 ||
      projection_dim < 1) {
    throw ContractError("snn spec: all dimensions must be >= 1");
  }
  if (!(alpha_dropout_rate >= 0.0 && alpha_dropout_rate < 1.0)) {
    throw ContractError("snn spec: dropout rate must be in [0, 1)");
  }
}

std::vector<Matrix*> SnnModel::parameters() {
  std::vector<Matrix*> out;
  out.reserve(2 * (trunk.size() + upper.size() + 2));
  for (DenseLayer& l : trunk) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  for (DenseLayer& l : upper) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  out.push_back(&output_head.weight);
  out.push_back(&output_head.bias);
  out.push_back(&projection_head.weight);
  out.push_back(&projection_head.bias);
  return out;
}

std::vector<const Matrix*> SnnModel::parameters() const {
  auto mutable_params = const_cast<SnnModel*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::size_t SnnModel::parameter_count() const {
  std::size_t n = 0;
  for (const Matrix* m : parameters()) n += m->size();
  return n;
}

namespace {

DenseLayer init_layer(std::size_t n_in, std::size_t n_out, Rng& rng) {
  DenseLayer l;
  l.weight = Matrix(n_in, n_out);
  l.bias = Matrix(1, n_out);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(n_in));
  for (std::size_t i = 0; i < l.weight.size(); ++i)
    l.weight.data()[i] = rng.gaussian(0.0, stddev);
  return l;
}

}  // namespace

SnnModel lecun_init(const SnnSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  SnnModel m;
  m.spec = spec;
  m.spec.seed = seed;
  m.trunk.reserve(spec.trunk_layers);
  m.trunk.push_back(init_layer(spec.input_dim, spec.hidden_dim, rng));
  for (std::size_t i = 1; i < spec.trunk_layers; ++i)
    m.trunk.push_back(init_layer(spec.hidden_dim, spec.hidden_dim, rng));
  m.upper.reserve(spec.upper_layers);
  for (std::size_t i = 0; i < spec.upper_layers; ++i)
    m.upper.push_back(init_layer(spec.hidden_dim, spec.hidden_dim, rng));
  m.output_head = init_layer(spec.hidden_dim, 2, rng);
  m.projection_head = init_layer(spec.hidden_dim, spec.projection_dim, rng);
  return m;
}

AlphaDropoutCoeffs alpha_dropout_coeffs(double rate) {
  const double p = rate;
  const double q = 1.0 - p;
  const double ap = kSeluSaturation;
  const double a = 1.0 / std::sqrt(q + ap * ap * p * q);
  const double b = -a * p * ap;
  return {a, b};
}

Matrix alpha_dropout(const Matrix& x, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ContractError("alpha_dropout: rate must be in [0, 1)");
  if (!training || rate == 0.0) return x;
  const AlphaDropoutCoeffs k = alpha_dropout_coeffs(rate);
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool keep = rng.uniform() >= rate;
    out.data()[i] = keep ? k.a * x.data()[i] + k.b
                         : k.a * kSeluSaturation + k.b;
  }
  return out;
}

namespace {

Matrix dense_selu(const Matrix& h, const DenseLayer& l) {
  Matrix z = matmul(h, l.weight);
  for (std::size_t r = 0; r < z.rows(); ++r)
    for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) = selu(z(r, c) + l.bias(0, c));
  return z;
}

Matrix dense_linear(const Matrix& h, const DenseLayer& l) {
  Matrix z = matmul(h, l.weight);
  for (std::size_t r = 0; r < z.rows(); ++r)
    for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) += l.bias(0, c);
  return z;
}

}  // namespace

ForwardOutput forward(const SnnModel& m, const Matrix& x) {
  if (x.cols() != m.spec.input_dim) {
    throw ShapeError("forward: expected " + std::to_string(m.spec.input_dim) +
                     " input columns, got " + std::to_string(x.cols()));
  }
  Matrix h = x;
  for (const DenseLayer& l : m.trunk) h = dense_selu(h, l);

  ForwardOutput out;
  out.trunk_out = h;

  out.projection = dense_linear(h, m.projection_head);
  if (m.spec.normalize_projection) {
    for (std::size_t r = 0; r < out.projection.rows(); ++r) {
      double sq = 0.0;
      for (std::size_t c = 0; c < out.projection.cols(); ++c)
        sq += out.projection(r, c) * out.projection(r, c);
      const double norm = std::max(std::sqrt(sq), 1e-12);
      for (std::size_t c = 0; c < out.projection.cols(); ++c) out.projection(r, c) /= norm;
    }
  }

  for (const DenseLayer& l : m.upper) h = dense_selu(h, l);
  const Matrix head = dense_linear(h, m.output_head);
  out.mu_std.resize(head.rows());
  out.sigma_std.resize(head.rows());
  for (std::size_t r = 0; r < head.rows(); ++r) {
    out.mu_std[r] = head(r, 0);
    out.sigma_std[r] = softplus(head(r, 1));
  }
  return out;
}

namespace {

struct TapeLayerIds {
  Tape::NodeId weight;
  Tape::NodeId bias;
};

TapeLayerIds register_layer(Tape& t, const DenseLayer& l) {
  return {t.leaf(l.weight, true), t.leaf(l.bias, true)};
}

Tape::NodeId tape_dropout(Tape& t, Tape::NodeId h, double rate, Rng& rng) {
  const Matrix& v = t.value(h);
  const AlphaDropoutCoeffs k = alpha_dropout_coeffs(rate);
  Matrix keep_scaled(v.rows(), v.cols());
  Matrix offset(v.rows(), v.cols());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const bool keep = rng.uniform() >= rate;
    keep_scaled.data()[i] = keep ? k.a : 0.0;
    offset.data()[i] = keep ? k.b : k.a * kSeluSaturation + k.b;
  }
  return t.add_const(t.hadamard_const(h, std::move(keep_scaled)), std::move(offset));
}

}  // namespace

TapeForward forward_on_tape(Tape& t, const SnnModel& m, const Matrix& x,
                            bool training, Rng* dropout_rng) {
  if (x.cols() != m.spec.input_dim) {
    throw ShapeError("forward_on_tape: expected " + std::to_string(m.spec.input_dim) +
                     " input columns, got " + std::to_string(x.cols()));
  }
  const bool drop = training && m.spec.alpha_dropout_rate > 0.0 && dropout_rng != nullptr;

  TapeForward out;
  out.params.reserve(2 * (m.trunk.size() + m.upper.size() + 2));

  Tape::NodeId h = t.leaf(x, false);
  auto dense_block = [&](Tape::NodeId in, const DenseLayer& l, bool activation) {
    const TapeLayerIds ids = register_layer(t, l);
    out.params.push_back(ids.weight);
    out.params.push_back(ids.bias);
    Tape::NodeId z = t.add_row_vector(t.matmul(in, ids.weight), ids.bias);
    if (!activation) return z;
    z = t.selu(z);
    if (drop) z = tape_dropout(t, z, m.spec.alpha_dropout_rate, *dropout_rng);
    return z;
  };

  for (const DenseLayer& l : m.trunk) h = dense_block(h, l, true);
  out.trunk_out = h;

  Tape::NodeId hu = h;
  for (const DenseLayer& l : m.upper) hu = dense_block(hu, l, true);
  const Tape::NodeId head = dense_block(hu, m.output_head, false);
  out.mu = t.column(head, 0);
  out.sigma = t.softplus(t.column(head, 1));

  Tape::NodeId proj = dense_block(h, m.projection_head, false);
  if (m.spec.normalize_projection) proj = t.row_l2_normalize(proj);
  out.projection = proj;
  return out;
}

}  // namespace snne
