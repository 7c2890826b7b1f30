#include "snne/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace snne {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2*pi)

// Positive sets per anchor: indices of same-class rows, self excluded.
std::vector<std::vector<std::size_t>> positive_sets(const std::vector<int>& ids) {
  const std::size_t n = ids.size();
  std::vector<std::vector<std::size_t>> pos(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && ids[j] == ids[i]) pos[i].push_back(j);
  return pos;
}
}  // namespace

AuxKind aux_kind_from_string(const std::string& s) {
  if (s == "contrastive") return AuxKind::kContrastive;
  if (s == "crossentropy") return AuxKind::kCrossentropy;
  if (s == "none") return AuxKind::kNone;
  throw ContractError("unknown aux loss kind: " + s);
}

const char* aux_kind_name(AuxKind k) {
  switch (k) {
    case AuxKind::kContrastive: return "contrastive";
    case AuxKind::kCrossentropy: return "crossentropy";
    case AuxKind::kNone: return "none";
  }
  return "unknown";
}

void MultitaskLoss::validate() const {
  if (nll_weight < 0.0 || aux_weight < 0.0)
    throw ContractError("loss weights must be >= 0");
  if (contrastive_temperature <= 0.0)
    throw ContractError("contrastive temperature must be > 0");
}

double gaussian_nll(const std::vector<double>& mu, const std::vector<double>& sigma,
                    const std::vector<double>& y) {
  if (mu.size() != sigma.size() || mu.size() != y.size())
    throw ShapeError("gaussian_nll: length mismatch");
  if (mu.empty()) throw ContractError("gaussian_nll: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(sigma[i] > 0.0)) throw ContractError("gaussian_nll: sigma must be positive");
    const double r = y[i] - mu[i];
    total += kHalfLog2Pi + std::log(sigma[i]) + r * r / (2.0 * sigma[i] * sigma[i]);
  }
  return total / static_cast<double>(mu.size());
}

double npairs_contrastive(const Matrix& z, const std::vector<int>& ids, double tau) {
  if (ids.size() != z.rows()) throw ShapeError("npairs_contrastive: one class id per row");
  if (!(tau > 0.0)) throw ContractError("npairs_contrastive: tau must be > 0");
  const std::size_t n = z.rows();
  const auto pos = positive_sets(ids);

  const Matrix sim = matmul_nt(z, z);
  double total = 0.0;
  std::size_t anchors = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (pos[i].empty()) continue;
    ++anchors;
    double denom = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      if (a != i) denom += std::exp(sim(i, a) / tau);
    double mean_pos = 0.0;
    for (std::size_t p : pos[i]) mean_pos += sim(i, p) / tau;
    mean_pos /= static_cast<double>(pos[i].size());
    total += std::log(denom) - mean_pos;
  }
  return anchors == 0 ? 0.0 : total / static_cast<double>(anchors);
}

double crossentropy(const Matrix& logits, const std::vector<int>& ids) {
  if (ids.size() != logits.rows()) throw ShapeError("crossentropy: one class id per row");
  if (logits.rows() == 0) throw ContractError("crossentropy: empty batch");
  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    if (ids[r] < 0 || static_cast<std::size_t>(ids[r]) >= logits.cols())
      throw ContractError("crossentropy: class id out of range");
    double mx = logits(r, 0);
    for (std::size_t c = 1; c < logits.cols(); ++c) mx = std::max(mx, logits(r, c));
    double denom = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) denom += std::exp(logits(r, c) - mx);
    total += mx + std::log(denom) - logits(r, static_cast<std::size_t>(ids[r]));
  }
  return total / static_cast<double>(logits.rows());
}

double combined_loss(const MultitaskLoss& cfg, const std::vector<double>& mu,
                     const std::vector<double>& sigma, const std::vector<double>& y,
                     const Matrix& projections, const std::vector<int>& class_ids) {
  cfg.validate();
  double loss = cfg.nll_weight * gaussian_nll(mu, sigma, y);
  if (cfg.aux_kind == AuxKind::kNone || cfg.aux_weight == 0.0) return loss;
  const double aux =
      cfg.aux_kind == AuxKind::kContrastive
          ? npairs_contrastive(projections, class_ids, cfg.contrastive_temperature)
          : crossentropy(projections, class_ids);
  return loss + cfg.aux_weight * aux;
}

Tape::NodeId gaussian_nll_node(Tape& t, Tape::NodeId mu, Tape::NodeId sigma,
                               const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (t.value(mu).rows() != n || t.value(sigma).rows() != n)
    throw ShapeError("gaussian_nll_node: length mismatch");
  Tape::NodeId yc = t.leaf(Matrix(n, 1, std::vector<double>(y)));
  Tape::NodeId sq_resid = t.square(t.sub(yc, mu));
  Tape::NodeId denom = t.scale(t.square(sigma), 2.0);
  Tape::NodeId per_row = t.add(t.log(sigma), t.div(sq_resid, denom));
  return t.mean_all(t.add_scalar(per_row, kHalfLog2Pi));
}

Tape::NodeId npairs_contrastive_node(Tape& t, Tape::NodeId z,
                                     const std::vector<int>& ids, double tau) {
  const std::size_t n = t.value(z).rows();
  if (ids.size() != n) throw ShapeError("npairs_contrastive_node: one class id per row");
  const auto pos = positive_sets(ids);
  std::size_t anchors = 0;
  for (const auto& ps : pos)
    if (!ps.empty()) ++anchors;
  if (anchors == 0) return t.leaf(Matrix(1, 1));  // constant zero, no gradient

  const double inv_anchors = 1.0 / static_cast<double>(anchors);
  Matrix offdiag(n, n);
  Matrix pos_weights(n, n);
  Matrix anchor_weights(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) offdiag(i, j) = (i == j) ? 0.0 : 1.0;
    if (pos[i].empty()) continue;
    anchor_weights(i, 0) = inv_anchors;
    const double w = inv_anchors / static_cast<double>(pos[i].size());
    for (std::size_t p : pos[i]) pos_weights(i, p) = w;
  }

  Tape::NodeId sim = t.scale(t.matmul_nt(z, z), 1.0 / tau);
  Tape::NodeId denom = t.row_sum(t.hadamard_const(t.exp(sim), std::move(offdiag)));
  Tape::NodeId anchor_term =
      t.sum_all(t.hadamard_const(t.log(denom), std::move(anchor_weights)));
  Tape::NodeId pos_term = t.sum_all(t.hadamard_const(sim, std::move(pos_weights)));
  return t.sub(anchor_term, pos_term);
}

Tape::NodeId crossentropy_node(Tape& t, Tape::NodeId logits,
                               const std::vector<int>& ids) {
  return t.softmax_crossentropy(logits, ids);
}

Tape::NodeId combined_loss_node(Tape& t, const MultitaskLoss& cfg, Tape::NodeId mu,
                                Tape::NodeId sigma, Tape::NodeId projections,
                                const std::vector<double>& y,
                                const std::vector<int>& class_ids) {
  cfg.validate();
  Tape::NodeId loss = t.scale(gaussian_nll_node(t, mu, sigma, y), cfg.nll_weight);
  if (cfg.aux_kind == AuxKind::kNone || cfg.aux_weight == 0.0) return loss;
  Tape::NodeId aux =
      cfg.aux_kind == AuxKind::kContrastive
          ? npairs_contrastive_node(t, projections, class_ids, cfg.contrastive_temperature)
          : crossentropy_node(t, projections, class_ids);
  return t.add(loss, t.scale(aux, cfg.aux_weight));
}

}  // namespace snne
