#include "snne/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

namespace snne {

void TrainConfig::validate() const {
  if (members < 1) throw ContractError("train config: need at least one member");
  if (batch_size < 1) throw ContractError("train config: batch size must be >= 1");
  if (max_epochs < 1) throw ContractError("train config: max epochs must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw ContractError("train config: validation fraction must be in (0, 1)");
  if (coarse_class_count < 2)
    throw ContractError("train config: coarse class count must be >= 2");
  loss.validate();
  optim.validate();
}

SplitIndices stratified_split(const std::vector<int>& classes, double fraction,
                              std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ContractError("stratified_split: fraction must be in (0, 1)");
  if (classes.empty()) throw ContractError("stratified_split: empty class vector");

  int max_class = 0;
  for (int c : classes) max_class = std::max(max_class, c);
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(max_class) + 1);
  for (std::size_t i = 0; i < classes.size(); ++i)
    by_class[static_cast<std::size_t>(classes[i])].push_back(i);

  Rng rng(seed);
  SplitIndices out;
  for (auto& members : by_class) {
    if (members.empty()) continue;
    if (members.size() == 1) {
      out.train.push_back(members[0]);
      continue;
    }
    rng.shuffle(members);
    const std::size_t n_val = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i < n_val)
        out.validation.push_back(members[i]);
      else
        out.train.push_back(members[i]);
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  return out;
}

namespace {

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& idx,
                   std::size_t begin, std::size_t end) {
  Matrix out(end - begin, src.cols());
  for (std::size_t r = begin; r < end; ++r)
    for (std::size_t c = 0; c < src.cols(); ++c) out(r - begin, c) = src(idx[r], c);
  return out;
}

template <typename T>
std::vector<T> gather(const std::vector<T>& src, const std::vector<std::size_t>& idx,
                      std::size_t begin, std::size_t end) {
  std::vector<T> out;
  out.reserve(end - begin);
  for (std::size_t r = begin; r < end; ++r) out.push_back(src[idx[r]]);
  return out;
}

// Validation NLL in standardized space, evaluated in chunks so memory stays
// bounded by the batch size.
double validation_nll(const SnnModel& m, const Matrix& z, const std::vector<double>& y_std,
                      const std::vector<std::size_t>& idx, std::size_t chunk) {
  double total = 0.0;
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  for (std::size_t begin = 0; begin < idx.size(); begin += chunk) {
    const std::size_t end = std::min(idx.size(), begin + chunk);
    const Matrix batch = gather_rows(z, idx, begin, end);
    const ForwardOutput out = forward(m, batch);
    for (std::size_t i = 0; i < out.mu_std.size(); ++i) {
      const double r = y_std[idx[begin + i]] - out.mu_std[i];
      const double s = out.sigma_std[i];
      total += kHalfLog2Pi + std::log(s) + r * r / (2.0 * s * s);
    }
  }
  return total / static_cast<double>(idx.size());
}

struct MemberOutcome {
  SnnModel model;
  MemberReport report;
};

MemberOutcome train_member(const Matrix& z, const std::vector<double>& y_std,
                           const std::vector<int>& classes, const TrainConfig& cfg,
                           std::uint64_t member_seed, const ProgressFn& progress,
                           std::mutex& progress_mutex, std::size_t member_index) {
  MemberOutcome out;
  out.report.seed = member_seed;

  const SplitIndices split =
      stratified_split(classes, cfg.validation_fraction, mix_seed(member_seed, 1));

  SnnSpec spec = cfg.model;
  spec.input_dim = z.cols();
  out.model = lecun_init(spec, member_seed);
  SnnModel& model = out.model;

  std::vector<Matrix*> params = model.parameters();
  RadamLookahead opt(cfg.optim, params);
  Rng loop_rng(mix_seed(member_seed, 2));

  std::vector<Matrix> best_weights;
  auto snapshot = [&]() {
    best_weights.clear();
    for (const Matrix* p : params) best_weights.push_back(*p);
  };
  snapshot();

  std::vector<std::size_t> order = split.train;
  std::size_t epochs_since_best = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    loop_rng.shuffle(order);
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const Matrix batch_x = gather_rows(z, order, begin, end);
      const std::vector<double> batch_y = gather(y_std, order, begin, end);
      const std::vector<int> batch_c = gather(classes, order, begin, end);

      Tape tape;
      const TapeForward fwd = forward_on_tape(tape, model, batch_x, true, &loop_rng);
      const Tape::NodeId loss =
          combined_loss_node(tape, cfg.loss, fwd.mu, fwd.sigma, fwd.projection,
                             batch_y, batch_c);
      const double loss_value = tape.value(loss)(0, 0);
      if (!std::isfinite(loss_value)) {
        out.report.aborted = true;
        out.report.abort_reason = "non-finite training loss at epoch " +
                                  std::to_string(epoch);
        return out;
      }
      tape.backward(loss);

      std::vector<const Matrix*> grads;
      grads.reserve(fwd.params.size());
      for (Tape::NodeId id : fwd.params) grads.push_back(&tape.grad(id));
      opt.step(params, grads);
    }

    const double val_nll =
        validation_nll(model, z, y_std, split.validation, cfg.batch_size);
    out.report.val_nll_history.push_back(val_nll);
    if (!std::isfinite(val_nll)) {
      out.report.aborted = true;
      out.report.abort_reason = "non-finite validation loss at epoch " +
                                std::to_string(epoch);
      return out;
    }

    if (val_nll < out.report.best_val_nll) {
      out.report.best_val_nll = val_nll;
      out.report.best_epoch = epoch;
      epochs_since_best = 0;
      snapshot();
    } else {
      ++epochs_since_best;
      if (epochs_since_best > cfg.patience) break;
    }
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress("member " + std::to_string(member_index + 1) + " epoch " +
               std::to_string(epoch) + " val_nll " + std::to_string(val_nll));
    }
  }

  for (std::size_t k = 0; k < params.size(); ++k) *params[k] = best_weights[k];
  return out;
}

}  // namespace

EnsembleModel train_ensemble(const FeatureMatrix& x, const std::vector<double>& y,
                             const TrainConfig& cfg, TrainReport* report,
                             const ProgressFn& progress) {
  cfg.validate();
  if (x.rows() != y.size()) throw ShapeError("train_ensemble: target not aligned with rows");
  if (x.empty()) throw ContractError("train_ensemble: empty training data");

  EnsembleModel ens;
  ens.pipeline = fit_pipeline(x, y, cfg.preprocess);
  const Matrix z = transform_features(ens.pipeline, x);
  const std::vector<double> y_std = transform_target(ens.pipeline, y);
  const std::vector<int> classes = coarse_classes(y, cfg.coarse_class_count);

  std::vector<std::uint64_t> seeds(cfg.members);
  for (std::size_t i = 0; i < cfg.members; ++i) seeds[i] = mix_seed(cfg.seed, i);

  std::vector<MemberOutcome> outcomes(cfg.members);
  std::mutex progress_mutex;

  std::size_t n_threads = cfg.threads == 0
                              ? std::max<std::size_t>(1, std::thread::hardware_concurrency())
                              : cfg.threads;
  n_threads = std::min(n_threads, cfg.members);

  if (n_threads <= 1) {
    for (std::size_t i = 0; i < cfg.members; ++i)
      outcomes[i] = train_member(z, y_std, classes, cfg, seeds[i], progress,
                                 progress_mutex, i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cfg.members) return;
        outcomes[i] = train_member(z, y_std, classes, cfg, seeds[i], progress,
                                   progress_mutex, i);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::size_t aborted = 0;
  for (std::size_t i = 0; i < cfg.members; ++i) {
    if (report) report->members.push_back(outcomes[i].report);
    if (outcomes[i].report.aborted) {
      ++aborted;
      continue;
    }
    ens.members.push_back(std::move(outcomes[i].model));
    ens.member_seeds.push_back(seeds[i]);
  }
  if (aborted * 4 > cfg.members) {
    throw ContractError("train_ensemble: " + std::to_string(aborted) + " of " +
                        std::to_string(cfg.members) + " members aborted");
  }
  return ens;
}

std::vector<GaussianPrediction> predict(const EnsembleModel& ens, const FeatureMatrix& x) {
  if (ens.members.empty()) throw ContractError("predict: ensemble has no members");
  const Matrix z = transform_features(ens.pipeline, x);
  const std::size_t n = z.rows();
  const std::size_t m = ens.members.size();

  std::vector<std::vector<double>> mu(m), sigma(m);
  for (std::size_t k = 0; k < m; ++k) {
    ForwardOutput out = forward(ens.members[k], z);
    mu[k] = std::move(out.mu_std);
    sigma[k] = std::move(out.sigma_std);
  }

  std::vector<GaussianPrediction> preds(n);
  const double s = ens.pipeline.target_scale;
  for (std::size_t i = 0; i < n; ++i) {
    double mu_bar = 0.0;
    for (std::size_t k = 0; k < m; ++k) mu_bar += mu[k][i];
    mu_bar /= static_cast<double>(m);
    double aleatoric = 0.0, epistemic = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      aleatoric += sigma[k][i] * sigma[k][i];
      epistemic += (mu[k][i] - mu_bar) * (mu[k][i] - mu_bar);
    }
    aleatoric /= static_cast<double>(m);
    epistemic /= static_cast<double>(m);
    const double total_var = aleatoric + epistemic;
    preds[i].mu = mu_bar * s + ens.pipeline.target_mean;
    preds[i].sigma = std::sqrt(total_var) * s;
    preds[i].uncertainty = total_var * s * s;
  }
  return preds;
}

}  // namespace snne
