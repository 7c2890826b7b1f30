#include "snne/optim.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace snne {

namespace {

void check_aligned(const std::vector<Matrix>& state, const std::vector<Matrix*>& params) {
  if (state.size() != params.size())
    throw ShapeError("optimizer: parameter count changed since construction");
  for (std::size_t i = 0; i < state.size(); ++i)
    if (!state[i].same_shape(*params[i]))
      throw ShapeError("optimizer: parameter " + std::to_string(i) + " changed shape");
}

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw IoError("optimizer state: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& os, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  write_u64(os, bits);
}

double read_f64(std::istream& is) {
  const std::uint64_t bits = read_u64(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  write_u64(os, m.rows());
  write_u64(os, m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) write_f64(os, m.data()[i]);
}

Matrix read_matrix(std::istream& is) {
  const std::size_t rows = static_cast<std::size_t>(read_u64(is));
  const std::size_t cols = static_cast<std::size_t>(read_u64(is));
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = read_f64(is);
  return m;
}

}  // namespace

void OptimConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ContractError("optimizer: learning rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ContractError("optimizer: betas must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ContractError("optimizer: epsilon must be > 0");
  if (lookahead_period < 1) throw ContractError("optimizer: sync period must be >= 1");
  if (!(lookahead_step > 0.0 && lookahead_step <= 1.0))
    throw ContractError("optimizer: slow step size must be in (0, 1]");
  if (grad_clip_norm < 0.0) throw ContractError("optimizer: clip norm must be >= 0");
}

double radam_rho_inf(double beta2) { return 2.0 / (1.0 - beta2) - 1.0; }

double radam_rho(std::uint64_t t, double beta2) {
  const double bt = std::pow(beta2, static_cast<double>(t));
  return radam_rho_inf(beta2) - 2.0 * static_cast<double>(t) * bt / (1.0 - bt);
}

RadamLookahead::RadamLookahead(OptimConfig cfg, const std::vector<Matrix*>& params)
    : cfg_(cfg) {
  cfg_.validate();
  first_moment_.reserve(params.size());
  second_moment_.reserve(params.size());
  slow_weights_.reserve(params.size());
  for (const Matrix* p : params) {
    first_moment_.emplace_back(p->rows(), p->cols());
    second_moment_.emplace_back(p->rows(), p->cols());
    slow_weights_.push_back(*p);
  }
}

void RadamLookahead::radam_step(const std::vector<Matrix*>& params,
                                const std::vector<const Matrix*>& grads) {
  check_aligned(first_moment_, params);
  if (grads.size() != params.size())
    throw ShapeError("optimizer: gradient list does not match parameters");

  double clip_factor = 1.0;
  if (cfg_.grad_clip_norm > 0.0) {
    double sq = 0.0;
    for (const Matrix* g : grads)
      for (std::size_t i = 0; i < g->size(); ++i) sq += g->data()[i] * g->data()[i];
    const double norm = std::sqrt(sq);
    if (norm > cfg_.grad_clip_norm) clip_factor = cfg_.grad_clip_norm / norm;
  }

  ++t_;
  const double t = static_cast<double>(t_);
  const double bias1 = 1.0 - std::pow(cfg_.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg_.beta2, t);
  const double rho_inf = radam_rho_inf(cfg_.beta2);
  const double rho_t = radam_rho(t_, cfg_.beta2);
  const bool rectified = rho_t > 4.0;
  double rect = 0.0;
  if (rectified) {
    rect = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) /
                     ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
  }

  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& p = *params[k];
    Matrix& m = first_moment_[k];
    Matrix& v = second_moment_[k];
    const Matrix& g = *grads[k];
    if (!p.same_shape(g)) throw ShapeError("optimizer: gradient shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g.data()[i] * clip_factor;
      m.data()[i] = cfg_.beta1 * m.data()[i] + (1.0 - cfg_.beta1) * gi;
      v.data()[i] = cfg_.beta2 * v.data()[i] + (1.0 - cfg_.beta2) * gi * gi;
      const double m_hat = m.data()[i] / bias1;
      if (rectified) {
        const double v_hat = std::sqrt(v.data()[i] / bias2);
        p.data()[i] -= cfg_.learning_rate * rect * m_hat / (v_hat + cfg_.epsilon);
      } else {
        // Variance horizon too short: plain momentum step, second moment
        // buffers deliberately unused.
        p.data()[i] -= cfg_.learning_rate * m_hat;
      }
    }
  }
}

void RadamLookahead::lookahead_sync(const std::vector<Matrix*>& params) {
  check_aligned(slow_weights_, params);
  if (t_ == 0 || t_ % cfg_.lookahead_period != 0) return;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& fast = *params[k];
    Matrix& slow = slow_weights_[k];
    for (std::size_t i = 0; i < fast.size(); ++i) {
      slow.data()[i] += cfg_.lookahead_step * (fast.data()[i] - slow.data()[i]);
      fast.data()[i] = slow.data()[i];
    }
  }
}

void RadamLookahead::save(std::ostream& os) const {
  write_f64(os, cfg_.learning_rate);
  write_f64(os, cfg_.beta1);
  write_f64(os, cfg_.beta2);
  write_f64(os, cfg_.epsilon);
  write_u64(os, cfg_.lookahead_period);
  write_f64(os, cfg_.lookahead_step);
  write_f64(os, cfg_.grad_clip_norm);
  write_u64(os, t_);
  write_u64(os, first_moment_.size());
  for (std::size_t k = 0; k < first_moment_.size(); ++k) {
    write_matrix(os, first_moment_[k]);
    write_matrix(os, second_moment_[k]);
    write_matrix(os, slow_weights_[k]);
  }
}

RadamLookahead RadamLookahead::load(std::istream& is) {
  RadamLookahead s;
  s.cfg_.learning_rate = read_f64(is);
  s.cfg_.beta1 = read_f64(is);
  s.cfg_.beta2 = read_f64(is);
  s.cfg_.epsilon = read_f64(is);
  s.cfg_.lookahead_period = static_cast<std::size_t>(read_u64(is));
  s.cfg_.lookahead_step = read_f64(is);
  s.cfg_.grad_clip_norm = read_f64(is);
  s.t_ = read_u64(is);
  const std::size_t count = static_cast<std::size_t>(read_u64(is));
  s.first_moment_.reserve(count);
  s.second_moment_.reserve(count);
  s.slow_weights_.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    s.first_moment_.push_back(read_matrix(is));
    s.second_moment_.push_back(read_matrix(is));
    s.slow_weights_.push_back(read_matrix(is));
  }
  return s;
}

bool RadamLookahead::state_equals(const RadamLookahead& other) const {
  auto matrices_equal = [](const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].same_shape(b[k])) return false;
      if (std::memcmp(a[k].data(), b[k].data(), a[k].size() * sizeof(double)) != 0)
        return false;
    }
    return true;
  };
  return t_ == other.t_ && matrices_equal(first_moment_, other.first_moment_) &&
         matrices_equal(second_moment_, other.second_moment_) &&
         matrices_equal(slow_weights_, other.slow_weights_);
}

}  // namespace snne
