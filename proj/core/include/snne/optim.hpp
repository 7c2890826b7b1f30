#ifndef SNNE_OPTIM_HPP
#define SNNE_OPTIM_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "snne/matrix.hpp"

namespace snne {

struct OptimConfig {
  double learning_rate = 0.0003;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t lookahead_period = 6;   // sync every k fast steps
  double lookahead_step = 0.5;        // slow-weights step size
  double grad_clip_norm = 0.0;        // 0 disables clipping

  void validate() const;
};

// Variance-rectification horizon rho_t; the adaptive branch is taken only
// when it exceeds 4.
double radam_rho(std::uint64_t t, double beta2);
double radam_rho_inf(double beta2);

// Rectified Adam with Lookahead slow/fast weight averaging. One state per
// model; the parameter list passed to each call must match the registration
// order and shapes.
class RadamLookahead {
 public:
  RadamLookahead(OptimConfig cfg, const std::vector<Matrix*>& params);

  // Moment update plus either the rectified adaptive step (rho_t > 4) or the
  // plain momentum step. Increments t.
  void radam_step(const std::vector<Matrix*>& params,
                  const std::vector<const Matrix*>& grads);

  // Call after every fast step; no-op except when t is a multiple of the
  // sync period, where slow += alpha * (fast - slow) and fast snaps to slow.
  void lookahead_sync(const std::vector<Matrix*>& params);

  void step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads) {
    radam_step(params, grads);
    lookahead_sync(params);
  }

  std::uint64_t step_count() const { return t_; }
  const OptimConfig& config() const { return cfg_; }

  // Checkpoint support; round-trips bit-exactly.
  void save(std::ostream& os) const;
  static RadamLookahead load(std::istream& is);

  bool state_equals(const RadamLookahead& other) const;

 private:
  RadamLookahead() = default;

  OptimConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<Matrix> first_moment_;
  std::vector<Matrix> second_moment_;
  std::vector<Matrix> slow_weights_;
};

}  // namespace snne

#endif  // SNNE_OPTIM_HPP
