// Acceptance gate: every release-blocking property, one verdict line each.
// Exit status 0 only if all pass.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "snne/activations.hpp"
#include "snne/container.hpp"
#include "snne/demo.hpp"
#include "snne/ensemble.hpp"
#include "snne/eval.hpp"
#include "snne/losses.hpp"
#include "snne/matrix.hpp"
#include "snne/model.hpp"
#include "snne/optim.hpp"
#include "snne/rng.hpp"
#include "snne/synthetic.hpp"

using snne::EnsembleModel;
using snne::Matrix;
using snne::Rng;

namespace {

bool g_all_ok = true;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void verdict(int id, const char* name, bool ok, const std::string& detail) {
  g_all_ok = g_all_ok && ok;
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

void criterion_gradients() {
  const auto t0 = std::chrono::steady_clock::now();

  snne::SnnSpec spec;
  spec.input_dim = 3;
  spec.hidden_dim = 8;
  spec.trunk_layers = 2;
  spec.upper_layers = 2;
  spec.projection_dim = 4;
  spec.seed = 7;
  snne::SnnModel model = snne::lecun_init(spec, 7);

  Rng rng(8);
  const std::size_t n = 6;
  Matrix x(n, 3);
  std::vector<double> y(n);
  const std::vector<int> ids{0, 1, 0, 1, 0, 1};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.gaussian();
    y[i] = rng.gaussian();
  }

  snne::MultitaskLoss loss_cfg;  // NLL plus contrastive, both heads active

  auto loss_value = [&]() {
    snne::Tape t;
    const auto f = snne::forward_on_tape(t, model, x, false, nullptr);
    return t.value(snne::combined_loss_node(t, loss_cfg, f.mu, f.sigma,
                                            f.projection, y, ids))(0, 0);
  };

  snne::Tape tape;
  const auto f = snne::forward_on_tape(tape, model, x, false, nullptr);
  tape.backward(snne::combined_loss_node(tape, loss_cfg, f.mu, f.sigma,
                                         f.projection, y, ids));

  const auto params = model.parameters();
  const double h = 1e-6;
  double max_rel = 0.0;
  std::size_t checked = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Matrix& analytic = tape.grad(f.params[k]);
    Matrix& p = *params[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double keep = p.data()[i];
      p.data()[i] = keep + h;
      const double up = loss_value();
      p.data()[i] = keep - h;
      const double down = loss_value();
      p.data()[i] = keep;
      const double fd = (up - down) / (2.0 * h);
      const double a = analytic.data()[i];
      const double rel =
          std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-3});
      max_rel = std::max(max_rel, rel);
      ++checked;
    }
  }

  const double secs = seconds_since(t0);
  verdict(1, "gradient check (width 8, depth 4, both heads)",
          max_rel < 1e-4 && secs < 10.0,
          fmt("max rel err %.3g over %zu params, %.2fs", max_rel, checked, secs));
}

// ---------------------------------------------------------------- criterion 2

void criterion_self_normalization() {
  const auto t0 = std::chrono::steady_clock::now();

  snne::SnnSpec spec;
  spec.input_dim = 512;
  spec.hidden_dim = 512;
  spec.trunk_layers = 12;
  spec.upper_layers = 6;
  spec.projection_dim = 128;

  double worst_mean = 0.0, var_lo = 1e300, var_hi = 0.0;
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const snne::SnnModel m = snne::lecun_init(spec, seed);
    Rng rng(seed + 500);
    Matrix h(128, 512);
    for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] = rng.gaussian();

    std::vector<const snne::DenseLayer*> layers;
    for (const auto& l : m.trunk) layers.push_back(&l);
    for (const auto& l : m.upper) layers.push_back(&l);

    for (const snne::DenseLayer* layer : layers) {
      Matrix z = snne::matmul(h, layer->weight);
      for (std::size_t r = 0; r < z.rows(); ++r)
        for (std::size_t c = 0; c < z.cols(); ++c)
          z(r, c) = snne::selu(z(r, c) + layer->bias(0, c));
      h = z;

      double mean = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) mean += h.data()[i];
      mean /= static_cast<double>(h.size());
      double var = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i)
        var += (h.data()[i] - mean) * (h.data()[i] - mean);
      var /= static_cast<double>(h.size());

      worst_mean = std::max(worst_mean, std::abs(mean));
      var_lo = std::min(var_lo, var);
      var_hi = std::max(var_hi, var);
      ok = ok && std::abs(mean) < 0.1 && var > 0.8 && var < 1.25;
    }
  }

  const double secs = seconds_since(t0);
  verdict(2, "self-normalization across 18 layers, width 512, 10 seeds",
          ok && secs < 30.0,
          fmt("worst |mean| %.4f, var range [%.3f, %.3f], %.1fs", worst_mean,
              var_lo, var_hi, secs));
}

// ---------------------------------------------------------------- criterion 3

void criterion_selu_values() {
  const double at_zero = snne::selu(0.0);
  const double at_one = snne::selu(1.0);
  const double saturation = snne::selu(-50.0);
  const bool ok = at_zero == 0.0 && at_one == 1.0507 &&
                  std::abs(saturation - (-1.7581)) < 1e-3;
  verdict(3, "selu point values",
          ok,
          fmt("selu(0)=%g selu(1)=%.6f selu(-50)=%.6f", at_zero, at_one,
              saturation));
}

// ---------------------------------------------------------------- criterion 4

void criterion_gaussian_nll() {
  Rng rng(11);
  const std::size_t n = 512;
  std::vector<double> y(n), mu(n, 0.0);
  for (auto& v : y) v = rng.gaussian(0.3, 1.4);

  const double at_truth =
      snne::gaussian_nll(y, std::vector<double>(n, 1.0), y);
  const bool constant_ok = std::abs(at_truth - 0.918939) < 1e-6;

  double msr = 0.0;
  for (double v : y) msr += v * v;
  msr /= static_cast<double>(n);

  double best_sigma_sq = 0.0, best = 1e300;
  for (int i = 0; i <= 400; ++i) {
    const double s = std::sqrt(msr) * (0.8 + 0.001 * i);
    const double nll = snne::gaussian_nll(mu, std::vector<double>(n, s), y);
    if (nll < best) {
      best = nll;
      best_sigma_sq = s * s;
    }
  }
  const double ratio = best_sigma_sq / msr;
  const bool scan_ok = std::abs(ratio - 1.0) < 0.01;

  verdict(4, "gaussian nll constant and sigma-scan minimum",
          constant_ok && scan_ok,
          fmt("nll(mu=y,sigma=1)=%.9f, argmin sigma^2 / msr = %.4f", at_truth,
              ratio));
}

// ---------------------------------------------------------------- criterion 5

double curve_area_bruteforce(const std::vector<double>& sq,
                             const std::vector<double>& unc) {
  const std::size_t n = sq.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return unc[a] < unc[b]; });
  double area = 0.0, prev = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < j; ++k) sum += sq[order[k]];
    const double mse = sum / static_cast<double>(j);
    area += 0.5 * (prev + mse) / static_cast<double>(n);
    prev = mse;
  }
  return area;
}

void criterion_retention_oracle() {
  Rng rng(12);
  double max_diff = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(100);
    std::vector<double> sq(n), unc(n);
    for (std::size_t i = 0; i < n; ++i) {
      sq[i] = 5.0 * rng.uniform();
      unc[i] = rng.uniform();
      if (i > 0 && rng.uniform() < 0.25) unc[i] = unc[i - 1];
    }
    const double area = snne::retention_curve(sq, unc).area;
    max_diff = std::max(max_diff, std::abs(area - curve_area_bruteforce(sq, unc)));
  }
  const bool oracle_ok = max_diff < 1e-12;

  bool minimal_ok = true;
  for (std::size_t n = 2; n <= 7 && minimal_ok; ++n) {
    std::vector<double> sq(n);
    for (auto& v : sq) v = 3.0 * rng.uniform();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sq[a] < sq[b]; });
    std::vector<double> best_unc(n);
    for (std::size_t r = 0; r < n; ++r)
      best_unc[order[r]] = static_cast<double>(r);
    const double best_area = snne::retention_curve(sq, best_unc).area;

    std::vector<double> perm(n);
    std::iota(perm.begin(), perm.end(), 0.0);
    do {
      if (snne::retention_curve(sq, perm).area < best_area - 1e-12) {
        minimal_ok = false;
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  verdict(5, "retention area vs brute force and permutation minimality",
          oracle_ok && minimal_ok,
          fmt("max area diff %.2e over 200 cases, minimality %s", max_diff,
              minimal_ok ? "holds to N=7" : "VIOLATED"));
}

// ---------------------------------------------------------------- criterion 6

void criterion_worked_example() {
  const snne::RetentionCurve c = snne::retention_curve({1.0, 4.0}, {0.1, 0.2});
  const bool ok = c.area == 1.125;
  verdict(6, "worked example area", ok, fmt("area = %.17g (want exactly 1.125)", c.area));
}

// ----------------------------------------------------- shared seed benchmark

struct SeedResult {
  double model_rauc = 0.0;
  double random_rauc = 0.0;
  double single_rauc = 0.0;
  double ens_mse = 0.0;
  double mean_member_mse = 0.0;
  double jensen_residual = 0.0;
  double unc_in = 0.0;
  double unc_out = 0.0;
};

struct Benchmark {
  std::vector<SeedResult> seeds;
  double secs = 0.0;
};

SeedResult run_benchmark_seed(std::uint64_t seed) {
  snne::SyntheticSpec data_spec;  // n_train 5000, dims 8, shift 3
  data_spec.seed = seed;
  const snne::SyntheticData data = snne::gen_synthetic(data_spec);

  snne::TrainConfig cfg;
  cfg.members = 5;
  cfg.batch_size = 256;
  cfg.max_epochs = 60;
  cfg.patience = 15;
  cfg.threads = 1;
  cfg.seed = seed;
  cfg.optim.learning_rate = 0.002;
  cfg.optim.grad_clip_norm = 5.0;
  cfg.model.hidden_dim = 32;
  cfg.model.trunk_layers = 3;
  cfg.model.upper_layers = 1;
  cfg.model.projection_dim = 16;

  const EnsembleModel ens =
      snne::train_ensemble(data.train.features, data.train.target, cfg);

  const auto preds_in = snne::predict(ens, data.dev_in.features);
  const auto preds_out = snne::predict(ens, data.dev_out.features);

  SeedResult r;
  for (const auto& p : preds_in) r.unc_in += p.uncertainty;
  for (const auto& p : preds_out) r.unc_out += p.uncertainty;
  r.unc_in /= static_cast<double>(preds_in.size());
  r.unc_out /= static_cast<double>(preds_out.size());

  // Pooled squared errors and uncertainties over both dev splits.
  std::vector<double> sq, unc, y_pool;
  std::vector<snne::GaussianPrediction> pooled;
  auto absorb = [&](const std::vector<snne::GaussianPrediction>& preds,
                    const std::vector<double>& y) {
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const double e = preds[i].mu - y[i];
      sq.push_back(e * e);
      unc.push_back(preds[i].uncertainty);
      y_pool.push_back(y[i]);
      pooled.push_back(preds[i]);
    }
  };
  absorb(preds_in, data.dev_in.target);
  absorb(preds_out, data.dev_out.target);

  r.model_rauc = snne::retention_curve(sq, unc).area;

  Rng shuffle_rng(snne::mix_seed(seed, 0xacce));
  double random_total = 0.0;
  std::vector<double> shuffled = unc;
  for (int rep = 0; rep < 16; ++rep) {
    shuffle_rng.shuffle(shuffled);
    random_total += snne::retention_curve(sq, shuffled).area;
  }
  r.random_rauc = random_total / 16.0;

  // Per-member predictions drive the single-member curve and the identity.
  std::vector<std::vector<snne::GaussianPrediction>> member_preds;
  for (std::size_t k = 0; k < ens.size(); ++k) {
    EnsembleModel single;
    single.pipeline = ens.pipeline;
    single.members.push_back(ens.members[k]);
    single.member_seeds.push_back(ens.member_seeds[k]);
    std::vector<snne::GaussianPrediction> mp =
        snne::predict(single, data.dev_in.features);
    const auto mo = snne::predict(single, data.dev_out.features);
    mp.insert(mp.end(), mo.begin(), mo.end());
    member_preds.push_back(std::move(mp));
  }

  {
    std::vector<double> ssq(sq.size());
    for (std::size_t i = 0; i < ssq.size(); ++i) {
      const double e = member_preds[0][i].mu - y_pool[i];
      ssq[i] = e * e;
    }
    std::vector<double> sunc(sq.size());
    for (std::size_t i = 0; i < sunc.size(); ++i)
      sunc[i] = member_preds[0][i].uncertainty;
    r.single_rauc = snne::retention_curve(ssq, sunc).area;
  }

  // mean_k (mu_k - y)^2 = (mu_bar - y)^2 + mean_k (mu_k - mu_bar)^2, row by
  // row, using the ensemble's own mu_bar.
  const double k = static_cast<double>(member_preds.size());
  double ens_mse = 0.0, member_mse = 0.0, residual_sum = 0.0;
  for (std::size_t i = 0; i < y_pool.size(); ++i) {
    const double mu_bar = pooled[i].mu;
    double row_member = 0.0, row_spread = 0.0;
    for (const auto& mp : member_preds) {
      row_member += (mp[i].mu - y_pool[i]) * (mp[i].mu - y_pool[i]);
      row_spread += (mp[i].mu - mu_bar) * (mp[i].mu - mu_bar);
    }
    row_member /= k;
    row_spread /= k;
    const double row_ens = (mu_bar - y_pool[i]) * (mu_bar - y_pool[i]);
    residual_sum += row_member - row_ens - row_spread;
    ens_mse += row_ens;
    member_mse += row_member;
  }
  const double n = static_cast<double>(y_pool.size());
  r.ens_mse = ens_mse / n;
  r.mean_member_mse = member_mse / n;
  r.jensen_residual = std::abs(residual_sum / n);
  return r;
}

Benchmark run_benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  Benchmark b;
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    b.seeds.push_back(run_benchmark_seed(seed));
  b.secs = seconds_since(t0);
  return b;
}

void criterion_uncertainty_usefulness(const Benchmark& b) {
  int wins = 0;
  double worst_ratio = 0.0;
  for (const SeedResult& r : b.seeds) {
    const double ratio = r.model_rauc / r.random_rauc;
    worst_ratio = std::max(worst_ratio, ratio);
    if (r.model_rauc <= 0.8 * r.random_rauc) ++wins;
  }
  verdict(7, "uncertainty ordering beats random by 20%", wins >= 4 && b.secs < 300.0,
          fmt("%d/5 seeds, rauc/random ratios up to %.3f, benchmark %.0fs", wins,
              worst_ratio, b.secs));
}

void criterion_ensemble_benefit(const Benchmark& b) {
  int wins = 0;
  double worst_jensen = 0.0;
  bool mse_ok = true;
  for (const SeedResult& r : b.seeds) {
    if (r.model_rauc <= r.single_rauc) ++wins;
    worst_jensen = std::max(worst_jensen, r.jensen_residual);
    mse_ok = mse_ok && r.ens_mse <= r.mean_member_mse + 1e-12;
  }
  verdict(8, "ensemble rauc <= single member and mse identity",
          wins >= 4 && worst_jensen < 1e-10 && mse_ok,
          fmt("%d/5 seeds, max identity residual %.2e", wins, worst_jensen));
}

void criterion_shift_sensitivity(const Benchmark& b) {
  int wins = 0;
  for (const SeedResult& r : b.seeds)
    if (r.unc_out > r.unc_in) ++wins;
  std::string detail = fmt("%d/5 seeds, unc in->out", wins);
  for (const SeedResult& r : b.seeds)
    detail += fmt(" %.2f->%.2f", r.unc_in, r.unc_out);
  verdict(9, "shifted split carries higher mean uncertainty", wins >= 4, detail);
}

// --------------------------------------------------------------- criterion 10

void criterion_extrapolation_demo() {
  int wins = 0;
  bool artifacts_ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::string svg = "acc_demo_" + std::to_string(seed) + ".svg";
    const snne::ExtrapolationReport r =
        snne::demo_extrapolation(seed, svg, snne::DemoGroundTruth::kCubic);
    if (r.snn_in_mse < r.linear_in_mse) ++wins;
    std::ifstream in(svg);
    std::string first;
    std::getline(in, first);
    artifacts_ok = artifacts_ok && first.rfind("<svg", 0) == 0;
    detail += fmt(" %.3f/%.3f", r.snn_in_mse, r.linear_in_mse);
  }
  verdict(10, "cubic demo: network beats linear fit in distribution",
          wins >= 4 && artifacts_ok,
          fmt("%d/5 seeds, snn/linear in-mse%s, plots %s", wins, detail.c_str(),
              artifacts_ok ? "written" : "MISSING"));
}

// --------------------------------------------------------------- criterion 11

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(SNNE_CLI_PATH) + " " + args + " > acc_cli_out.txt 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void criterion_determinism() {
  // Library side: save -> load -> identical predictions.
  snne::SyntheticSpec dspec;
  dspec.n_train = 400;
  dspec.n_in = 100;
  dspec.n_out = 100;
  dspec.dims = 3;
  dspec.seed = 21;
  const snne::SyntheticData data = snne::gen_synthetic(dspec);

  snne::TrainConfig cfg;
  cfg.members = 2;
  cfg.batch_size = 64;
  cfg.max_epochs = 8;
  cfg.patience = 8;
  cfg.threads = 1;
  cfg.coarse_class_count = 4;
  cfg.optim.learning_rate = 0.01;
  cfg.optim.grad_clip_norm = 5.0;
  cfg.model.hidden_dim = 16;
  cfg.model.trunk_layers = 2;
  cfg.model.upper_layers = 1;
  cfg.model.projection_dim = 4;
  cfg.seed = 5;

  const EnsembleModel ens =
      snne::train_ensemble(data.train.features, data.train.target, cfg);
  snne::save_ensemble(ens, "acc_model_lib.snne");
  const EnsembleModel back = snne::load_ensemble("acc_model_lib.snne");
  const auto pa = snne::predict(ens, data.dev_in.features);
  const auto pb = snne::predict(back, data.dev_in.features);
  bool reload_ok = pa.size() == pb.size();
  for (std::size_t i = 0; reload_ok && i < pa.size(); ++i)
    reload_ok = pa[i].mu == pb[i].mu && pa[i].sigma == pb[i].sigma &&
                pa[i].uncertainty == pb[i].uncertainty;

  // CLI side: two identical runs, byte-identical artifacts.
  bool cli_ok = run_cli("gen-data --spec "
                        "n_train=400,n_in=100,n_out=100,dims=3,noise=0.1,shift=3,"
                        "seed=21 --out-dir acc_gen") == 0;
  {
    std::ofstream out("acc_cfg.txt");
    out << "members = 2\nbatch_size = 64\nmax_epochs = 8\npatience = 8\n"
           "threads = 1\nlearning_rate = 0.01\ngrad_clip_norm = 5\n"
           "hidden_dim = 16\ntrunk_layers = 2\nupper_layers = 1\n"
           "projection_dim = 4\ncoarse_class_count = 4\nseed = 5\n";
  }
  cli_ok = cli_ok &&
           run_cli("train --data acc_gen/train.csv --target target "
                   "--config acc_cfg.txt --out acc_model_a.snne") == 0 &&
           run_cli("train --data acc_gen/train.csv --target target "
                   "--config acc_cfg.txt --out acc_model_b.snne") == 0 &&
           run_cli("predict --model acc_model_a.snne --data acc_gen/dev_in.csv "
                   "--out acc_preds_a.csv") == 0 &&
           run_cli("predict --model acc_model_b.snne --data acc_gen/dev_in.csv "
                   "--out acc_preds_b.csv") == 0;
  const bool bytes_ok =
      cli_ok && !slurp("acc_model_a.snne").empty() &&
      slurp("acc_model_a.snne") == slurp("acc_model_b.snne") &&
      slurp("acc_preds_a.csv") == slurp("acc_preds_b.csv");

  verdict(11, "determinism and persistence", reload_ok && bytes_ok,
          fmt("reload predictions %s, container+csv bytes %s",
              reload_ok ? "identical" : "DIFFER",
              bytes_ok ? "identical" : "DIFFER"));
}

// --------------------------------------------------------------- criterion 12

void criterion_optimizer_branches() {
  snne::OptimConfig cfg;
  cfg.learning_rate = 0.01;

  // Histories with equal first moments from step 2 on, different second
  // moments. Matching displacements while rho_t <= 4 proves the adaptive
  // buffer is unused; the first rectified step must split the trajectories.
  auto scalar = [](double v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
  };
  Matrix pa = scalar(0.0), pb = scalar(0.0);
  std::vector<Matrix*> a{&pa}, b{&pb};
  snne::RadamLookahead oa(cfg, a), ob(cfg, b);
  const Matrix g1a = scalar(1.0), g2b = scalar(0.9), zero = scalar(0.0);

  oa.radam_step(a, {&g1a});
  ob.radam_step(b, {&zero});
  bool momentum_ok = true;
  for (int t = 2; t <= 4; ++t) {
    const double ba = pa(0, 0), bb = pb(0, 0);
    oa.radam_step(a, {&zero});
    ob.radam_step(b, {t == 2 ? &g2b : &zero});
    const double da = pa(0, 0) - ba, db = pb(0, 0) - bb;
    momentum_ok = momentum_ok && std::abs(da - db) <= 1e-12 * std::abs(da);
  }
  const double ba = pa(0, 0), bb = pb(0, 0);
  oa.radam_step(a, {&zero});
  ob.radam_step(b, {&zero});
  const double da5 = pa(0, 0) - ba, db5 = pb(0, 0) - bb;
  const bool rectified_ok = std::abs(da5 - db5) > 0.05 * std::abs(da5);
  const bool rho_ok = snne::radam_rho(4, 0.999) <= 4.0 && snne::radam_rho(5, 0.999) > 4.0;

  // Lookahead: fast weights only between syncs, exact midpoint at t = 6.
  snne::OptimConfig synced;
  synced.learning_rate = 0.01;
  snne::OptimConfig open = synced;
  open.lookahead_period = 1000000;
  const double p0 = 0.7;
  Matrix pc = scalar(p0), pd = scalar(p0);
  std::vector<Matrix*> c{&pc}, d{&pd};
  snne::RadamLookahead oc(synced, c), od(open, d);
  Rng rng(31);
  bool presync_ok = true, sync_ok = false;
  for (int t = 1; t <= 12; ++t) {
    const Matrix g = scalar(rng.gaussian());
    oc.step(c, {&g});
    od.step(d, {&g});
    if (t % 6 != 0 && t < 6) presync_ok = presync_ok && pc(0, 0) == pd(0, 0);
    if (t == 6) sync_ok = pc(0, 0) == p0 + 0.5 * (pd(0, 0) - p0);
  }

  verdict(12, "optimizer branch and lookahead sync",
          momentum_ok && rectified_ok && rho_ok && presync_ok && sync_ok,
          fmt("momentum branch ignores v: %s, rectified splits: %s, "
              "midpoint sync at t=6: %s",
              momentum_ok ? "yes" : "NO", rectified_ok ? "yes" : "NO",
              sync_ok ? "exact" : "NO"));
}

}  // namespace

int main() {
  criterion_gradients();
  criterion_self_normalization();
  criterion_selu_values();
  criterion_gaussian_nll();
  criterion_retention_oracle();
  criterion_worked_example();

  const Benchmark bench = run_benchmark();
  criterion_uncertainty_usefulness(bench);
  criterion_ensemble_benefit(bench);
  criterion_shift_sensitivity(bench);

  criterion_extrapolation_demo();
  criterion_determinism();
  criterion_optimizer_branches();

  std::printf("%s\n", g_all_ok ? "all criteria passed" : "CRITERIA FAILED");
  return g_all_ok ? 0 : 1;
}