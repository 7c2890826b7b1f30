#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "snne/eval.hpp"
#include "snne/rng.hpp"

using snne::RetentionCurve;
using snne::Rng;

namespace {

// Quadratic-time transcription: resort, prefix means, trapezoids.
double area_oracle(std::vector<double> sq, const std::vector<double>& unc) {
  const std::size_t n = sq.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return unc[a] < unc[b]; });
  double area = 0.0;
  double prev_mse = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < j; ++k) sum += sq[order[k]];
    const double mse = sum / static_cast<double>(j);
    area += 0.5 * (prev_mse + mse) / static_cast<double>(n);
    prev_mse = mse;
  }
  return area;
}

}  // namespace

TEST_CASE("two-point worked example") {
  const RetentionCurve c = snne::retention_curve({1.0, 4.0}, {0.1, 0.2});
  REQUIRE(c.size() == 3);
  CHECK(c.retention[0] == 0.0);
  CHECK(c.retention[1] == 0.5);
  CHECK(c.retention[2] == 1.0);
  CHECK(c.mse[0] == 0.0);
  CHECK(c.mse[1] == 1.0);
  CHECK(c.mse[2] == 2.5);
  CHECK(c.area == 1.125);
}

TEST_CASE("zero errors give a flat curve with zero area") {
  const RetentionCurve c = snne::retention_curve({0.0, 0.0, 0.0}, {3.0, 1.0, 2.0});
  for (double m : c.mse) CHECK(m == 0.0);
  CHECK(c.area == 0.0);
  CHECK(c.retention.front() == 0.0);
  CHECK(c.retention.back() == 1.0);
}

TEST_CASE("area matches the quadratic oracle on random inputs") {
  Rng rng(81);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(100);
    std::vector<double> sq(n), unc(n);
    for (std::size_t i = 0; i < n; ++i) {
      sq[i] = rng.uniform() * 5.0;
      unc[i] = rng.uniform();
      if (rng.uniform() < 0.2 && i > 0) unc[i] = unc[i - 1];  // force ties
    }
    const RetentionCurve c = snne::retention_curve(sq, unc);
    CHECK(std::abs(c.area - area_oracle(sq, unc)) < 1e-12);
    REQUIRE(c.size() == n + 1);
    for (std::size_t j = 0; j + 1 < c.size(); ++j)
      CHECK(c.retention[j] < c.retention[j + 1]);
  }
}

TEST_CASE("ordering by true error minimizes area over all permutations") {
  Rng rng(82);
  for (std::size_t n = 2; n <= 7; ++n) {
    std::vector<double> sq(n);
    for (auto& v : sq) v = rng.uniform() * 3.0;

    // Uncertainty = rank of the true error.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sq[a] < sq[b]; });
    std::vector<double> oracle_unc(n);
    for (std::size_t r = 0; r < n; ++r)
      oracle_unc[order[r]] = static_cast<double>(r);
    const double oracle_area = snne::retention_curve(sq, oracle_unc).area;

    std::vector<double> perm(n);
    std::iota(perm.begin(), perm.end(), 0.0);
    do {
      const double area = snne::retention_curve(sq, perm).area;
      CHECK(area >= oracle_area - 1e-12);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("curve depends on uncertainty order only") {
  Rng rng(83);
  const std::size_t n = 40;
  std::vector<double> sq(n), unc(n);
  for (std::size_t i = 0; i < n; ++i) {
    sq[i] = rng.uniform() * 2.0;
    unc[i] = rng.uniform() * 5.0;
  }
  std::vector<double> warped(n);
  for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(unc[i]) + 7.0;
  const RetentionCurve a = snne::retention_curve(sq, unc);
  const RetentionCurve b = snne::retention_curve(sq, warped);
  CHECK(a.area == b.area);
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(a.mse[j] == b.mse[j]);
}

TEST_CASE("full retention recovers the plain mse and ties keep input order") {
  Rng rng(84);
  const std::size_t n = 30;
  std::vector<double> sq(n);
  double mean = 0.0;
  for (auto& v : sq) {
    v = rng.uniform() * 4.0;
    mean += v;
  }
  mean /= static_cast<double>(n);
  const RetentionCurve c = snne::retention_curve(sq, std::vector<double>(n, 1.0));
  CHECK(c.mse.back() == doctest::Approx(mean).epsilon(1e-12));

  // All-tied uncertainties: prefix means follow the input order.
  CHECK(c.mse[1] == sq[0]);
  CHECK(c.mse[2] == doctest::Approx(0.5 * (sq[0] + sq[1])).epsilon(1e-12));
}

TEST_CASE("retention curve input contracts") {
  CHECK_THROWS_AS(snne::retention_curve({}, {}), snne::ContractError);
  CHECK_THROWS_AS(snne::retention_curve({1.0}, {1.0, 2.0}), snne::ShapeError);
}

TEST_CASE("prediction wrapper squares residuals") {
  std::vector<snne::GaussianPrediction> preds{
      {1.0, 0.5, 0.1}, {2.0, 0.5, 0.2}};
  const std::vector<double> y{2.0, 0.0};
  // Squared errors 1 and 4, uncertainties already sorted: the worked example.
  CHECK(snne::r_auc_mse(preds, y) == 1.125);
}

TEST_CASE("split metrics aggregate mse, mae, and mean uncertainty") {
  std::vector<snne::GaussianPrediction> preds{
      {1.0, 0.5, 0.3}, {3.0, 1.0, 0.7}};
  const std::vector<double> y{0.0, 1.0};
  const snne::SplitMetrics m = snne::compute_metrics(preds, y);
  CHECK(m.count == 2);
  CHECK(m.mse == doctest::Approx(0.5 * (1.0 + 4.0)).epsilon(1e-15));
  CHECK(m.mae == doctest::Approx(0.5 * (1.0 + 2.0)).epsilon(1e-15));
  CHECK(m.mean_uncertainty == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.r_auc == snne::r_auc_mse(preds, y));
}

TEST_CASE("retention csv uses the exact two-column format") {
  const RetentionCurve c = snne::retention_curve({1.0, 4.0}, {0.1, 0.2});
  const std::string path = "retention_test_out.csv";
  snne::write_retention_csv(c, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "retention,mse");
  std::size_t rows = 0;
  std::vector<double> rs, ms;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ss(line);
    std::string a, b;
    REQUIRE(std::getline(ss, a, ','));
    REQUIRE(std::getline(ss, b));
    rs.push_back(std::stod(a));
    ms.push_back(std::stod(b));
  }
  CHECK(rows == 3);
  for (std::size_t j = 0; j < rs.size(); ++j) {
    CHECK(rs[j] == c.retention[j]);
    CHECK(ms[j] == c.mse[j]);
  }
  std::remove(path.c_str());
}