#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fluxbench/errors.hpp"
#include "fluxbench/ml/dnn.hpp"
#include "fluxbench/ml/knn.hpp"
#include "fluxbench/ml/linear_svr.hpp"
#include "fluxbench/rng.hpp"

using namespace fluxbench;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Matrix x(rows, cols);
  RngStream rng(seed);
  for (double& v : x.data) v = rng.normal();
  return x;
}

std::vector<double> random_targets(std::size_t rows, std::uint64_t seed) {
  std::vector<double> y(rows);
  RngStream rng(seed);
  for (double& v : y) v = rng.uniform01();
  return y;
}

}  // namespace

TEST_CASE("knn with k = 1 returns the matching row's target") {
  const auto x = random_matrix(30, 3, 1);
  const auto y = random_targets(30, 2);
  KnnRegressor::Params params;
  params.k = 1;
  KnnRegressor knn(params);
  knn.fit(x, y);
  for (std::size_t i = 0; i < x.rows; ++i) {
    CHECK(knn.predict_row(x.row(i)) == y[i]);
  }
}

TEST_CASE("knn matches an exhaustive-scan oracle") {
  const auto x = random_matrix(200, 4, 7);
  const auto y = random_targets(200, 8);
  const auto queries = random_matrix(25, 4, 9);

  for (const auto metric :
       {KnnRegressor::Metric::Euclidean, KnnRegressor::Metric::Manhattan}) {
    KnnRegressor::Params params;
    params.k = 7;
    params.metric = metric;
    KnnRegressor knn(params);
    knn.fit(x, y);

    for (std::size_t q = 0; q < queries.rows; ++q) {
      // Independent oracle: full sort by (distance, index).
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t i = 0; i < x.rows; ++i) {
        double d = 0.0;
        for (std::size_t c = 0; c < x.cols; ++c) {
          const double diff = queries.at(q, c) - x.at(i, c);
          d += metric == KnnRegressor::Metric::Euclidean ? diff * diff
                                                         : std::abs(diff);
        }
        all.emplace_back(d, i);
      }
      std::sort(all.begin(), all.end());
      double expected = 0.0;
      for (std::size_t i = 0; i < params.k; ++i) expected += y[all[i].second];
      expected /= static_cast<double>(params.k);
      CHECK(knn.predict_row(queries.row(q)) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("knn distance ties admit the lowest row index") {
  Matrix x(3, 1);
  x.at(0, 0) = 1.0;
  x.at(1, 0) = 1.0;  // same point as row 0
  x.at(2, 0) = 5.0;
  KnnRegressor::Params params;
  params.k = 1;
  KnnRegressor knn(params);
  knn.fit(x, {0.2, 0.8, 0.5});
  const std::vector<double> query = {1.0};
  CHECK(knn.predict_row(query) == 0.2);
}

TEST_CASE("knn rejects k larger than the training set") {
  KnnRegressor::Params params;
  params.k = 10;
  KnnRegressor knn(params);
  const auto x = random_matrix(5, 2, 3);
  CHECK_THROWS_AS(knn.fit(x, random_targets(5, 4)), RuntimeError);
}

TEST_CASE("linear svr leaves in-tube data with zero epsilon-insensitive loss") {
  // Constant data with a wide tube: any small w with matching bias is
  // loss-free; the solver must find such an interpolant.
  Matrix x(20, 1);
  std::vector<double> y(20, 0.5);
  for (int i = 0; i < 20; ++i) x.at(i, 0) = -1.0 + 0.1 * i;
  LinearSvrRegressor::Params params;
  params.c = 5.0;
  params.epsilon = 0.2;
  params.epochs = 3000;
  LinearSvrRegressor svr(params);
  svr.fit(x, y);
  double loss = 0.0;
  for (int i = 0; i < 20; ++i) {
    loss += std::max(0.0, std::abs(y[i] - svr.predict_row(x.row(i))) -
                              params.epsilon);
  }
  CHECK(loss == 0.0);
}

TEST_CASE("linear svr with C = 0 pins the bias to the target mean") {
  const auto x = random_matrix(11, 2, 5);
  const auto y = random_targets(11, 6);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());

  LinearSvrRegressor::Params params;
  params.c = 0.0;
  LinearSvrRegressor svr(params);
  svr.fit(x, y);
  CHECK(svr.weights() == std::vector<double>{0.0, 0.0});
  CHECK(svr.bias() == mean);
}

TEST_CASE("linear svr recovers the interpolating line at large C") {
  Matrix x(2, 1);
  x.at(0, 0) = 0.0;
  x.at(1, 0) = 1.0;
  const std::vector<double> y = {0.0, 1.0};
  LinearSvrRegressor::Params params;
  params.c = 10.0;
  params.epsilon = 0.0;
  params.epochs = 60000;
  params.lr0 = 0.5;
  LinearSvrRegressor svr(params);
  svr.fit(x, y);
  CHECK(std::abs(svr.weights()[0] - 1.0) < 1e-3);
  CHECK(std::abs(svr.bias()) < 1e-3);
}

TEST_CASE("zero-parameter network predicts zero everywhere") {
  DnnRegressor::Params params;
  params.hidden = {8, 8};
  DnnRegressor dnn(params);
  dnn.initialize(3);
  auto flat = dnn.parameters();
  std::fill(flat.begin(), flat.end(), 0.0);
  dnn.set_parameters(flat);
  const auto x = random_matrix(5, 3, 12);
  for (std::size_t i = 0; i < x.rows; ++i) {
    CHECK(dnn.predict_row(x.row(i)) == 0.0);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  DnnRegressor::Params params;
  params.hidden = {6, 4};
  params.seed = 21;
  DnnRegressor dnn(params);
  dnn.initialize(3);

  const auto x = random_matrix(5, 3, 22);
  const auto y = random_targets(5, 23);
  const auto analytic = dnn.gradients(x, y);
  auto theta = dnn.parameters();
  REQUIRE(analytic.size() == theta.size());

  const double h = 1e-5;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    auto perturbed = theta;
    perturbed[i] = theta[i] + h;
    dnn.set_parameters(perturbed);
    const double up = dnn.loss(x, y);
    perturbed[i] = theta[i] - h;
    dnn.set_parameters(perturbed);
    const double down = dnn.loss(x, y);
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i])});
    if (denom > 1e-8) {
      max_rel = std::max(max_rel, std::abs(numeric - analytic[i]) / denom);
    }
  }
  dnn.set_parameters(theta);
  CHECK(max_rel < 1e-4);
}

TEST_CASE("full-batch gradient of an affine network matches the closed form") {
  // One hidden unit with unit weight on a strictly positive feature keeps
  // ReLU inactive as a constraint; the model is then w*x0 + b overall.
  DnnRegressor::Params params;
  params.hidden = {1};
  DnnRegressor dnn(params);
  dnn.initialize(1);
  const double w_hidden = 1.0, b_hidden = 2.0, w_out = 0.7, b_out = 0.3;
  dnn.set_parameters({w_hidden, b_hidden, w_out, b_out});

  Matrix x(6, 1);
  std::vector<double> y(6);
  RngStream rng(33);
  for (int i = 0; i < 6; ++i) {
    x.at(i, 0) = rng.uniform(0.1, 2.0);  // keeps the hidden unit active
    y[i] = rng.uniform01();
  }
  const auto grad = dnn.gradients(x, y);

  // Closed-form MSE gradients of f(x) = w_out * (w_h x + b_h) + b_out.
  const double n = 6.0;
  double g_wh = 0.0, g_bh = 0.0, g_wo = 0.0, g_bo = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double hidden = w_hidden * x.at(i, 0) + b_hidden;
    const double pred = w_out * hidden + b_out;
    const double up = 2.0 * (pred - y[i]) / n;
    g_wh += up * w_out * x.at(i, 0);
    g_bh += up * w_out;
    g_wo += up * hidden;
    g_bo += up;
  }
  CHECK(grad[0] == doctest::Approx(g_wh).epsilon(1e-12));
  CHECK(grad[1] == doctest::Approx(g_bh).epsilon(1e-12));
  CHECK(grad[2] == doctest::Approx(g_wo).epsilon(1e-12));
  CHECK(grad[3] == doctest::Approx(g_bo).epsilon(1e-12));
}

TEST_CASE("training reduces the loss on a learnable function") {
  Matrix x(64, 1);
  std::vector<double> y(64);
  RngStream rng(41);
  for (int i = 0; i < 64; ++i) {
    x.at(i, 0) = rng.uniform(-1.0, 1.0);
    y[i] = 0.5 + 0.3 * x.at(i, 0);
  }
  DnnRegressor::Params params;
  params.hidden = {16};
  params.epochs = 300;
  params.learning_rate = 5e-3;
  params.seed = 42;
  DnnRegressor dnn(params);
  dnn.fit(x, y);
  CHECK(dnn.loss(x, y) < 1e-3);
}

TEST_CASE("an absurd learning rate raises a divergence error") {
  const auto x = random_matrix(32, 2, 51);
  const auto y = random_targets(32, 52);
  DnnRegressor::Params params;
  params.hidden = {16};
  params.epochs = 50;
  params.learning_rate = 1e12;
  params.optimizer = DnnRegressor::Optimizer::Sgd;
  DnnRegressor dnn(params);
  CHECK_THROWS_AS(dnn.fit(x, y), TrainingDiverged);
}

TEST_CASE("svr, knn and dnn serialize and reload exactly") {
  const auto x = random_matrix(40, 3, 61);
  const auto y = random_targets(40, 62);

  LinearSvrRegressor::Params sp;
  sp.epochs = 50;
  LinearSvrRegressor svr(sp);
  svr.fit(x, y);
  const auto svr_copy = deserialize_regressor(svr.serialize());

  KnnRegressor::Params kp;
  kp.k = 3;
  KnnRegressor knn(kp);
  knn.fit(x, y);
  const auto knn_copy = deserialize_regressor(knn.serialize());

  DnnRegressor::Params dp;
  dp.hidden = {8};
  dp.epochs = 5;
  DnnRegressor dnn(dp);
  dnn.fit(x, y);
  const auto dnn_copy = deserialize_regressor(dnn.serialize());

  for (std::size_t i = 0; i < x.rows; ++i) {
    CHECK(svr_copy->predict_row(x.row(i)) == svr.predict_row(x.row(i)));
    CHECK(knn_copy->predict_row(x.row(i)) == knn.predict_row(x.row(i)));
    CHECK(dnn_copy->predict_row(x.row(i)) == dnn.predict_row(x.row(i)));
  }
}

TEST_CASE("predict before fit and width mismatches are rejected") {
  KnnRegressor::Params params;
  KnnRegressor knn(params);
  const std::vector<double> row = {1.0, 2.0};
  CHECK_THROWS_AS(knn.predict_row(row), RuntimeError);

  const auto x = random_matrix(10, 2, 71);
  knn.fit(x, random_targets(10, 72));
  const std::vector<double> wide = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(knn.predict_row(wide), RuntimeError);
}
