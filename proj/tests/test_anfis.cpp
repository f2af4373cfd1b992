#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "fasa/anfis/model.hpp"
#include "fasa/anfis/serialize.hpp"
#include "fasa/anfis/training.hpp"
#include "fasa/common/rng.hpp"

using namespace fasa::anfis;
using fasa::Rng;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Builds a random model whose parameters are well away from degeneracy.
AnfisModel random_model(Rng& rng, int n_inputs, int mfs_per_input,
                        bool standard_form) {
  std::vector<std::pair<double, double>> ranges(n_inputs, {0.0, 1.0});
  AnfisModel model = init_grid(n_inputs, mfs_per_input, ranges);
  model.standard_gaussian = standard_form;
  for (auto& per_input : model.mfs) {
    for (auto& mf : per_input) {
      mf.amplitude = 0.5 + rng.uniform();
      mf.center += 0.2 * (rng.uniform() - 0.5);
      mf.sigma *= 0.75 + 0.5 * rng.uniform();
    }
  }
  for (int r = 0; r < model.n_rules(); ++r) {
    for (int j = 0; j <= n_inputs; ++j) {
      model.consequents(r, j) = 2.0 * rng.uniform() - 1.0;
    }
  }
  return model;
}

MatrixXd random_inputs(Rng& rng, int n, int d) {
  MatrixXd X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = rng.uniform();
  return X;
}

// Layer-by-layer reference forward pass written as directly as possible.
double predict_raw_by_hand(const AnfisModel& model, const VectorXd& x) {
  int R = model.n_rules();
  int n = model.n_inputs();
  std::vector<double> w(size_t(R), 1.0);
  for (int r = 0; r < R; ++r) {
    for (int j = 0; j < n; ++j) {
      const GaussianMf& mf = model.mfs[size_t(j)][size_t(model.rule_base.rules[size_t(r)][size_t(j)])];
      double u = x[j] - mf.center;
      double denom = model.standard_gaussian ? 2.0 * mf.sigma * mf.sigma
                                             : 4.0 * mf.sigma * mf.sigma;
      w[size_t(r)] *= mf.amplitude * std::exp(-u * u / denom);
    }
  }
  double total = 0.0;
  for (double v : w) total += v;
  double y = 0.0;
  for (int r = 0; r < R; ++r) {
    double f = model.consequents(r, n);
    for (int j = 0; j < n; ++j) f += model.consequents(r, j) * x[j];
    double wbar = total < 1e-300 ? 1.0 / R : w[size_t(r)] / total;
    y += wbar * f;
  }
  return y;
}

double bce_at(AnfisModel model, const VectorXd& flat, const MatrixXd& X,
              const std::vector<int>& labels) {
  unflatten_premises(model, flat);
  return bce_loss(model, X, labels);
}

}  // namespace

TEST_CASE("membership values at frozen points") {
  GaussianMf mf{1.0, 0.0, 1.0};
  CHECK(eval_mf(mf, 0.0) == 1.0);
  // Default form divides by (2 sigma)^2 = 4.
  CHECK(eval_mf(mf, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(eval_mf(mf, 1.0) == doctest::Approx(std::exp(-0.25)).epsilon(1e-15));
  // Conventional form divides by 2 sigma^2.
  CHECK(eval_mf(mf, 2.0, true) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(eval_mf(mf, 1.0, true) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));

  GaussianMf scaled{0.5, 3.0, 2.0};
  CHECK(eval_mf(scaled, 3.0) == 0.5);
  CHECK(eval_mf(scaled, 7.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));

  CHECK_THROWS(eval_mf(mf, std::nan("")));
  GaussianMf bad{1.0, 0.0, 0.0};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("grid enumeration puts input 0 in the most significant digit") {
  RuleBase rb = RuleBase::full_grid(2, 3);
  REQUIRE(rb.n_rules() == 9);
  CHECK(rb.rules[0] == std::vector<int>{0, 0});
  CHECK(rb.rules[1] == std::vector<int>{0, 1});
  CHECK(rb.rules[3] == std::vector<int>{1, 0});
  CHECK(rb.rules[8] == std::vector<int>{2, 2});

  RuleBase single = RuleBase::full_grid(3, 1);
  CHECK(single.n_rules() == 1);
  CHECK_THROWS(RuleBase::full_grid(0, 2));
  CHECK_THROWS(RuleBase::full_grid(25, 10));  // 10^25 rules
}

TEST_CASE("grid init spaces centers evenly") {
  AnfisModel model = init_grid(1, 3, {{0.0, 1.0}});
  CHECK(model.mfs[0][0].center == 0.0);
  CHECK(model.mfs[0][1].center == 0.5);
  CHECK(model.mfs[0][2].center == 1.0);
  CHECK(model.mfs[0][0].sigma == 0.25);
  // A neighboring center sits at u = spacing, sigma = spacing/2, so the
  // default form gives exp(-spacing^2 / (2 spacing)^2 * ... ) = exp(-1/4)...
  // u^2/(4 sigma^2) = spacing^2 / spacing^2 = 1.
  CHECK(eval_mf(model.mfs[0][0], 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(model.consequents.rows() == 3);
  CHECK(model.consequents.cols() == 2);
  CHECK(model.consequents.norm() == 0.0);

  AnfisModel degenerate = init_grid(1, 2, {{2.0, 2.0}});
  CHECK(degenerate.mfs[0][1].center > degenerate.mfs[0][0].center);
}

TEST_CASE("firing strengths multiply memberships") {
  Rng rng(11);
  AnfisModel model = random_model(rng, 2, 2, false);
  VectorXd x(2);
  x << 0.3, 0.7;
  VectorXd w = firing_strengths(model, x);
  REQUIRE(w.size() == 4);
  for (int r = 0; r < 4; ++r) {
    double expect = eval_mf(model.mfs[0][size_t(model.rule_base.rules[size_t(r)][0])], x[0]) *
                    eval_mf(model.mfs[1][size_t(model.rule_base.rules[size_t(r)][1])], x[1]);
    CHECK(w[r] == doctest::Approx(expect).epsilon(1e-15));
  }
  VectorXd wbar = normalize_strengths(w);
  CHECK(wbar.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vanished strengths fall back to uniform weights") {
  VectorXd w(3);
  w << 0.0, 0.0, 0.0;
  VectorXd wbar = normalize_strengths(w);
  for (int r = 0; r < 3; ++r) CHECK(wbar[r] == doctest::Approx(1.0 / 3).epsilon(1e-15));

  // Far from every center the same fallback keeps predict_raw finite.
  AnfisModel model = init_grid(2, 2, {{0.0, 1.0}, {0.0, 1.0}});
  model.consequents.setConstant(0.25);
  VectorXd far(2);
  far << 1e6, -1e6;
  double y = predict_raw(model, far);
  CHECK(std::isfinite(y));
}

TEST_CASE("forward pass matches the hand-rolled reference") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + int(rng.below(3));
    int m = 1 + int(rng.below(3));
    bool standard = rng.below(2) == 1;
    AnfisModel model = random_model(rng, n, m, standard);
    for (int k = 0; k < 5; ++k) {
      VectorXd x(n);
      for (int j = 0; j < n; ++j) x[j] = 3.0 * rng.uniform() - 1.0;
      CHECK(predict_raw(model, x) ==
            doctest::Approx(predict_raw_by_hand(model, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("classification treats the threshold tie as attack") {
  // Zero consequents give predict_raw = 0, logistic(0) = 0.5 exactly.
  AnfisModel model = init_grid(1, 2, {{0.0, 1.0}});
  VectorXd x(1);
  x << 0.5;
  Classification c = classify(model, x);
  CHECK(c.probability == 0.5);
  CHECK(c.label == 1);

  model.threshold = 0.51;
  CHECK(classify(model, x).label == 0);
}

TEST_CASE("logistic saturates cleanly") {
  CHECK(logistic(0.0) == 0.5);
  CHECK(logistic(1000.0) == 1.0);
  CHECK(logistic(-1000.0) == doctest::Approx(0.0).epsilon(1e-300));
  CHECK(std::isfinite(logistic(710.0)));
  CHECK(std::isfinite(logistic(-710.0)));
}

TEST_CASE("single-rule least squares recovers a known affine map") {
  // One rule: wbar = 1, so the network output IS the consequent function and
  // the recovery must be exact to solver precision.
  AnfisModel model = init_grid(2, 1, {{0.0, 1.0}, {0.0, 1.0}});
  Rng rng(5);
  int n = 40;
  MatrixXd X = random_inputs(rng, n, 2);
  VectorXd targets(n);
  for (int i = 0; i < n; ++i) targets[i] = 2.0 * X(i, 0) - 3.0 * X(i, 1) + 0.5;
  solve_consequents(model, X, targets, 0.0);
  CHECK(model.consequents(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(model.consequents(0, 1) == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(model.consequents(0, 2) == doctest::Approx(0.5).epsilon(1e-10));
  for (int i = 0; i < n; ++i) {
    CHECK(predict_raw(model, X.row(i).transpose()) ==
          doctest::Approx(targets[i]).epsilon(1e-9));
  }
}

TEST_CASE("least squares residual is orthogonal to the design") {
  Rng rng(9);
  AnfisModel model = random_model(rng, 2, 2, false);
  int n = 200;
  MatrixXd X = random_inputs(rng, n, 2);
  VectorXd targets(n);
  for (int i = 0; i < n; ++i) targets[i] = std::sin(6.0 * X(i, 0)) + X(i, 1);
  solve_consequents(model, X, targets, 0.0);

  // Rebuild the design matrix independently and check A^T (A theta - y) = 0.
  int R = model.n_rules();
  int cols = R * 3;
  MatrixXd A(n, cols);
  for (int i = 0; i < n; ++i) {
    VectorXd x = X.row(i).transpose();
    VectorXd wbar = normalize_strengths(firing_strengths(model, x));
    for (int r = 0; r < R; ++r) {
      A(i, 3 * r + 0) = wbar[r] * x[0];
      A(i, 3 * r + 1) = wbar[r] * x[1];
      A(i, 3 * r + 2) = wbar[r];
    }
  }
  VectorXd theta(cols);
  for (int r = 0; r < R; ++r)
    for (int j = 0; j < 3; ++j) theta[3 * r + j] = model.consequents(r, j);
  VectorXd grad = A.transpose() * (A * theta - targets);
  double scale = std::max(1.0, (A.transpose() * targets).lpNorm<Eigen::Infinity>());
  CHECK(grad.lpNorm<Eigen::Infinity>() / scale < 1e-8);
}

TEST_CASE("least squares reproduces targets generated by a sibling model") {
  Rng rng(17);
  AnfisModel truth = random_model(rng, 2, 2, false);
  int n = 300;
  MatrixXd X = random_inputs(rng, n, 2);
  VectorXd targets(n);
  for (int i = 0; i < n; ++i) targets[i] = predict_raw(truth, X.row(i).transpose());

  AnfisModel model = truth;  // same premises, consequents re-derived
  model.consequents.setZero();
  solve_consequents(model, X, targets, 0.0);
  for (int i = 0; i < n; ++i) {
    CHECK(predict_raw(model, X.row(i).transpose()) ==
          doctest::Approx(targets[i]).epsilon(1e-8));
  }
}

TEST_CASE("ridge solve never worsens its own objective") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    AnfisModel model = random_model(rng, 2, 2, trial % 2 == 0);
    int n = 80;
    MatrixXd X = random_inputs(rng, n, 2);
    VectorXd targets(n);
    for (int i = 0; i < n; ++i) targets[i] = 2.0 * rng.uniform() - 1.0;
    double lambda = 1e-6;
    double before = consequent_objective(model, X, targets, lambda);
    solve_consequents(model, X, targets, lambda);
    double after = consequent_objective(model, X, targets, lambda);
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("unregularized solve refuses an underdetermined system") {
  AnfisModel model = init_grid(2, 2, {{0.0, 1.0}, {0.0, 1.0}});
  // 3 samples, 12 unknowns: normal equations are singular.
  MatrixXd X(3, 2);
  X << 0.1, 0.2, 0.5, 0.6, 0.9, 0.8;
  VectorXd t(3);
  t << 1.0, -1.0, 1.0;
  CHECK_THROWS_WITH_AS(solve_consequents(model, X, t, 0.0),
                       doctest::Contains("ridge_lambda"), std::runtime_error);
  // The same system solves once regularized.
  solve_consequents(model, X, t, 1e-6);
  CHECK(model.consequents.allFinite());
}

TEST_CASE("analytic premise gradients match finite differences") {
  Rng rng(31);
  int models_checked = 0;
  for (int trial = 0; trial < 24; ++trial) {
    int n_inputs = 2 + int(rng.below(3));  // 2..4
    bool standard = rng.below(2) == 1;
    AnfisModel model = random_model(rng, n_inputs, 2, standard);
    int n = 24;
    MatrixXd X = random_inputs(rng, n, n_inputs);
    std::vector<int> labels(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) labels[size_t(i)] = int(rng.below(2));
    // Consequents from one LSQ pass so the loss surface is the one training
    // actually walks.
    VectorXd targets(n);
    for (int i = 0; i < n; ++i) targets[i] = labels[size_t(i)] ? 1.0 : -1.0;
    solve_consequents(model, X, targets, 1e-6);

    PremiseGradients grads = premise_gradients(model, X, labels);
    VectorXd flat = flatten_premises(model);
    VectorXd analytic = flatten_gradients(grads);
    REQUIRE(analytic.size() == flat.size());

    const double h = 1e-5;
    for (Eigen::Index k = 0; k < flat.size(); ++k) {
      VectorXd hi = flat, lo = flat;
      hi[k] += h;
      lo[k] -= h;
      double fd = (bce_at(model, hi, X, labels) - bce_at(model, lo, X, labels)) / (2.0 * h);
      double rel = std::abs(analytic[k] - fd) / std::max(std::abs(fd), 1e-6);
      CHECK(rel < 1e-4);
    }
    ++models_checked;
  }
  CHECK(models_checked == 24);
}

TEST_CASE("premise flattening round-trips") {
  Rng rng(37);
  AnfisModel model = random_model(rng, 3, 2, false);
  VectorXd flat = flatten_premises(model);
  REQUIRE(flat.size() == 3 * 2 * 3);
  AnfisModel copy = model;
  for (auto& per_input : copy.mfs)
    for (auto& mf : per_input) mf.center += 1.0;
  unflatten_premises(copy, flat);
  VectorXd x(3);
  x << 0.2, 0.5, 0.8;
  CHECK(predict_raw(copy, x) == predict_raw(model, x));
}

TEST_CASE("adam first step moves by roughly the learning rate") {
  TrainConfig config;
  config.learning_rate = 0.01;
  VectorXd params(2);
  params << 1.0, -2.0;
  VectorXd grads(2);
  grads << 0.5, -3.0;
  AdamState state = AdamState::zeros(2);
  adam_step(params, grads, state, 1, config);
  // Bias correction makes mhat = g, vhat = g^2 on step one, so the update is
  // lr * g / (|g| + eps) = lr * sign(g) up to epsilon.
  CHECK(params[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
  CHECK(params[1] == doctest::Approx(-2.0 + 0.01).epsilon(1e-6));
}

TEST_CASE("adam matches a scalar reimplementation over several steps") {
  TrainConfig config;
  config.learning_rate = 0.1;
  VectorXd params(1);
  params << 0.3;
  AdamState state = AdamState::zeros(1);
  double m = 0.0, v = 0.0, p = 0.3;
  Rng rng(41);
  for (int t = 1; t <= 25; ++t) {
    double g = 2.0 * rng.uniform() - 1.0;
    VectorXd gv(1);
    gv << g;
    adam_step(params, gv, state, t, config);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    double mhat = m / (1.0 - std::pow(0.9, t));
    double vhat = v / (1.0 - std::pow(0.999, t));
    p -= 0.1 * mhat / (std::sqrt(vhat) + config.adam_epsilon);
    CHECK(params[0] == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("training separates a linearly separable cloud") {
  Rng rng(43);
  int n = 600;
  MatrixXd X(n, 2);
  std::vector<int> labels(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int cls = i % 2;
    // Two clusters with a comfortable margin along x0 + x1.
    double cx = cls ? 0.75 : 0.25;
    X(i, 0) = cx + 0.12 * (rng.uniform() - 0.5);
    X(i, 1) = cx + 0.12 * (rng.uniform() - 0.5);
    labels[size_t(i)] = cls;
  }
  AnfisModel model = init_grid(2, 2, {{0.0, 1.0}, {0.0, 1.0}});
  TrainConfig config;
  config.epochs = 30;
  config.seed = 7;
  TrainReport report = fit(model, X, labels, config);
  REQUIRE(report.epoch_loss.size() == 30);
  for (double loss : report.epoch_loss) CHECK(std::isfinite(loss));

  int correct = 0;
  for (int i = 0; i < n; ++i) {
    correct += classify(model, X.row(i).transpose()).label == labels[size_t(i)];
  }
  CHECK(double(correct) / n >= 0.995);
  CHECK(!report.snapshot_id.empty());
}

TEST_CASE("training handles an xor arrangement") {
  Rng rng(47);
  int n = 400;
  MatrixXd X(n, 2);
  std::vector<int> labels(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int a = int(rng.below(2)), b = int(rng.below(2));
    X(i, 0) = (a ? 0.8 : 0.2) + 0.1 * (rng.uniform() - 0.5);
    X(i, 1) = (b ? 0.8 : 0.2) + 0.1 * (rng.uniform() - 0.5);
    labels[size_t(i)] = a ^ b;
  }
  AnfisModel model = init_grid(2, 2, {{0.0, 1.0}, {0.0, 1.0}});
  TrainConfig config;
  config.epochs = 30;
  TrainReport report = fit(model, X, labels, config);
  (void)report;
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    correct += classify(model, X.row(i).transpose()).label == labels[size_t(i)];
  }
  CHECK(double(correct) / n >= 0.95);
}

TEST_CASE("cross validation reports one evaluation per fold") {
  Rng rng(53);
  int n = 200;
  MatrixXd X(n, 2);
  std::vector<int> labels(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int cls = i % 2;
    X(i, 0) = (cls ? 0.8 : 0.2) + 0.1 * (rng.uniform() - 0.5);
    X(i, 1) = 0.5 + 0.2 * (rng.uniform() - 0.5);
    labels[size_t(i)] = cls;
  }
  AnfisModel model = init_grid(2, 2, {{0.0, 1.0}, {0.0, 1.0}});
  TrainConfig config;
  config.epochs = 8;
  config.k_folds = 5;
  config.seed = 99;
  TrainReport report = fit_cv(model, X, labels, config);
  REQUIRE(report.folds.size() == 5);
  for (const auto& fold : report.folds) {
    CHECK(fold.report.cm.total() == 40);
    REQUIRE(fold.report.scores.accuracy.has_value());
    CHECK(*fold.report.scores.accuracy >= 0.9);
  }

  // Same seed, same data: identical snapshot.
  AnfisModel model2 = init_grid(2, 2, {{0.0, 1.0}, {0.0, 1.0}});
  TrainReport report2 = fit_cv(model2, X, labels, config);
  CHECK(report.snapshot_id == report2.snapshot_id);
}

TEST_CASE("training validates its inputs") {
  AnfisModel model = init_grid(1, 2, {{0.0, 1.0}});
  MatrixXd X(2, 1);
  X << 0.1, 0.9;
  TrainConfig config;
  CHECK_THROWS(fit(model, X, {0, 2}, config));
  CHECK_THROWS(fit(model, X, {0}, config));
  TrainConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS(bad.validate());
  TrainConfig bad2;
  bad2.ridge_lambda = -1.0;
  CHECK_THROWS(bad2.validate());
}

TEST_CASE("model json round trip preserves predictions bit for bit") {
  Rng rng(59);
  AnfisModel model = random_model(rng, 2, 3, true);
  model.threshold = 0.4375;
  model.feature_names = {"syn_ratio", "ack_ratio"};
  model.scaler_min = {0.0, 0.0};
  model.scaler_max = {1.0, 2.5};
  std::string doc = to_json(model);
  AnfisModel back = from_json(doc);
  CHECK(back.standard_gaussian == model.standard_gaussian);
  CHECK(back.threshold == model.threshold);
  CHECK(back.feature_names == model.feature_names);
  CHECK(back.scaler_max == model.scaler_max);
  for (int k = 0; k < 20; ++k) {
    VectorXd x(2);
    x << rng.uniform(), rng.uniform();
    CHECK(predict_raw(back, x) == predict_raw(model, x));
  }
  // Serialization is canonical: same model, same bytes.
  CHECK(to_json(back) == doc);
}

TEST_CASE("model loader rejects malformed documents") {
  Rng rng(61);
  AnfisModel model = random_model(rng, 1, 2, false);
  std::string doc = to_json(model);

  CHECK_THROWS_WITH_AS(from_json("{]"), doctest::Contains("parse error"),
                       std::runtime_error);
  std::string wrong_format = doc;
  size_t pos = wrong_format.find("fasa.anfis.model");
  REQUIRE(pos != std::string::npos);
  wrong_format.replace(pos, 16, "something.else.j");
  CHECK_THROWS(from_json(wrong_format));
  std::string wrong_version = doc;
  pos = wrong_version.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  wrong_version.replace(pos, 12, "\"version\": 9");
  CHECK_THROWS_WITH_AS(from_json(wrong_version),
                       doctest::Contains("unsupported version"), std::runtime_error);

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "fasa_anfis_test";
  fs::create_directories(dir);
  fs::path path = dir / "model.json";
  save_model(model, path.string());
  AnfisModel loaded = load_model(path.string());
  CHECK(to_json(loaded) == doc);
  CHECK_THROWS(load_model((dir / "missing.json").string()));
  fs::remove_all(dir);
}
