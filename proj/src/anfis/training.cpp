#include "fasa/anfis/training.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fasa/anfis/serialize.hpp"
#include "fasa/preprocess/kfold.hpp"

namespace fasa::anfis {

namespace {

constexpr double kStrengthFloor = 1e-300;
constexpr double kProbClamp = 1e-12;
constexpr double kSigmaFloor = 1e-4;

void check_training_inputs(const AnfisModel& model, const Eigen::MatrixXd& X,
                           size_t n_labels) {
  model.validate();
  if (X.rows() == 0) throw std::invalid_argument("training: empty dataset");
  if (X.cols() != model.n_inputs())
    throw std::invalid_argument("training: X column count != model inputs");
  if (!X.allFinite()) throw std::invalid_argument("training: non-finite value in X");
  if (n_labels != static_cast<size_t>(X.rows()))
    throw std::invalid_argument("training: label count != row count");
}

void check_labels_binary(const std::vector<int>& labels) {
  bool has0 = false, has1 = false;
  for (int y : labels) {
    if (y == 0)
      has0 = true;
    else if (y == 1)
      has1 = true;
    else
      throw std::invalid_argument("training: labels must be 0/1");
  }
  if (!has0 || !has1) throw std::invalid_argument("training: degenerate labels (single class)");
}

// Per-sample forward state shared by the loss, the gradient pass and the
// design-matrix build. Buffers are reused across samples.
struct Forward {
  Eigen::MatrixXd mu;    // n_inputs x mfs_per_input
  Eigen::MatrixXd expf;  // exp factor (mu / amplitude), kept for d/da
  Eigen::VectorXd w;     // firing strengths
  Eigen::VectorXd wbar;  // normalized
  Eigen::VectorXd f;     // rule outputs
  double s0 = 0.0;
  double yraw = 0.0;
  bool uniform = false;  // strength sum vanished; wbar is constant

  void resize(const AnfisModel& model) {
    mu.resize(model.n_inputs(), model.rule_base.mfs_per_input);
    expf.resize(model.n_inputs(), model.rule_base.mfs_per_input);
    w.resize(model.n_rules());
    wbar.resize(model.n_rules());
    f.resize(model.n_rules());
  }
};

void forward_sample(const AnfisModel& model, const Eigen::MatrixXd& X, Eigen::Index s,
                    Forward& fw) {
  const int n = model.n_inputs();
  const int m = model.rule_base.mfs_per_input;
  const int R = model.n_rules();
  for (int j = 0; j < n; ++j) {
    double x = X(s, j);
    for (int k = 0; k < m; ++k) {
      const GaussianMf& mf = model.mfs[j][k];
      double u = x - mf.center;
      double denom = model.standard_gaussian ? 2.0 * mf.sigma * mf.sigma
                                             : 4.0 * mf.sigma * mf.sigma;
      double e = std::exp(-(u * u) / denom);
      fw.expf(j, k) = e;
      fw.mu(j, k) = mf.amplitude * e;
    }
  }
  double s0 = 0.0;
  for (int r = 0; r < R; ++r) {
    double prod = 1.0;
    const auto& rule = model.rule_base.rules[r];
    for (int j = 0; j < n; ++j) prod *= fw.mu(j, rule[j]);
    fw.w(r) = prod;
    s0 += prod;
  }
  fw.s0 = s0;
  fw.uniform = s0 < kStrengthFloor;
  if (fw.uniform)
    fw.wbar.setConstant(1.0 / static_cast<double>(R));
  else
    fw.wbar = fw.w / s0;
  double yraw = 0.0;
  for (int r = 0; r < R; ++r) {
    double fr = model.consequents(r, n);
    for (int j = 0; j < n; ++j) fr += model.consequents(r, j) * X(s, j);
    fw.f(r) = fr;
    yraw += fw.wbar(r) * fr;
  }
  fw.yraw = yraw;
}

uint64_t fnv1a(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (learning_rate <= 0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
    throw std::invalid_argument("TrainConfig: betas must lie in [0, 1)");
  if (adam_epsilon <= 0) throw std::invalid_argument("TrainConfig: adam_epsilon must be > 0");
  if (k_folds < 2) throw std::invalid_argument("TrainConfig: k_folds must be >= 2");
  if (ridge_lambda < 0) throw std::invalid_argument("TrainConfig: ridge_lambda must be >= 0");
}

void solve_consequents(AnfisModel& model, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& targets, double ridge_lambda) {
  check_training_inputs(model, X, static_cast<size_t>(targets.size()));
  if (!targets.allFinite())
    throw std::invalid_argument("solve_consequents: non-finite target");
  if (ridge_lambda < 0)
    throw std::invalid_argument("solve_consequents: ridge_lambda must be >= 0");

  const Eigen::Index N = X.rows();
  const int n = model.n_inputs();
  const int R = model.n_rules();
  const Eigen::Index C = static_cast<Eigen::Index>(R) * (n + 1);

  // Normal equations accumulated in row chunks: G = A^T A, b = A^T targets.
  // Keeps memory at chunk size even when N x C would not fit.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(C, C);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(C);
  const Eigen::Index chunk = std::max<Eigen::Index>(1, std::min<Eigen::Index>(N, 2048));
  Eigen::MatrixXd A(chunk, C);
  Forward fw;
  fw.resize(model);
  for (Eigen::Index base = 0; base < N; base += chunk) {
    const Eigen::Index rows = std::min(chunk, N - base);
    for (Eigen::Index i = 0; i < rows; ++i) {
      forward_sample(model, X, base + i, fw);
      for (int r = 0; r < R; ++r) {
        const Eigen::Index col = static_cast<Eigen::Index>(r) * (n + 1);
        const double wb = fw.wbar(r);
        for (int j = 0; j < n; ++j) A(i, col + j) = wb * X(base + i, j);
        A(i, col + n) = wb;
      }
    }
    auto block = A.topRows(rows);
    G.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
    b.noalias() += block.transpose() * targets.segment(base, rows);
  }
  G.triangularView<Eigen::Upper>() = G.transpose();
  G.diagonal().array() += ridge_lambda;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ridge_lambda == 0.0) {
    const auto& d = ldlt.vectorD();
    double dmax = d.maxCoeff(), dmin = d.minCoeff();
    if (!(dmin > 0.0) || dmax / dmin > 1e12)
      throw std::runtime_error(
          "solve_consequents: normal equations singular or ill-conditioned; "
          "set ridge_lambda > 0");
  }
  Eigen::VectorXd theta = ldlt.solve(b);
  if (!theta.allFinite())
    throw std::runtime_error("solve_consequents: solve produced non-finite coefficients");

  for (int r = 0; r < R; ++r)
    for (int j = 0; j <= n; ++j)
      model.consequents(r, j) = theta(static_cast<Eigen::Index>(r) * (n + 1) + j);
}

double consequent_objective(const AnfisModel& model, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& targets, double ridge_lambda) {
  check_training_inputs(model, X, static_cast<size_t>(targets.size()));
  Forward fw;
  fw.resize(model);
  double sq = 0.0;
  for (Eigen::Index s = 0; s < X.rows(); ++s) {
    forward_sample(model, X, s, fw);
    double r = fw.yraw - targets(s);
    sq += r * r;
  }
  double reg = ridge_lambda * model.consequents.squaredNorm();
  return (sq + reg) / static_cast<double>(X.rows());
}

double bce_loss(const AnfisModel& model, const Eigen::MatrixXd& X,
                const std::vector<int>& labels) {
  check_training_inputs(model, X, labels.size());
  Forward fw;
  fw.resize(model);
  double total = 0.0;
  for (Eigen::Index s = 0; s < X.rows(); ++s) {
    forward_sample(model, X, s, fw);
    double p = logistic(fw.yraw);
    p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    total += labels[s] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(X.rows());
}

PremiseGradients premise_gradients(const AnfisModel& model, const Eigen::MatrixXd& X,
                                   const std::vector<int>& labels) {
  check_training_inputs(model, X, labels.size());
  const int n = model.n_inputs();
  const int m = model.rule_base.mfs_per_input;
  const int R = model.n_rules();
  const double N = static_cast<double>(X.rows());

  PremiseGradients grads(n, std::vector<MfGradient>(m));
  Forward fw;
  fw.resize(model);
  // dL/dmu accumulated per sample, then mapped through each MF's own partials.
  Eigen::MatrixXd gmu(n, m);
  std::vector<double> prefix(static_cast<size_t>(n) + 1), suffix(static_cast<size_t>(n) + 1);

  for (Eigen::Index s = 0; s < X.rows(); ++s) {
    forward_sample(model, X, s, fw);
    // A vanished strength sum makes wbar locally constant: zero gradient.
    if (fw.uniform) continue;
    double p = logistic(fw.yraw);
    if (p < kProbClamp || p > 1.0 - kProbClamp) continue;  // clamped loss plateau
    double gy = (p - static_cast<double>(labels[s])) / N;

    gmu.setZero();
    for (int r = 0; r < R; ++r) {
      double gw = gy * (fw.f(r) - fw.yraw) / fw.s0;
      if (gw == 0.0) continue;
      const auto& rule = model.rule_base.rules[r];
      prefix[0] = 1.0;
      for (int j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * fw.mu(j, rule[j]);
      suffix[n] = 1.0;
      for (int j = n - 1; j >= 0; --j) suffix[j] = suffix[j + 1] * fw.mu(j, rule[j]);
      for (int j = 0; j < n; ++j) gmu(j, rule[j]) += gw * prefix[j] * suffix[j + 1];
    }

    for (int j = 0; j < n; ++j) {
      double x = X(s, j);
      for (int k = 0; k < m; ++k) {
        double g = gmu(j, k);
        if (g == 0.0) continue;
        const GaussianMf& mf = model.mfs[j][k];
        double u = x - mf.center;
        double e = fw.expf(j, k);
        double mu = fw.mu(j, k);
        double s2 = mf.sigma * mf.sigma;
        grads[j][k].d_amplitude += g * e;
        if (model.standard_gaussian) {
          grads[j][k].d_center += g * mu * u / s2;
          grads[j][k].d_sigma += g * mu * u * u / (s2 * mf.sigma);
        } else {
          grads[j][k].d_center += g * mu * u / (2.0 * s2);
          grads[j][k].d_sigma += g * mu * u * u / (2.0 * s2 * mf.sigma);
        }
      }
    }
  }
  return grads;
}

Eigen::VectorXd flatten_premises(const AnfisModel& model) {
  const int n = model.n_inputs();
  const int m = model.rule_base.mfs_per_input;
  Eigen::VectorXd flat(static_cast<Eigen::Index>(n) * m * 3);
  Eigen::Index i = 0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < m; ++k) {
      flat(i++) = model.mfs[j][k].amplitude;
      flat(i++) = model.mfs[j][k].center;
      flat(i++) = model.mfs[j][k].sigma;
    }
  return flat;
}

void unflatten_premises(AnfisModel& model, const Eigen::VectorXd& flat) {
  const int n = model.n_inputs();
  const int m = model.rule_base.mfs_per_input;
  if (flat.size() != static_cast<Eigen::Index>(n) * m * 3)
    throw std::invalid_argument("unflatten_premises: length mismatch");
  Eigen::Index i = 0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < m; ++k) {
      model.mfs[j][k].amplitude = flat(i++);
      model.mfs[j][k].center = flat(i++);
      model.mfs[j][k].sigma = flat(i++);
    }
}

Eigen::VectorXd flatten_gradients(const PremiseGradients& grads) {
  Eigen::Index total = 0;
  for (const auto& per_input : grads) total += static_cast<Eigen::Index>(per_input.size()) * 3;
  Eigen::VectorXd flat(total);
  Eigen::Index i = 0;
  for (const auto& per_input : grads)
    for (const auto& g : per_input) {
      flat(i++) = g.d_amplitude;
      flat(i++) = g.d_center;
      flat(i++) = g.d_sigma;
    }
  return flat;
}

AdamState AdamState::zeros(Eigen::Index n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads,
               AdamState& state, int step_index, const TrainConfig& config) {
  if (step_index < 1) throw std::invalid_argument("adam_step: step_index counts from 1");
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw std::invalid_argument("adam_step: size mismatch");
  state.m = config.beta1 * state.m + (1.0 - config.beta1) * grads;
  state.v = config.beta2 * state.v.array().matrix() +
            (1.0 - config.beta2) * grads.array().square().matrix();
  double c1 = 1.0 - std::pow(config.beta1, step_index);
  double c2 = 1.0 - std::pow(config.beta2, step_index);
  Eigen::ArrayXd mhat = state.m.array() / c1;
  Eigen::ArrayXd vhat = state.v.array() / c2;
  params.array() -= config.learning_rate * mhat / (vhat.sqrt() + config.adam_epsilon);
}

namespace {

void clamp_sigmas(AnfisModel& model) {
  for (auto& per_input : model.mfs)
    for (auto& mf : per_input) mf.sigma = std::max(mf.sigma, kSigmaFloor);
}

TrainReport fit_all(AnfisModel& model, const Eigen::MatrixXd& X,
                    const std::vector<int>& labels, const TrainConfig& config) {
  Eigen::VectorXd targets(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    targets(i) = labels[i] == 1 ? 1.0 : -1.0;

  TrainReport report;
  AdamState state = AdamState::zeros(flatten_premises(model).size());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    solve_consequents(model, X, targets, config.ridge_lambda);
    report.epoch_loss.push_back(bce_loss(model, X, labels));
    PremiseGradients grads = premise_gradients(model, X, labels);
    Eigen::VectorXd params = flatten_premises(model);
    adam_step(params, flatten_gradients(grads), state, epoch, config);
    unflatten_premises(model, params);
    clamp_sigmas(model);
  }
  return report;
}

fasa::metrics::EvalReport evaluate_slice(const AnfisModel& model, const Eigen::MatrixXd& X,
                                         const std::vector<int>& labels,
                                         const std::vector<Eigen::Index>& idx) {
  std::vector<int> preds, truth;
  std::vector<double> probs;
  preds.reserve(idx.size());
  for (Eigen::Index i : idx) {
    Classification c = classify(model, X.row(i).transpose());
    preds.push_back(c.label);
    probs.push_back(c.probability);
    truth.push_back(labels[i]);
  }
  fasa::metrics::EvalReport rep;
  rep.cm = fasa::metrics::confusion(preds, truth);
  rep.scores = fasa::metrics::scores(rep.cm);
  rep.threshold = model.threshold;
  bool has0 = false, has1 = false;
  for (int y : truth) (y == 1 ? has1 : has0) = true;
  if (has0 && has1) rep.auc = fasa::metrics::roc_auc(probs, truth).auc;
  return rep;
}

}  // namespace

TrainReport fit(AnfisModel& model, const Eigen::MatrixXd& X,
                const std::vector<int>& labels, const TrainConfig& config) {
  config.validate();
  check_training_inputs(model, X, labels.size());
  check_labels_binary(labels);
  TrainReport report = fit_all(model, X, labels, config);
  report.snapshot_id = [&] {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(to_json(model))));
    return std::string(buf);
  }();
  return report;
}

TrainReport fit_cv(AnfisModel& model, const Eigen::MatrixXd& X,
                   const std::vector<int>& labels, const TrainConfig& config) {
  config.validate();
  check_training_inputs(model, X, labels.size());
  check_labels_binary(labels);

  std::vector<int> fold_of =
      fasa::preprocess::stratified_kfold(labels, config.k_folds, config.seed);
  const AnfisModel initial = model;
  TrainReport report;
  for (int fold = 0; fold < config.k_folds; ++fold) {
    std::vector<Eigen::Index> train_idx, val_idx;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      (fold_of[i] == fold ? val_idx : train_idx).push_back(i);
    Eigen::MatrixXd Xt(train_idx.size(), X.cols());
    std::vector<int> yt(train_idx.size());
    for (size_t i = 0; i < train_idx.size(); ++i) {
      Xt.row(i) = X.row(train_idx[i]);
      yt[i] = labels[train_idx[i]];
    }
    AnfisModel fold_model = initial;
    fit_all(fold_model, Xt, yt, config);
    report.folds.push_back({fold, evaluate_slice(fold_model, X, labels, val_idx)});
  }

  TrainReport final_report = fit(model, X, labels, config);
  report.epoch_loss = std::move(final_report.epoch_loss);
  report.snapshot_id = std::move(final_report.snapshot_id);
  return report;
}

}  // namespace fasa::anfis
