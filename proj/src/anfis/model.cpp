#include "fasa/anfis/model.hpp"

#include <cmath>
#include <stdexcept>

namespace fasa::anfis {

namespace {
constexpr double kStrengthFloor = 1e-300;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

void GaussianMf::validate() const {
  require(std::isfinite(amplitude) && std::isfinite(center) && std::isfinite(sigma),
          "GaussianMf: non-finite parameter");
  require(sigma > 0.0, "GaussianMf: sigma must be > 0");
}

double eval_mf(const GaussianMf& mf, double x, bool standard_form) {
  if (!std::isfinite(x)) throw std::invalid_argument("eval_mf: non-finite input");
  double u = x - mf.center;
  double denom = standard_form ? 2.0 * mf.sigma * mf.sigma
                               : (2.0 * mf.sigma) * (2.0 * mf.sigma);
  return mf.amplitude * std::exp(-(u * u) / denom);
}

RuleBase RuleBase::full_grid(int n_inputs, int mfs_per_input) {
  require(n_inputs >= 1, "RuleBase: n_inputs must be >= 1");
  require(mfs_per_input >= 1, "RuleBase: mfs_per_input must be >= 1");
  double count = std::pow(mfs_per_input, n_inputs);
  require(count <= 1e7, "RuleBase: grid too large");
  RuleBase rb;
  rb.n_inputs = n_inputs;
  rb.mfs_per_input = mfs_per_input;
  int n_rules = static_cast<int>(count);
  rb.rules.assign(n_rules, std::vector<int>(n_inputs, 0));
  for (int r = 0; r < n_rules; ++r) {
    int rem = r;
    for (int j = n_inputs - 1; j >= 0; --j) {
      rb.rules[r][j] = rem % mfs_per_input;
      rem /= mfs_per_input;
    }
  }
  return rb;
}

void RuleBase::validate() const {
  require(n_inputs >= 1, "RuleBase: n_inputs must be >= 1");
  require(mfs_per_input >= 1, "RuleBase: mfs_per_input must be >= 1");
  double expected = std::pow(mfs_per_input, n_inputs);
  require(static_cast<double>(rules.size()) == expected,
          "RuleBase: rule count is not mfs_per_input^n_inputs");
  for (const auto& rule : rules) {
    require(static_cast<int>(rule.size()) == n_inputs, "RuleBase: rule arity mismatch");
    for (int idx : rule)
      require(idx >= 0 && idx < mfs_per_input, "RuleBase: MF index out of range");
  }
}

void AnfisModel::validate() const {
  rule_base.validate();
  require(static_cast<int>(mfs.size()) == rule_base.n_inputs,
          "AnfisModel: MF table does not cover every input");
  for (const auto& per_input : mfs) {
    require(static_cast<int>(per_input.size()) == rule_base.mfs_per_input,
            "AnfisModel: MF count mismatch on an input");
    for (const auto& mf : per_input) mf.validate();
  }
  require(consequents.rows() == rule_base.n_rules() &&
              consequents.cols() == rule_base.n_inputs + 1,
          "AnfisModel: consequent matrix shape mismatch");
  require(consequents.allFinite(), "AnfisModel: non-finite consequent");
  require(threshold >= 0.0 && threshold <= 1.0, "AnfisModel: threshold outside [0,1]");
  if (!feature_names.empty())
    require(static_cast<int>(feature_names.size()) == rule_base.n_inputs,
            "AnfisModel: feature name count mismatch");
  require(scaler_min.size() == scaler_max.size(), "AnfisModel: scaler length mismatch");
  if (!scaler_min.empty())
    require(static_cast<int>(scaler_min.size()) == rule_base.n_inputs,
            "AnfisModel: scaler length does not match inputs");
}

AnfisModel init_grid(int n_inputs, int mfs_per_input,
                     const std::vector<std::pair<double, double>>& ranges) {
  require(n_inputs >= 1, "init_grid: n_inputs must be >= 1");
  require(static_cast<int>(ranges.size()) == n_inputs,
          "init_grid: one range per input required");
  AnfisModel model;
  model.rule_base = RuleBase::full_grid(n_inputs, mfs_per_input);
  model.mfs.resize(n_inputs);
  for (int j = 0; j < n_inputs; ++j) {
    auto [lo, hi] = ranges[j];
    require(std::isfinite(lo) && std::isfinite(hi) && hi >= lo,
            "init_grid: invalid range");
    double span = hi - lo;
    if (span <= 0.0) span = 1.0;  // degenerate feature: place a unit-wide grid
    model.mfs[j].resize(mfs_per_input);
    if (mfs_per_input == 1) {
      model.mfs[j][0].amplitude = 1.0;
      model.mfs[j][0].center = lo + span / 2.0;
      model.mfs[j][0].sigma = span / 2.0;
      continue;
    }
    double spacing = span / (mfs_per_input - 1);
    for (int k = 0; k < mfs_per_input; ++k) {
      model.mfs[j][k].amplitude = 1.0;
      model.mfs[j][k].center = lo + spacing * k;
      model.mfs[j][k].sigma = spacing / 2.0;
    }
  }
  model.consequents = Eigen::MatrixXd::Zero(model.n_rules(), n_inputs + 1);
  return model;
}

Eigen::VectorXd firing_strengths(const AnfisModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.n_inputs())
    throw std::invalid_argument("firing_strengths: input dimension mismatch");
  Eigen::MatrixXd mu(model.n_inputs(), model.rule_base.mfs_per_input);
  for (int j = 0; j < model.n_inputs(); ++j)
    for (int k = 0; k < model.rule_base.mfs_per_input; ++k)
      mu(j, k) = eval_mf(model.mfs[j][k], x(j), model.standard_gaussian);
  Eigen::VectorXd w(model.n_rules());
  for (int r = 0; r < model.n_rules(); ++r) {
    double prod = 1.0;
    for (int j = 0; j < model.n_inputs(); ++j) prod *= mu(j, model.rule_base.rules[r][j]);
    w(r) = prod;
  }
  return w;
}

Eigen::VectorXd normalize_strengths(const Eigen::VectorXd& w) {
  if (w.size() == 0) throw std::invalid_argument("normalize_strengths: empty vector");
  double total = w.sum();
  if (total < kStrengthFloor)
    return Eigen::VectorXd::Constant(w.size(), 1.0 / static_cast<double>(w.size()));
  return w / total;
}

Eigen::VectorXd rule_outputs(const Eigen::MatrixXd& consequents, const Eigen::VectorXd& x) {
  if (consequents.cols() != x.size() + 1)
    throw std::invalid_argument("rule_outputs: consequent width != n_inputs + 1");
  Eigen::VectorXd ext(x.size() + 1);
  ext.head(x.size()) = x;
  ext(x.size()) = 1.0;
  return consequents * ext;
}

double predict_raw(const AnfisModel& model, const Eigen::VectorXd& x) {
  Eigen::VectorXd wbar = normalize_strengths(firing_strengths(model, x));
  return wbar.dot(rule_outputs(model.consequents, x));
}

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

Classification classify(const AnfisModel& model, const Eigen::VectorXd& x) {
  double p = logistic(predict_raw(model, x));
  return {p >= model.threshold ? 1 : 0, p};
}

Eigen::VectorXd apply_scaler(const AnfisModel& model, const Eigen::VectorXd& x) {
  if (model.scaler_min.empty()) return x;
  if (static_cast<int>(model.scaler_min.size()) != x.size() ||
      model.scaler_max.size() != model.scaler_min.size()) {
    throw std::invalid_argument("apply_scaler: scaler length does not match input");
  }
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double span = model.scaler_max[size_t(i)] - model.scaler_min[size_t(i)];
    out[i] = span > 0.0 ? (x[i] - model.scaler_min[size_t(i)]) / span : 0.0;
  }
  return out;
}

}  // namespace fasa::anfis
