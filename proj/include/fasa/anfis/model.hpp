#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace fasa::anfis {

// Gaussian membership function mu(x) = a * exp(-(x - c)^2 / (2*sigma)^2).
// Note the denominator: (2*sigma)^2 = 4*sigma^2, twice as wide as the
// conventional bell. Models carry a standard_gaussian flag that switches the
// denominator to the conventional 2*sigma^2.
struct GaussianMf {
  double amplitude = 1.0;
  double center = 0.0;
  double sigma = 1.0;

  void validate() const;
};

double eval_mf(const GaussianMf& mf, double x, bool standard_form = false);

// Full grid partition: one rule per combination of membership functions,
// mfs_per_input^n_inputs rules total. rules[r][j] is the MF index rule r uses
// on input j; input 0 is the most significant digit of the enumeration.
struct RuleBase {
  int n_inputs = 0;
  int mfs_per_input = 0;
  std::vector<std::vector<int>> rules;

  static RuleBase full_grid(int n_inputs, int mfs_per_input);

  int n_rules() const { return static_cast<int>(rules.size()); }
  void validate() const;
};

struct Classification {
  int label = 0;
  double probability = 0.0;
};

struct AnfisModel {
  std::vector<std::vector<GaussianMf>> mfs;  // [input][mf index]
  RuleBase rule_base;
  // One affine consequent per rule: f_r(x) = row_r[0..n-1] . x + row_r[n].
  Eigen::MatrixXd consequents;  // n_rules x (n_inputs + 1)
  double threshold = 0.5;       // on the sigmoid-linked output
  bool standard_gaussian = false;

  // Carried so a serialized model is usable on raw inputs without the
  // preprocessing run that produced it. scaler_* empty = inputs arrive
  // already scaled.
  std::vector<std::string> feature_names;
  std::vector<double> scaler_min;
  std::vector<double> scaler_max;

  int n_inputs() const { return rule_base.n_inputs; }
  int n_rules() const { return rule_base.n_rules(); }
  void validate() const;
};

// Centers evenly spaced over each input's [min, max], sigma = spacing / 2,
// amplitude 1, consequents zero.
AnfisModel init_grid(int n_inputs, int mfs_per_input,
                     const std::vector<std::pair<double, double>>& ranges);

// Layer 2: product of memberships along each rule's MF combination.
Eigen::VectorXd firing_strengths(const AnfisModel& model, const Eigen::VectorXd& x);

// Layer 3. A vanished total (sum < 1e-300) yields uniform weights so the
// output stays defined far from every rule center.
Eigen::VectorXd normalize_strengths(const Eigen::VectorXd& w);

// Layer 4 inputs: f_r(x) for every rule.
Eigen::VectorXd rule_outputs(const Eigen::MatrixXd& consequents, const Eigen::VectorXd& x);

// Layer 5: sum of normalized strengths times rule outputs.
double predict_raw(const AnfisModel& model, const Eigen::VectorXd& x);

double logistic(double t);

// probability = logistic(predict_raw); label 1 iff probability >= threshold,
// so a dead tie classifies as attack.
Classification classify(const AnfisModel& model, const Eigen::VectorXd& x);

// Min-max transform through the model's embedded scaler, unclamped; a
// constant training column maps to 0. No-op when the model carries no scaler.
Eigen::VectorXd apply_scaler(const AnfisModel& model, const Eigen::VectorXd& x);

}  // namespace fasa::anfis
