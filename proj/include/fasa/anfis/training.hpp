#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fasa/anfis/model.hpp"
#include "fasa/metrics/metrics.hpp"

namespace fasa::anfis {

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int k_folds = 5;
  double ridge_lambda = 1e-6;
  uint64_t seed = 1;

  void validate() const;
};

struct FoldResult {
  int fold = 0;
  fasa::metrics::EvalReport report;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean BCE after each epoch's forward pass
  std::vector<FoldResult> folds;   // filled by fit_cv
  std::string snapshot_id;         // content hash of the final model document
};

// Ridge least squares over the consequents with premises held fixed:
// minimizes ||A theta - targets||^2 + ridge_lambda ||theta||^2, where row s of
// A is [wbar_1 x_s, wbar_1, ..., wbar_R x_s, wbar_R]. targets may be any
// finite reals. With ridge_lambda = 0 an ill-conditioned system is an error.
void solve_consequents(AnfisModel& model, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& targets, double ridge_lambda);

// (||A theta - targets||^2 + ridge_lambda ||theta||^2) / N for the model's
// current consequents; what solve_consequents minimizes.
double consequent_objective(const AnfisModel& model, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& targets, double ridge_lambda);

// Mean binary cross entropy of logistic(predict_raw) against labels in {0,1},
// probabilities clamped to [1e-12, 1 - 1e-12].
double bce_loss(const AnfisModel& model, const Eigen::MatrixXd& X,
                const std::vector<int>& labels);

struct MfGradient {
  double d_amplitude = 0.0;
  double d_center = 0.0;
  double d_sigma = 0.0;
};

// d(mean BCE)/d{a, c, sigma} for every membership function, analytic.
using PremiseGradients = std::vector<std::vector<MfGradient>>;
PremiseGradients premise_gradients(const AnfisModel& model, const Eigen::MatrixXd& X,
                                   const std::vector<int>& labels);

// Flat premise parameter vector in the order input-major, MF-minor,
// [amplitude, center, sigma] per MF. Pairs with premise_gradients for the
// optimizer step.
Eigen::VectorXd flatten_premises(const AnfisModel& model);
void unflatten_premises(AnfisModel& model, const Eigen::VectorXd& flat);
Eigen::VectorXd flatten_gradients(const PremiseGradients& grads);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;

  static AdamState zeros(Eigen::Index n);
};

// One bias-corrected ADAM update; step_index counts from 1.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads,
               AdamState& state, int step_index, const TrainConfig& config);

// Hybrid training: per epoch, (1) forward pass solving the consequents by
// ridge least squares against targets 2y - 1, (2) one full-batch ADAM step on
// the premise parameters against the BCE loss. Sigma is clamped to >= 1e-4
// after every update.
TrainReport fit(AnfisModel& model, const Eigen::MatrixXd& X,
                const std::vector<int>& labels, const TrainConfig& config);

// Stratified k-fold cross validation: per fold, trains a fresh copy of the
// initial model and evaluates on the held-out part; then fits the passed
// model on all rows.
TrainReport fit_cv(AnfisModel& model, const Eigen::MatrixXd& X,
                   const std::vector<int>& labels, const TrainConfig& config);

}  // namespace fasa::anfis
