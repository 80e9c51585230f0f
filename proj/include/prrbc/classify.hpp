#ifndef PRRBC_CLASSIFY_HPP
#define PRRBC_CLASSIFY_HPP

#include <Eigen/Core>
#include <array>
#include <span>
#include <vector>

#include "prrbc/bridge.hpp"
#include "prrbc/features.hpp"

namespace prrbc {

// Two-class perceptron with one tanh hidden layer and a softmax output,
// trained on z-scored features by full-batch gradient descent with adaptive
// step halving and validation early stopping.
struct MlpClassifier {
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;
  Eigen::VectorXd b2;
  Eigen::VectorXd feat_mean, feat_scale;  // training-partition statistics

  std::vector<double> train_curve, val_curve;
  double val_accuracy = 0;
  int epochs_run = 0;

  Eigen::Vector2d probabilities(const Eigen::VectorXd& feature) const;
  // labels 1 (undamaged) and 2 (damaged); exact ties resolve to 1
  int predict(const Eigen::VectorXd& feature) const;
};

struct TrainConfig {
  int hidden = 10;
  int max_epochs = 1000;
  double val_fraction = 0.2;
  int patience = 6;  // non-improving validation checks before stopping
};

MlpClassifier train_classifier(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                               TrainConfig cfg, uint64_t seed);

// Parameter packing and the batch loss/gradient, exposed for the
// finite-difference gradient check.
Eigen::VectorXd mlp_pack(const MlpClassifier& m);
void mlp_unpack(const Eigen::VectorXd& p, MlpClassifier& m);
double mlp_loss_grad(MlpClassifier& m, const Eigen::VectorXd& params, const Eigen::MatrixXd& X,
                     const std::vector<int>& y01, Eigen::VectorXd* grad);

// One synthetic observation: per damage-candidate component, the noiseless
// sensor trajectories of the chosen layout.
struct LabeledSample {
  long id = 0;
  uint64_t seed = 0;
  std::array<int, 2> labels = {1, 1};
  std::array<CorrelationInput, 2> signals;
  Eigen::VectorXd parameters;  // the 45-entry vector
};

struct TTConfig {
  int n_tt = 0;
  double phi = 0.7;
  int n_part = 100;
  double sigma = 0.02;
  FeatureKind kind = FeatureKind::IPVx;
  uint64_t seed = 1;
  TrainConfig train;
};

struct ClassificationReport {
  TTConfig config;
  std::array<std::vector<double>, 2> err_comp;  // per partition, components 8 and 16
  std::vector<double> err_binary;               // structure damaged yes/no
  std::vector<double> err_state;                // full damage tuple
  int resampled_partitions = 0;

  static double mean(const std::vector<double>& v);
  static double stddev(const std::vector<double>& v);
};

// Train per-component classifiers on the noiseless train fraction, perturb the
// test fraction's trajectories with noise, re-extract features and evaluate;
// repeated over random partitions.  Binary and full-state predictions derive
// from the per-component classifiers without retraining.
ClassificationReport tt_learning(std::span<const LabeledSample> dataset, const TTConfig& cfg,
                                 bool parallel = true);

// (any component damaged -> 2, else 1; and the per-component tuple)
std::pair<int, std::array<int, 2>> derive_structure_predictions(const std::array<int, 2>& pred);

}  // namespace prrbc

#endif
