#pragma once

#include <Eigen/Dense>

#include "uhfl/dataset.hpp"

namespace uhfl {

struct MlpShape {
  int input = 32;
  int hidden = 64;
  int classes = 10;

  int n_params() const { return (input + 1) * hidden + (hidden + 1) * classes; }
};

/// Two-layer ReLU MLP over a flat parameter vector, layout
/// [W1 (hidden x input), b1, W2 (classes x hidden), b2].
struct Mlp {
  MlpShape shape;
  Eigen::VectorXd params;

  explicit Mlp(MlpShape s = {}) : shape(s), params(Eigen::VectorXd::Zero(s.n_params())) {}

  /// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases.
  void init(Rng& rng);

  /// classes x batch logits for the given sample rows.
  Eigen::MatrixXd logits(const Eigen::MatrixXd& x_rows) const;

  /// Mean cross-entropy over the indexed samples.
  double loss(const Dataset& data, const std::vector<int>& idx) const;

  /// Mean cross-entropy and its gradient w.r.t. params; throws
  /// NumericalFailure on non-finite loss.
  double loss_and_grad(const Dataset& data, const std::vector<int>& idx,
                       Eigen::VectorXd& grad) const;
};

/// Argmax-prediction accuracy over the full dataset.
double evaluate(const Mlp& model, const Dataset& data);

/// Mean cross-entropy over the full dataset.
double full_loss(const Mlp& model, const Dataset& data);

}  // namespace uhfl
