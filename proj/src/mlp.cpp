#include "uhfl/mlp.hpp"

#include <cmath>

namespace uhfl {
namespace {

struct Views {
  Eigen::Map<const Eigen::MatrixXd> w1, w2;
  Eigen::Map<const Eigen::VectorXd> b1, b2;
};

Views view(const MlpShape& s, const Eigen::VectorXd& p) {
  const double* d = p.data();
  const int n1 = s.hidden * s.input;
  const int n2 = s.classes * s.hidden;
  return {Eigen::Map<const Eigen::MatrixXd>(d, s.hidden, s.input),
          Eigen::Map<const Eigen::MatrixXd>(d + n1 + s.hidden, s.classes, s.hidden),
          Eigen::Map<const Eigen::VectorXd>(d + n1, s.hidden),
          Eigen::Map<const Eigen::VectorXd>(d + n1 + s.hidden + n2, s.classes)};
}

Eigen::MatrixXd gather_rows(const Dataset& data, const std::vector<int>& idx) {
  Eigen::MatrixXd x(idx.size(), data.dim());
  for (std::size_t i = 0; i < idx.size(); ++i) x.row(i) = data.x.row(idx[i]);
  return x;
}

// column-wise softmax in place; returns mean cross-entropy given labels
double softmax_xent(Eigen::MatrixXd& logits, const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    auto col = logits.col(j);
    const double mx = col.maxCoeff();
    col = (col.array() - mx).exp();
    const double z = col.sum();
    total += -std::log(col(labels[j]) / z);
    col /= z;
  }
  return total / logits.cols();
}

}  // namespace

void Mlp::init(Rng& rng) {
  params.setZero();
  auto fill = [&](double* dst, int n, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    for (int i = 0; i < n; ++i) dst[i] = u(rng);
  };
  const int n1 = shape.hidden * shape.input;
  const int n2 = shape.classes * shape.hidden;
  fill(params.data(), n1, 1.0 / std::sqrt(shape.input));
  fill(params.data() + n1 + shape.hidden, n2, 1.0 / std::sqrt(shape.hidden));
}

Eigen::MatrixXd Mlp::logits(const Eigen::MatrixXd& x_rows) const {
  const Views v = view(shape, params);
  Eigen::MatrixXd hidden = (v.w1 * x_rows.transpose()).colwise() + v.b1;
  hidden = hidden.cwiseMax(0.0);
  return (v.w2 * hidden).colwise() + v.b2;
}

double Mlp::loss(const Dataset& data, const std::vector<int>& idx) const {
  Eigen::MatrixXd lg = logits(gather_rows(data, idx));
  std::vector<int> labels(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = data.y[idx[i]];
  return softmax_xent(lg, labels);
}

double Mlp::loss_and_grad(const Dataset& data, const std::vector<int>& idx,
                          Eigen::VectorXd& grad) const {
  if (idx.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
  const Views v = view(shape, params);
  const Eigen::MatrixXd x = gather_rows(data, idx);
  Eigen::MatrixXd pre = (v.w1 * x.transpose()).colwise() + v.b1;  // hidden x batch
  Eigen::MatrixXd hid = pre.cwiseMax(0.0);
  Eigen::MatrixXd probs = (v.w2 * hid).colwise() + v.b2;  // classes x batch
  std::vector<int> labels(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = data.y[idx[i]];
  const double l = softmax_xent(probs, labels);
  if (!std::isfinite(l)) throw NumericalFailure("loss_and_grad: non-finite loss");

  const double inv_n = 1.0 / static_cast<double>(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) probs(labels[j], j) -= 1.0;
  probs *= inv_n;  // now d(loss)/d(logits)

  grad.resize(shape.n_params());
  const int n1 = shape.hidden * shape.input;
  const int n2 = shape.classes * shape.hidden;
  Eigen::Map<Eigen::MatrixXd> gw1(grad.data(), shape.hidden, shape.input);
  Eigen::Map<Eigen::VectorXd> gb1(grad.data() + n1, shape.hidden);
  Eigen::Map<Eigen::MatrixXd> gw2(grad.data() + n1 + shape.hidden, shape.classes, shape.hidden);
  Eigen::Map<Eigen::VectorXd> gb2(grad.data() + n1 + shape.hidden + n2, shape.classes);

  gw2 = probs * hid.transpose();
  gb2 = probs.rowwise().sum();
  Eigen::MatrixXd dhid = v.w2.transpose() * probs;
  dhid = (pre.array() > 0.0).select(dhid, 0.0);
  gw1 = dhid * x;
  gb1 = dhid.rowwise().sum();
  return l;
}

double evaluate(const Mlp& model, const Dataset& data) {
  if (data.n() == 0) throw std::invalid_argument("evaluate: empty dataset");
  const Eigen::MatrixXd lg = model.logits(data.x);
  int correct = 0;
  for (Eigen::Index j = 0; j < lg.cols(); ++j) {
    Eigen::Index arg = 0;
    lg.col(j).maxCoeff(&arg);
    if (static_cast<int>(arg) == data.y[j]) ++correct;
  }
  return static_cast<double>(correct) / data.n();
}

double full_loss(const Mlp& model, const Dataset& data) {
  Eigen::MatrixXd lg = model.logits(data.x);
  return softmax_xent(lg, data.y);
}

}  // namespace uhfl
