#pragma once

#include "sclera/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace sclera::nn {

template <typename Scalar>
struct LossResult {
  Scalar value = Scalar(0);
  Tensor<Scalar> grad;  // d(value)/d(input)
};

/// Channel-wise softmax of N x C x H x W logits.
template <typename Scalar>
Tensor<Scalar> softmax_channels(const Tensor<Scalar>& logits) {
  Tensor<Scalar> p(logits.batch(), logits.shape());
  for (Index n = 0; n < logits.batch(); ++n) {
    const auto z = logits.sample(n);
    auto out = p.sample(n);
    const auto shifted = (z.rowwise() - z.colwise().maxCoeff()).array().exp().eval();
    out = (shifted.rowwise() / shifted.colwise().sum()).matrix();
  }
  return p;
}

/// Mean per-pixel cross-entropy. `labels` is N x 1 x H x W holding class
/// indices; `class_weights` (optional, size C) scales each pixel's term by the
/// weight of its true class.
template <typename Scalar>
LossResult<Scalar> softmax_cross_entropy(const Tensor<Scalar>& logits, const Tensor<Scalar>& labels,
                                         const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* class_weights = nullptr) {
  if (labels.batch() != logits.batch() || labels.channels() != 1 || labels.height() != logits.height() ||
      labels.width() != logits.width()) {
    throw std::invalid_argument("cross-entropy: labels " + to_string(labels.shape()) + " do not match logits " +
                                to_string(logits.shape()));
  }
  LossResult<Scalar> r;
  r.grad = softmax_channels(logits);
  const Index pixels = logits.batch() * logits.shape().area();
  const Scalar inv = Scalar(1) / static_cast<Scalar>(pixels);
  double total = 0.0;
  for (Index n = 0; n < logits.batch(); ++n) {
    const auto z = logits.sample(n);
    auto g = r.grad.sample(n);
    const auto lab = labels.sample(n);
    for (Index j = 0; j < z.cols(); ++j) {
      const Index cls = static_cast<Index>(lab(0, j) + Scalar(0.5));
      const Scalar zmax = z.col(j).maxCoeff();
      const Scalar lse = zmax + std::log((z.col(j).array() - zmax).exp().sum());
      const Scalar w = class_weights ? (*class_weights)[cls] : Scalar(1);
      total += static_cast<double>(w * (lse - z(cls, j)));
      g(cls, j) -= Scalar(1);
      g.col(j) *= w * inv;
    }
  }
  r.value = static_cast<Scalar>(total) * inv;
  return r;
}

/// Mean binary cross-entropy on logits against a constant target (0 or 1).
template <typename Scalar>
LossResult<Scalar> bce_with_logits(const Tensor<Scalar>& logits, Scalar target) {
  LossResult<Scalar> r;
  r.grad = Tensor<Scalar>(logits.batch(), logits.shape());
  const auto z = logits.values().array();
  const Scalar inv = Scalar(1) / static_cast<Scalar>(logits.size());
  r.value = (z.max(Scalar(0)) - z * target + (Scalar(1) + (-z.abs()).exp()).log()).sum() * inv;
  r.grad.values() = ((Scalar(1) / (Scalar(1) + (-z).exp())) - target) * inv;
  return r;
}

/// Mean absolute error; subgradient 0 at exact equality.
template <typename Scalar>
LossResult<Scalar> l1_loss(const Tensor<Scalar>& pred, const Tensor<Scalar>& target) {
  if (pred.size() != target.size()) throw std::invalid_argument("l1: size mismatch");
  LossResult<Scalar> r;
  const Scalar inv = Scalar(1) / static_cast<Scalar>(pred.size());
  const auto d = (pred.values() - target.values()).array();
  r.value = d.abs().sum() * inv;
  r.grad = Tensor<Scalar>(pred.batch(), pred.shape());
  r.grad.values() = d.sign() * inv;
  return r;
}

}  // namespace sclera::nn
