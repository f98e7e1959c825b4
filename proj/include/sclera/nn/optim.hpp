#pragma once

#include "sclera/nn/layer.hpp"

#include <cmath>
#include <vector>

namespace sclera::nn {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
class Adam {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Adam(std::vector<Parameter<Scalar>*> params, AdamOptions opt) : params_(std::move(params)), opt_(opt) {
    for (auto* p : params_) {
      m_.push_back(Vector::Zero(p->value.size()));
      v_.push_back(Vector::Zero(p->value.size()));
    }
  }

  void step() {
    ++t_;
    const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
    const Scalar b1 = static_cast<Scalar>(opt_.beta1), b2 = static_cast<Scalar>(opt_.beta2);
    const Scalar lr = static_cast<Scalar>(opt_.learning_rate * std::sqrt(c2) / c1);
    const Scalar eps = static_cast<Scalar>(opt_.epsilon * std::sqrt(c2));
    for (size_t i = 0; i < params_.size(); ++i) {
      auto& p = *params_[i];
      m_[i] = b1 * m_[i] + (Scalar(1) - b1) * p.grad;
      v_[i] = b2 * v_[i] + (Scalar(1) - b2) * p.grad.cwiseProduct(p.grad);
      p.value.array() -= lr * m_[i].array() / (v_[i].array().sqrt() + eps);
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->grad.setZero();
  }

  long steps() const { return t_; }
  void set_learning_rate(double lr) { opt_.learning_rate = lr; }

 private:
  std::vector<Parameter<Scalar>*> params_;
  AdamOptions opt_;
  std::vector<Vector> m_, v_;
  long t_ = 0;
};

/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
template <typename Scalar>
double clip_grad_norm(const std::vector<Parameter<Scalar>*>& params, double max_norm) {
  double sq = 0.0;
  for (auto* p : params) sq += static_cast<double>(p->grad.squaredNorm());
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const Scalar s = static_cast<Scalar>(max_norm / (norm + 1e-12));
    for (auto* p : params) p->grad *= s;
  }
  return norm;
}

}  // namespace sclera::nn
