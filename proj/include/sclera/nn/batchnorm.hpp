#pragma once

#include "sclera/nn/layer.hpp"

#include <stdexcept>

namespace sclera::nn {

/// Per-channel batch normalisation over (batch, height, width). Eval mode
/// uses the running statistics, so inference is a pure function of the weights.
template <typename Scalar>
class BatchNorm2d : public Layer<Scalar> {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BatchNorm2d(Index channels, Scalar momentum = Scalar(0.1), Scalar eps = Scalar(1e-5))
      : channels_(channels), momentum_(momentum), eps_(eps), gamma_({channels}), beta_({channels}),
        running_mean_({channels}, false), running_var_({channels}, false) {
    gamma_.value.setOnes();
    running_var_.value.setOnes();
  }

  Shape output_shape(const Shape& in) const override {
    if (in.channels != channels_) throw std::invalid_argument("batchnorm: channel mismatch");
    return in;
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    output_shape(x.shape());
    const Index n_batch = x.batch();
    const Index area = x.shape().area();
    const Scalar count = static_cast<Scalar>(n_batch * area);
    Vector mean = Vector::Zero(channels_), var = Vector::Zero(channels_);
    if (mode == Mode::Train) {
      for (Index n = 0; n < n_batch; ++n) mean += x.sample(n).rowwise().sum();
      mean /= count;
      for (Index n = 0; n < n_batch; ++n) var += (x.sample(n).colwise() - mean).rowwise().squaredNorm();
      var /= count;
      const Scalar unbias = count > 1 ? count / (count - 1) : Scalar(1);
      running_mean_.value = (Scalar(1) - momentum_) * running_mean_.value + momentum_ * mean;
      running_var_.value = (Scalar(1) - momentum_) * running_var_.value + momentum_ * unbias * var;
    } else {
      mean = running_mean_.value;
      var = running_var_.value;
    }
    inv_std_ = (var.array() + eps_).rsqrt().matrix();
    normalized_ = Tensor<Scalar>(n_batch, x.shape());
    Tensor<Scalar> y(n_batch, x.shape());
    for (Index n = 0; n < n_batch; ++n) {
      normalized_.sample(n) = inv_std_.asDiagonal() * (x.sample(n).colwise() - mean);
      y.sample(n) = gamma_.value.asDiagonal() * normalized_.sample(n);
      y.sample(n).colwise() += beta_.value;
    }
    last_mode_ = mode;
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    const Index n_batch = grad_out.batch();
    const Scalar count = static_cast<Scalar>(n_batch * grad_out.shape().area());
    Vector sum_g = Vector::Zero(channels_), sum_gx = Vector::Zero(channels_);
    for (Index n = 0; n < n_batch; ++n) {
      sum_g += grad_out.sample(n).rowwise().sum();
      sum_gx += grad_out.sample(n).cwiseProduct(normalized_.sample(n)).rowwise().sum();
    }
    gamma_.grad += sum_gx;
    beta_.grad += sum_g;
    Tensor<Scalar> dx(n_batch, grad_out.shape());
    const Vector scale = gamma_.value.cwiseProduct(inv_std_);
    for (Index n = 0; n < n_batch; ++n) {
      if (last_mode_ == Mode::Train) {
        auto centered = (grad_out.sample(n).colwise() - sum_g / count).eval();
        centered -= (sum_gx / count).asDiagonal() * normalized_.sample(n);
        dx.sample(n) = scale.asDiagonal() * centered;
      } else {
        dx.sample(n) = scale.asDiagonal() * grad_out.sample(n);
      }
    }
    return dx;
  }

  void visit_parameters(const std::string& prefix, const ParameterVisitor<Scalar>& visit) override {
    visit(join_name(prefix, "gamma"), gamma_);
    visit(join_name(prefix, "beta"), beta_);
    visit(join_name(prefix, "running_mean"), running_mean_);
    visit(join_name(prefix, "running_var"), running_var_);
  }

 private:
  Index channels_;
  Scalar momentum_, eps_;
  Parameter<Scalar> gamma_, beta_, running_mean_, running_var_;
  Vector inv_std_;
  Tensor<Scalar> normalized_;
  Mode last_mode_ = Mode::Train;
};

}  // namespace sclera::nn
