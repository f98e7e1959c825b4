#pragma once

#include "sclera/nn/layer.hpp"

#include <cmath>

namespace sclera::nn {

/// max(x, slope * x); slope 0 is a plain ReLU.
template <typename Scalar>
class LeakyReLU : public Layer<Scalar> {
 public:
  explicit LeakyReLU(Scalar slope = Scalar(0)) : slope_(slope) {}

  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode) override {
    input_ = x;
    Tensor<Scalar> y = x;
    if (slope_ == Scalar(0)) y.values() = x.values().array().max(Scalar(0));
    else y.values() = (x.values().array() > Scalar(0)).select(x.values().array(), x.values().array() * slope_);
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    Tensor<Scalar> dx = grad_out;
    dx.values() = (input_.values().array() > Scalar(0)).select(grad_out.values().array(),
                                                               grad_out.values().array() * slope_);
    return dx;
  }

 private:
  Scalar slope_;
  Tensor<Scalar> input_;
};

template <typename Scalar>
class Tanh : public Layer<Scalar> {
 public:
  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode) override {
    output_ = x;
    output_.values() = x.values().array().tanh();
    return output_;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    Tensor<Scalar> dx = grad_out;
    dx.values() = grad_out.values().array() * (Scalar(1) - output_.values().array().square());
    return dx;
  }

 private:
  Tensor<Scalar> output_;
};

}  // namespace sclera::nn
