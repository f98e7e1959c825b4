#pragma once

#include "sclera/nn/layer.hpp"

namespace sclera::nn {

/// A trainable network with a fixed input contract.
template <typename Scalar>
class Network : public Module<Scalar> {
 public:
  virtual Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) = 0;
  virtual Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) = 0;
  virtual Shape input_shape() const = 0;
  virtual Shape output_shape() const = 0;
  virtual ModelSpec describe() const = 0;

 protected:
  void check_input(const Tensor<Scalar>& x, const char* who) const {
    require_shape(x.shape(), input_shape(), std::string(who) + " input");
  }
};

}  // namespace sclera::nn
