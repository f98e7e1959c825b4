#pragma once

#include "sclera/tensor.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sclera::nn {

enum class Mode { Train, Eval };

/// A learnable (or persistent, when !trainable) array with its gradient.
template <typename Scalar>
struct Parameter {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector value;
  Vector grad;
  std::vector<Index> dims;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::vector<Index> d, bool is_trainable = true) : dims(std::move(d)), trainable(is_trainable) {
    Index n = 1;
    for (Index v : dims) n *= v;
    value = Vector::Zero(n);
    grad = Vector::Zero(n);
  }
};

template <typename Scalar>
using ParameterVisitor = std::function<void(const std::string& name, Parameter<Scalar>& p)>;

inline std::string join_name(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

/// One row of an architecture table.
struct LayerSpec {
  std::string kind;  // conv, max, enc, dec, up, detection, ...
  Index filters = 0;
  Index kernel = 0;
  Index stride = 0;
  std::optional<Shape> input;
  std::optional<Shape> output;
};

struct ModelSpec {
  std::string name;
  std::vector<LayerSpec> layers;
  int first_index = 0;
  bool show_stride = true;
};

/// Fixed-width text rendering used by `describe-model` and the golden files.
std::string format_model_spec(const ModelSpec& spec);

template <typename Scalar>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) = 0;
  /// Consumes d(loss)/d(output) of the most recent forward, accumulates
  /// parameter gradients and returns d(loss)/d(input).
  virtual Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) = 0;
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual void visit_parameters(const std::string&, const ParameterVisitor<Scalar>&) {}
  /// Table rows this layer contributes; empty for layers folded into a
  /// neighbouring row (activations, normalization).
  virtual std::vector<LayerSpec> describe(const Shape& in) const {
    (void)in;
    return {};
  }
};

template <typename Scalar>
using LayerPtr = std::unique_ptr<Layer<Scalar>>;

/// Anything with parameters that can be trained, checkpointed and described.
template <typename Scalar>
class Module {
 public:
  virtual ~Module() = default;
  virtual void visit_parameters(const ParameterVisitor<Scalar>& visit) = 0;

  std::vector<Parameter<Scalar>*> parameters(bool trainable_only = true) {
    std::vector<Parameter<Scalar>*> out;
    visit_parameters([&](const std::string&, Parameter<Scalar>& p) {
      if (!trainable_only || p.trainable) out.push_back(&p);
    });
    return out;
  }

  void zero_grad() {
    visit_parameters([](const std::string&, Parameter<Scalar>& p) { p.grad.setZero(); });
  }

  Index parameter_count() {
    Index n = 0;
    for (auto* p : parameters()) n += p->value.size();
    return n;
  }
};

}  // namespace sclera::nn
