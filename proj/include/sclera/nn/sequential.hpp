#pragma once

#include "sclera/nn/activation.hpp"
#include "sclera/nn/batchnorm.hpp"
#include "sclera/nn/conv.hpp"

#include <optional>

namespace sclera::nn {

template <typename Scalar>
class Sequential : public Layer<Scalar> {
 public:
  Sequential() = default;

  template <typename L>
  L& add(std::unique_ptr<L> layer) {
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    return add(std::make_unique<L>(std::forward<Args>(args)...));
  }

  size_t size() const { return layers_.size(); }
  Layer<Scalar>& operator[](size_t i) { return *layers_[i]; }

  Shape output_shape(const Shape& in) const override {
    Shape s = in;
    for (const auto& l : layers_) s = l->output_shape(s);
    return s;
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    Tensor<Scalar> h = x;
    for (auto& l : layers_) h = l->forward(h, mode);
    return h;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    Tensor<Scalar> g = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
  }

  void visit_parameters(const std::string& prefix, const ParameterVisitor<Scalar>& visit) override {
    for (size_t i = 0; i < layers_.size(); ++i) layers_[i]->visit_parameters(join_name(prefix, std::to_string(i)), visit);
  }

  std::vector<LayerSpec> describe(const Shape& in) const override {
    std::vector<LayerSpec> rows;
    Shape s = in;
    for (const auto& l : layers_) {
      for (auto& r : l->describe(s)) rows.push_back(std::move(r));
      s = l->output_shape(s);
    }
    return rows;
  }

 private:
  std::vector<LayerPtr<Scalar>> layers_;
};

/// Convolution, optional batch norm, optional (leaky) ReLU; one table row.
template <typename Scalar>
class ConvBlock : public Layer<Scalar> {
 public:
  struct Options {
    bool batch_norm = true;
    std::optional<Scalar> activation_slope = Scalar(0);  // nullopt: linear
    std::string label = "conv";
  };

  ConvBlock(Index in, Index out, ConvGeometry g, Options opt)
      : opt_(std::move(opt)), conv_(in, out, g, !opt_.batch_norm) {
    if (opt_.batch_norm) bn_.emplace(out);
    if (opt_.activation_slope) act_.emplace(*opt_.activation_slope);
  }

  Conv2d<Scalar>& conv() { return conv_; }

  Shape output_shape(const Shape& in) const override { return conv_.output_shape(in); }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode mode) override {
    Tensor<Scalar> h = conv_.forward(x, mode);
    if (bn_) h = bn_->forward(h, mode);
    if (act_) h = act_->forward(h, mode);
    return h;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    Tensor<Scalar> g = grad_out;
    if (act_) g = act_->backward(g);
    if (bn_) g = bn_->backward(g);
    return conv_.backward(g);
  }

  void visit_parameters(const std::string& prefix, const ParameterVisitor<Scalar>& visit) override {
    conv_.visit_parameters(join_name(prefix, "conv"), visit);
    if (bn_) bn_->visit_parameters(join_name(prefix, "bn"), visit);
  }

  std::vector<LayerSpec> describe(const Shape& in) const override {
    auto rows = conv_.describe(in);
    rows.front().kind = opt_.label;
    return rows;
  }

 private:
  Options opt_;
  Conv2d<Scalar> conv_;
  std::optional<BatchNorm2d<Scalar>> bn_;
  std::optional<LeakyReLU<Scalar>> act_;
};

/// Top-left crop of every sample to `target` (height, width); channels kept.
template <typename Scalar>
Tensor<Scalar> crop_top_left(const Tensor<Scalar>& x, Index height, Index width) {
  if (height > x.height() || width > x.width()) throw std::invalid_argument("crop larger than input");
  Tensor<Scalar> out(x.batch(), {x.channels(), height, width});
  for (Index n = 0; n < x.batch(); ++n)
    for (Index c = 0; c < x.channels(); ++c)
      for (Index y = 0; y < height; ++y)
        for (Index xx = 0; xx < width; ++xx) out(n, c, y, xx) = x(n, c, y, xx);
  return out;
}

/// Adjoint of crop_top_left: zero-pads a gradient back to `full`.
template <typename Scalar>
Tensor<Scalar> uncrop_top_left(const Tensor<Scalar>& g, const Shape& full) {
  Tensor<Scalar> out(g.batch(), full);
  for (Index n = 0; n < g.batch(); ++n)
    for (Index c = 0; c < g.channels(); ++c)
      for (Index y = 0; y < g.height(); ++y)
        for (Index xx = 0; xx < g.width(); ++xx) out(n, c, y, xx) = g(n, c, y, xx);
  return out;
}

/// Channel concatenation [a; b] per sample.
template <typename Scalar>
Tensor<Scalar> concat_channels(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.batch() != b.batch() || a.height() != b.height() || a.width() != b.width())
    throw std::invalid_argument("concat: spatial/batch mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  Tensor<Scalar> out(a.batch(), {a.channels() + b.channels(), a.height(), a.width()});
  for (Index n = 0; n < a.batch(); ++n) {
    out.sample(n).topRows(a.channels()) = a.sample(n);
    out.sample(n).bottomRows(b.channels()) = b.sample(n);
  }
  return out;
}

template <typename Scalar>
std::pair<Tensor<Scalar>, Tensor<Scalar>> split_channels(const Tensor<Scalar>& x, Index first) {
  Tensor<Scalar> a(x.batch(), {first, x.height(), x.width()});
  Tensor<Scalar> b(x.batch(), {x.channels() - first, x.height(), x.width()});
  for (Index n = 0; n < x.batch(); ++n) {
    a.sample(n) = x.sample(n).topRows(first);
    b.sample(n) = x.sample(n).bottomRows(x.channels() - first);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace sclera::nn
