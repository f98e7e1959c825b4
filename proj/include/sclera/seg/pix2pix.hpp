#pragma once

#include "sclera/nn/network.hpp"
#include "sclera/nn/sequential.hpp"

#include <random>

namespace sclera::seg {

struct GeneratorConfig {
  Shape input{3, 256, 256};
  Index out_channels = 3;
  Index base_filters = 64;
  Index width_divisor = 1;
  /// Number of stride-2 levels; 0 derives it from the input (down to 1x1).
  Index depth = 0;
  std::uint64_t seed = 0;
};

/// U-Net generator: 4x4 stride-2 convolutions down to a 1x1 bottleneck and
/// mirrored transposed convolutions back up, each decoder level fed the
/// concatenation of the matching encoder activation and the level below.
/// Output passes through tanh.
template <typename Scalar>
class UNetGenerator : public nn::Network<Scalar> {
 public:
  explicit UNetGenerator(GeneratorConfig cfg) : cfg_(cfg) {
    if (cfg_.depth == 0) {
      Index extent = std::min(cfg_.input.height, cfg_.input.width);
      while (extent > 1 && cfg_.depth < 8) {
        extent /= 2;
        ++cfg_.depth;
      }
    }
    const Index span = Index(1) << cfg_.depth;
    if (cfg_.depth < 2 || cfg_.input.height % span != 0 || cfg_.input.width % span != 0)
      throw std::invalid_argument("unet: input " + to_string(cfg_.input) + " not divisible by 2^depth");
    std::mt19937_64 rng(cfg_.seed);
    const Index d = cfg_.depth;
    const nn::ConvGeometry g{4, 2, 1};
    down_.resize(d);
    up_.resize(d);
    for (Index i = 0; i < d; ++i) {
      auto& down = down_[i];
      const Index in = i == 0 ? cfg_.input.channels : filters(i - 1);
      if (i > 0) down.template emplace<nn::LeakyReLU<Scalar>>(Scalar(0.2));
      down.template emplace<nn::Conv2d<Scalar>>(in, filters(i), g, i == 0 || i == d - 1).init_he(rng);
      if (i > 0 && i < d - 1) down.template emplace<nn::BatchNorm2d<Scalar>>(filters(i));
    }
    for (Index i = 0; i < d; ++i) {
      auto& up = up_[i];
      up.template emplace<nn::LeakyReLU<Scalar>>(Scalar(0));
      const Index in = i == d - 1 ? filters(i) : 2 * filters(i);
      const Index out = i == 0 ? cfg_.out_channels : filters(i - 1);
      up.template emplace<nn::ConvTranspose2d<Scalar>>(in, out, g, i == 0).init_he(rng);
      if (i == 0) up.template emplace<nn::Tanh<Scalar>>();
      else up.template emplace<nn::BatchNorm2d<Scalar>>(out);
    }
  }

  const GeneratorConfig& config() const { return cfg_; }
  Index depth() const { return cfg_.depth; }
  Shape input_shape() const override { return cfg_.input; }
  Shape output_shape() const override { return {cfg_.out_channels, cfg_.input.height, cfg_.input.width}; }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, nn::Mode mode) override {
    this->check_input(x, "unet generator");
    const Index d = cfg_.depth;
    encoded_.assign(d, {});
    for (Index i = 0; i < d; ++i) encoded_[i] = down_[i].forward(i == 0 ? x : encoded_[i - 1], mode);
    Tensor<Scalar> h = up_[d - 1].forward(encoded_[d - 1], mode);
    for (Index i = d - 2; i >= 0; --i) h = up_[i].forward(nn::concat_channels(encoded_[i], h), mode);
    return h;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    const Index d = cfg_.depth;
    std::vector<Tensor<Scalar>> g_enc(d);
    Tensor<Scalar> g = grad_out;
    for (Index i = 0; i < d - 1; ++i) {
      auto [skip, below] = nn::split_channels(up_[i].backward(g), filters(i));
      g_enc[i] = std::move(skip);
      g = std::move(below);
    }
    g_enc[d - 1] = up_[d - 1].backward(g);
    Tensor<Scalar> g_in;
    for (Index i = d - 1; i >= 0; --i) {
      g_in = down_[i].backward(g_enc[i]);
      if (i > 0) g_enc[i - 1].values() += g_in.values();
    }
    return g_in;
  }

  void visit_parameters(const nn::ParameterVisitor<Scalar>& visit) override {
    for (size_t i = 0; i < down_.size(); ++i) down_[i].visit_parameters("down" + std::to_string(i), visit);
    for (size_t i = 0; i < up_.size(); ++i) up_[i].visit_parameters("up" + std::to_string(i), visit);
  }

  nn::ModelSpec describe() const override {
    nn::ModelSpec spec{"unet-generator", {}, 1, true};
    std::vector<Shape> shapes;
    Shape s = cfg_.input;
    for (const auto& down : down_) {
      for (auto& r : down.describe(s)) {
        r.kind = "down";
        spec.layers.push_back(r);
      }
      s = down.output_shape(s);
      shapes.push_back(s);
    }
    for (Index i = cfg_.depth - 1; i >= 0; --i) {
      if (i < cfg_.depth - 1) s = {shapes[i].channels + s.channels, s.height, s.width};
      for (auto& r : up_[i].describe(s)) {
        r.kind = "up";
        spec.layers.push_back(r);
      }
      s = up_[i].output_shape(s);
    }
    spec.layers.push_back({"tanh", 0, 0, 0, s, s});
    return spec;
  }

 private:
  Index filters(Index level) const {
    const Index mult = Index(1) << std::min<Index>(level, 3);
    return std::max<Index>(1, cfg_.base_filters * mult / cfg_.width_divisor);
  }

  GeneratorConfig cfg_;
  std::vector<nn::Sequential<Scalar>> down_, up_;
  std::vector<Tensor<Scalar>> encoded_;
};

struct DiscriminatorConfig {
  Shape input{6, 256, 256};
  Index base_filters = 64;
  Index width_divisor = 1;
  Index layers = 3;
  std::uint64_t seed = 0;
};

/// PatchGAN: stride-2 4x4 convolutions, then two stride-1 4x4 convolutions;
/// each output logit judges one receptive-field patch of the
/// (image, mask) channel-concatenated pair. Three layers give 70x70 patches.
template <typename Scalar>
class PatchDiscriminator : public nn::Network<Scalar> {
 public:
  explicit PatchDiscriminator(DiscriminatorConfig cfg) : cfg_(cfg) {
    std::mt19937_64 rng(cfg.seed);
    using Block = nn::ConvBlock<Scalar>;
    using Options = typename Block::Options;
    Index in = cfg.input.channels;
    Index out = filters(0);
    layers_.template emplace<Block>(in, out, nn::ConvGeometry{4, 2, 1}, Options{false, Scalar(0.2), "conv"}).conv().init_he(rng);
    for (Index n = 1; n <= cfg.layers; ++n) {
      in = out;
      out = filters(n);
      const Index stride = n == cfg.layers ? 1 : 2;
      layers_.template emplace<Block>(in, out, nn::ConvGeometry{4, stride, 1}, Options{true, Scalar(0.2), "conv"})
          .conv()
          .init_he(rng);
    }
    layers_.template emplace<Block>(out, 1, nn::ConvGeometry{4, 1, 1}, Options{false, std::nullopt, "conv"}).conv().init_he(rng);
    output_shape();
  }

  Shape input_shape() const override { return cfg_.input; }
  Shape output_shape() const override { return layers_.output_shape(cfg_.input); }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, nn::Mode mode) override {
    this->check_input(x, "patch discriminator");
    return layers_.forward(x, mode);
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override { return layers_.backward(grad_out); }

  void visit_parameters(const nn::ParameterVisitor<Scalar>& visit) override { layers_.visit_parameters("layers", visit); }

  nn::ModelSpec describe() const override { return {"patch-discriminator", layers_.describe(cfg_.input), 1, true}; }

  /// Side of the square input patch seen by one output logit.
  Index receptive_field() const {
    Index rf = 4;  // final stride-1 conv
    for (Index n = cfg_.layers; n >= 1; --n) rf = (rf - 1) * (n == cfg_.layers ? 1 : 2) + 4;
    return (rf - 1) * 2 + 4;
  }

 private:
  Index filters(Index n) const {
    const Index mult = Index(1) << std::min<Index>(n, 3);
    return std::max<Index>(1, cfg_.base_filters * mult / cfg_.width_divisor);
  }

  DiscriminatorConfig cfg_;
  nn::Sequential<Scalar> layers_;
};

}  // namespace sclera::seg
