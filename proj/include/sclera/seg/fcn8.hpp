#pragma once

#include "sclera/nn/network.hpp"
#include "sclera/nn/pooling.hpp"
#include "sclera/nn/sequential.hpp"

#include <array>
#include <random>

namespace sclera::seg {

struct Fcn8Config {
  Shape input{3, 240, 320};
  Index width_divisor = 1;
  /// Width of the first 1x1 layer on top of the trunk (before division).
  Index fc_channels = 4096;
  Index classes = 2;
  std::uint64_t seed = 0;
};

/// VGG-16 convolutional trunk (five ceil-mode pooling stages), two 1x1
/// convolutions producing a coarse class-score map at 1/32 resolution, and
/// the FCN-8s head: x2 upsample + pool4 scores, x2 upsample + pool3 scores,
/// x8 upsample back to the input resolution. Outputs per-pixel logits.
template <typename Scalar>
class Fcn8 : public nn::Network<Scalar> {
 public:
  explicit Fcn8(Fcn8Config cfg)
      : cfg_(cfg),
        score_pool4_(width(512), cfg.classes, nn::ConvGeometry{1, 1, 0}),
        score_pool3_(width(256), cfg.classes, nn::ConvGeometry{1, 1, 0}),
        up2_(cfg.classes, cfg.classes, nn::ConvGeometry{4, 2, 1}),
        up4_(cfg.classes, cfg.classes, nn::ConvGeometry{4, 2, 1}),
        up8_(cfg.classes, cfg.classes, nn::ConvGeometry{16, 8, 4}) {
    std::mt19937_64 rng(cfg.seed);
    const std::array<std::vector<Index>, 5> plan{{{64, 64}, {128, 128}, {256, 256, 256}, {512, 512, 512}, {512, 512, 512}}};
    const typename nn::ConvBlock<Scalar>::Options relu{false, Scalar(0), "conv"};
    Index in = cfg.input.channels;
    for (size_t s = 0; s < plan.size(); ++s) {
      for (Index f : plan[s]) {
        stages_[s].template emplace<nn::ConvBlock<Scalar>>(in, width(f), nn::ConvGeometry{3, 1, 1}, relu).conv().init_he(rng);
        in = width(f);
      }
      stages_[s].template emplace<nn::MaxPool2d<Scalar>>(2, 2, nn::PoolPadding::Ceil);
    }
    fc_.template emplace<nn::ConvBlock<Scalar>>(in, width(cfg.fc_channels), nn::ConvGeometry{1, 1, 0}, relu).conv().init_he(rng);
    fc_.template emplace<nn::ConvBlock<Scalar>>(width(cfg.fc_channels), cfg.classes, nn::ConvGeometry{1, 1, 0},
                                                typename nn::ConvBlock<Scalar>::Options{false, std::nullopt, "score"})
        .conv()
        .init_he(rng);
    // Skip scores start at zero and the upsamplers at bilinear interpolation.
    up2_.init_bilinear();
    up4_.init_bilinear();
    up8_.init_bilinear();
    output_shape();  // validates the geometry
  }

  const Fcn8Config& config() const { return cfg_; }
  Shape input_shape() const override { return cfg_.input; }
  Shape output_shape() const override {
    const Shape p3 = pool_shape(2);
    const Shape up8 = up8_.output_shape({cfg_.classes, p3.height, p3.width});
    if (up8.height < cfg_.input.height || up8.width < cfg_.input.width)
      throw std::invalid_argument("fcn8: input " + to_string(cfg_.input) + " too small");
    return {cfg_.classes, cfg_.input.height, cfg_.input.width};
  }

  /// Score map produced by the two 1x1 layers, before any fusion.
  Shape coarse_shape() const { return fc_.output_shape(pool_shape(4)); }
  const Tensor<Scalar>& last_coarse_scores() const { return coarse_; }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, nn::Mode mode) override {
    this->check_input(x, "fcn8");
    const Tensor<Scalar> p1 = stages_[0].forward(x, mode);
    const Tensor<Scalar> p2 = stages_[1].forward(p1, mode);
    const Tensor<Scalar> p3 = stages_[2].forward(p2, mode);
    const Tensor<Scalar> p4 = stages_[3].forward(p3, mode);
    const Tensor<Scalar> p5 = stages_[4].forward(p4, mode);
    coarse_ = fc_.forward(p5, mode);

    Tensor<Scalar> u2 = up2_.forward(coarse_, mode);
    up2_shape_ = u2.shape();
    Tensor<Scalar> fuse4 = nn::crop_top_left(u2, p4.height(), p4.width());
    fuse4.values() += score_pool4_.forward(p4, mode).values();

    Tensor<Scalar> u4 = up4_.forward(fuse4, mode);
    up4_shape_ = u4.shape();
    Tensor<Scalar> fuse3 = nn::crop_top_left(u4, p3.height(), p3.width());
    fuse3.values() += score_pool3_.forward(p3, mode).values();

    Tensor<Scalar> u8 = up8_.forward(fuse3, mode);
    up8_shape_ = u8.shape();
    return nn::crop_top_left(u8, cfg_.input.height, cfg_.input.width);
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    const Tensor<Scalar> g_fuse3 = up8_.backward(nn::uncrop_top_left(grad_out, up8_shape_));
    const Tensor<Scalar> g_p3_skip = score_pool3_.backward(g_fuse3);
    const Tensor<Scalar> g_fuse4 = up4_.backward(nn::uncrop_top_left(g_fuse3, up4_shape_));
    const Tensor<Scalar> g_p4_skip = score_pool4_.backward(g_fuse4);
    const Tensor<Scalar> g_coarse = up2_.backward(nn::uncrop_top_left(g_fuse4, up2_shape_));
    Tensor<Scalar> g = stages_[4].backward(fc_.backward(g_coarse));
    g.values() += g_p4_skip.values();
    g = stages_[3].backward(g);
    g.values() += g_p3_skip.values();
    g = stages_[2].backward(g);
    g = stages_[1].backward(g);
    return stages_[0].backward(g);
  }

  void visit_parameters(const nn::ParameterVisitor<Scalar>& visit) override {
    for (size_t s = 0; s < stages_.size(); ++s) stages_[s].visit_parameters("stage" + std::to_string(s + 1), visit);
    fc_.visit_parameters("fc", visit);
    score_pool4_.visit_parameters("score_pool4", visit);
    score_pool3_.visit_parameters("score_pool3", visit);
    up2_.visit_parameters("up2", visit);
    up4_.visit_parameters("up4", visit);
    up8_.visit_parameters("up8", visit);
  }

  nn::ModelSpec describe() const override {
    nn::ModelSpec spec{"fcn8", {}, 1, true};
    Shape s = cfg_.input;
    for (const auto& stage : stages_) {
      for (auto& r : stage.describe(s)) spec.layers.push_back(r);
      s = stage.output_shape(s);
    }
    for (auto& r : fc_.describe(s)) spec.layers.push_back(r);
    const Shape coarse = coarse_shape();
    auto add = [&](std::vector<nn::LayerSpec> rows, const std::string& kind, std::optional<Shape> out = std::nullopt) {
      for (auto& r : rows) {
        r.kind = kind;
        if (out) r.output = out;
        spec.layers.push_back(r);
      }
    };
    const Shape p4 = pool_shape(3), p3 = pool_shape(2);
    add(up2_.describe(coarse), "up", Shape{cfg_.classes, p4.height, p4.width});
    add(score_pool4_.describe(p4), "score");
    add(up4_.describe({cfg_.classes, p4.height, p4.width}), "up", Shape{cfg_.classes, p3.height, p3.width});
    add(score_pool3_.describe(p3), "score");
    add(up8_.describe({cfg_.classes, p3.height, p3.width}), "up", output_shape());
    spec.layers.push_back({"softmax", 0, 0, 0, output_shape(), output_shape()});
    return spec;
  }

 private:
  Index width(Index f) const { return std::max<Index>(1, f / cfg_.width_divisor); }

  /// Output of trunk stage `s` (0-based) for the configured input.
  Shape pool_shape(size_t s) const {
    Shape shape = cfg_.input;
    for (size_t i = 0; i <= s; ++i) shape = stages_[i].output_shape(shape);
    return shape;
  }

  Fcn8Config cfg_;
  std::array<nn::Sequential<Scalar>, 5> stages_;
  nn::Sequential<Scalar> fc_;
  nn::Conv2d<Scalar> score_pool4_, score_pool3_;
  nn::ConvTranspose2d<Scalar> up2_, up4_, up8_;
  Tensor<Scalar> coarse_;
  Shape up2_shape_, up4_shape_, up8_shape_;
};

}  // namespace sclera::seg
