#pragma once

#include "sclera/nn/network.hpp"
#include "sclera/nn/pooling.hpp"
#include "sclera/nn/sequential.hpp"

#include <array>
#include <random>

namespace sclera::seg {

struct SegNetConfig {
  Shape input{3, 240, 320};
  Index width_divisor = 1;
  Index classes = 2;
  std::uint64_t seed = 0;
};

/// Encoder: 13 conv/BN/ReLU layers in five stages, each closed by a 2x2
/// ceil-mode max-pool that records its argmax positions. Decoder: five
/// unpooling layers, each consuming the record of its mirrored pool, followed
/// by 13 conv layers; the last one is a plain 3x3 conv to the class scores.
template <typename Scalar>
class SegNet : public nn::Network<Scalar> {
 public:
  explicit SegNet(SegNetConfig cfg) : cfg_(cfg) {
    std::mt19937_64 rng(cfg.seed);
    const std::array<std::vector<Index>, 5> encoder{{{64, 64}, {128, 128}, {256, 256, 256}, {512, 512, 512}, {512, 512, 512}}};
    const std::array<std::vector<Index>, 5> decoder{{{512, 512, 512}, {512, 512, 256}, {256, 256, 128}, {128, 64}, {64}}};
    const typename nn::ConvBlock<Scalar>::Options enc{true, Scalar(0), "enc"};
    const typename nn::ConvBlock<Scalar>::Options dec{true, Scalar(0), "dec"};

    std::array<std::shared_ptr<const nn::PoolingIndexRecord>, 5> records;
    std::array<Shape, 5> pool_inputs;
    Shape shape = cfg.input;
    for (size_t s = 0; s < encoder.size(); ++s) {
      for (Index f : encoder[s]) {
        layers_.template emplace<nn::ConvBlock<Scalar>>(shape.channels, width(f), nn::ConvGeometry{3, 1, 1}, enc)
            .conv()
            .init_he(rng);
        shape.channels = width(f);
      }
      pool_inputs[s] = shape;
      auto& pool = layers_.template emplace<nn::MaxPool2d<Scalar>>(2, 2, nn::PoolPadding::Ceil);
      records[s] = pool.record();
      shape = pool.output_shape(shape);
    }
    for (size_t s = 0; s < decoder.size(); ++s) {
      const size_t mirror = encoder.size() - 1 - s;
      layers_.template emplace<nn::MaxUnpool2d<Scalar>>(records[mirror]).set_target(pool_inputs[mirror]);
      shape = {shape.channels, pool_inputs[mirror].height, pool_inputs[mirror].width};
      for (Index f : decoder[s]) {
        layers_.template emplace<nn::ConvBlock<Scalar>>(shape.channels, width(f), nn::ConvGeometry{3, 1, 1}, dec)
            .conv()
            .init_he(rng);
        shape.channels = width(f);
      }
    }
    layers_.template emplace<nn::ConvBlock<Scalar>>(shape.channels, cfg.classes, nn::ConvGeometry{3, 1, 1},
                                                    typename nn::ConvBlock<Scalar>::Options{false, std::nullopt, "dec"})
        .conv()
        .init_he(rng);
  }

  const SegNetConfig& config() const { return cfg_; }
  Shape input_shape() const override { return cfg_.input; }
  Shape output_shape() const override { return layers_.output_shape(cfg_.input); }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, nn::Mode mode) override {
    this->check_input(x, "segnet");
    return layers_.forward(x, mode);
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override { return layers_.backward(grad_out); }

  void visit_parameters(const nn::ParameterVisitor<Scalar>& visit) override { layers_.visit_parameters("layers", visit); }

  nn::ModelSpec describe() const override { return {"segnet", layers_.describe(cfg_.input), 1, false}; }

 private:
  Index width(Index f) const { return std::max<Index>(1, f / cfg_.width_divisor); }

  SegNetConfig cfg_;
  nn::Sequential<Scalar> layers_;
};

}  // namespace sclera::seg
