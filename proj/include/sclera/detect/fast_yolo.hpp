#pragma once

#include "sclera/detect/types.hpp"
#include "sclera/nn/network.hpp"
#include "sclera/nn/pooling.hpp"
#include "sclera/nn/sequential.hpp"

#include <random>

namespace sclera::detect {

/// Nine convolutions and six max-pools: 3x3 convs (batch norm, leaky 0.1)
/// interleaved with 2x2 pools, the last pool at stride 1, and a linear 1x1
/// head emitting anchors * (5 + classes) channels on a (input/32)^2 grid.
template <typename Scalar>
class FastYolo : public nn::Network<Scalar> {
 public:
  explicit FastYolo(DetectorConfig cfg, std::uint64_t seed = 0) : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::mt19937_64 rng(seed);
    const auto width = [&](Index f) { return std::max<Index>(1, f / cfg_.width_divisor); };
    const typename nn::ConvBlock<Scalar>::Options hidden{true, Scalar(0.1), "conv"};
    Index in = cfg_.input_channels;
    for (Index f : {16, 32, 64, 128, 256}) {
      body_.template emplace<nn::ConvBlock<Scalar>>(in, width(f), nn::ConvGeometry{3, 1, 1}, hidden).conv().init_he(rng);
      body_.template emplace<nn::MaxPool2d<Scalar>>(2, 2, nn::PoolPadding::Valid);
      in = width(f);
    }
    body_.template emplace<nn::ConvBlock<Scalar>>(in, width(512), nn::ConvGeometry{3, 1, 1}, hidden).conv().init_he(rng);
    body_.template emplace<nn::MaxPool2d<Scalar>>(2, 1, nn::PoolPadding::Same);
    body_.template emplace<nn::ConvBlock<Scalar>>(width(512), width(1024), nn::ConvGeometry{3, 1, 1}, hidden)
        .conv()
        .init_he(rng);
    body_.template emplace<nn::ConvBlock<Scalar>>(width(1024), width(1024), nn::ConvGeometry{3, 1, 1}, hidden)
        .conv()
        .init_he(rng);
    auto& head = body_.template emplace<nn::ConvBlock<Scalar>>(
        width(1024), cfg_.head_filters(), nn::ConvGeometry{1, 1, 0},
        typename nn::ConvBlock<Scalar>::Options{false, std::nullopt, "conv"});
    head.conv().init_he(rng);
    head.conv().weight().value *= Scalar(0.1);
  }

  const DetectorConfig& config() const { return cfg_; }

  Shape input_shape() const override { return {cfg_.input_channels, cfg_.input_size, cfg_.input_size}; }
  Shape output_shape() const override { return {cfg_.head_filters(), cfg_.grid(), cfg_.grid()}; }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, nn::Mode mode) override {
    this->check_input(x, "fast-yolo");
    return body_.forward(x, mode);
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override { return body_.backward(grad_out); }

  void visit_parameters(const nn::ParameterVisitor<Scalar>& visit) override { body_.visit_parameters("body", visit); }

  nn::ModelSpec describe() const override {
    nn::ModelSpec spec{"fast-yolo", body_.describe(input_shape()), 0, true};
    spec.layers.push_back({"detection", 0, 0, 0, std::nullopt, std::nullopt});
    return spec;
  }

 private:
  DetectorConfig cfg_;
  nn::Sequential<Scalar> body_;
};

}  // namespace sclera::detect
