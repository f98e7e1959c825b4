#include "doctest.h"

#include "sclera/nn/activation.hpp"
#include "sclera/nn/batchnorm.hpp"
#include "sclera/nn/conv.hpp"
#include "sclera/nn/losses.hpp"
#include "sclera/nn/optim.hpp"
#include "sclera/nn/pooling.hpp"
#include "sclera/nn/sequential.hpp"
#include "support/fixtures.hpp"

#include <cmath>

using namespace sclera;
using fixtures::random_tensor;

namespace {

/// Wraps a Sequential so the network-level gradient checker applies to it.
class SequentialNet : public nn::Network<double> {
 public:
  explicit SequentialNet(Shape input) : input_(input) {}
  nn::Sequential<double> layers;
  Tensor<double> forward(const Tensor<double>& x, nn::Mode m) override { return layers.forward(x, m); }
  Tensor<double> backward(const Tensor<double>& g) override { return layers.backward(g); }
  Shape input_shape() const override { return input_; }
  Shape output_shape() const override { return layers.output_shape(input_); }
  nn::ModelSpec describe() const override { return {}; }
  void visit_parameters(const nn::ParameterVisitor<double>& v) override { layers.visit_parameters("", v); }

 private:
  Shape input_;
};

// Direct-summation convolution; weight layout out x in x k x k.
Tensor<double> naive_conv(const Tensor<double>& x, const Eigen::VectorXd& w, const Eigen::VectorXd* b, Index out,
                          const nn::ConvGeometry& g) {
  const Index oh = g.output_extent(x.height()), ow = g.output_extent(x.width()), in = x.channels(), k = g.kernel;
  Tensor<double> y(x.batch(), {out, oh, ow});
  for (Index n = 0; n < x.batch(); ++n)
    for (Index o = 0; o < out; ++o)
      for (Index yy = 0; yy < oh; ++yy)
        for (Index xx = 0; xx < ow; ++xx) {
          double s = b ? (*b)[o] : 0.0;
          for (Index c = 0; c < in; ++c)
            for (Index ky = 0; ky < k; ++ky)
              for (Index kx = 0; kx < k; ++kx) {
                const Index iy = yy * g.stride - g.padding + ky, ix = xx * g.stride - g.padding + kx;
                if (iy < 0 || ix < 0 || iy >= x.height() || ix >= x.width()) continue;
                s += w[((o * in + c) * k + ky) * k + kx] * x(n, c, iy, ix);
              }
          y(n, o, yy, xx) = s;
        }
  return y;
}

// Scatter form of the transposed convolution; weight layout in x out x k x k.
Tensor<double> naive_conv_transpose(const Tensor<double>& x, const Eigen::VectorXd& w, Index out,
                                    const nn::ConvGeometry& g) {
  const Index oh = g.transposed_extent(x.height()), ow = g.transposed_extent(x.width()), in = x.channels(),
              k = g.kernel;
  Tensor<double> y(x.batch(), {out, oh, ow});
  for (Index n = 0; n < x.batch(); ++n)
    for (Index c = 0; c < in; ++c)
      for (Index iy = 0; iy < x.height(); ++iy)
        for (Index ix = 0; ix < x.width(); ++ix)
          for (Index o = 0; o < out; ++o)
            for (Index ky = 0; ky < k; ++ky)
              for (Index kx = 0; kx < k; ++kx) {
                const Index yy = iy * g.stride - g.padding + ky, xx = ix * g.stride - g.padding + kx;
                if (yy < 0 || xx < 0 || yy >= oh || xx >= ow) continue;
                y(n, o, yy, xx) += w[((c * out + o) * k + ky) * k + kx] * x(n, c, iy, ix);
              }
  return y;
}

}  // namespace

TEST_CASE("im2col and col2im are adjoint") {
  std::mt19937_64 rng(1);
  for (const nn::ConvGeometry g : {nn::ConvGeometry{3, 1, 1}, nn::ConvGeometry{4, 2, 1}, nn::ConvGeometry{2, 2, 0}}) {
    const Index c = 3, h = 7, w = 6, oh = g.output_extent(h), ow = g.output_extent(w);
    const auto x = random_tensor<double>(rng, 1, {c, h, w});
    Eigen::MatrixXd col(c * g.kernel * g.kernel, oh * ow);
    nn::im2col(x.data(), c, h, w, g, oh, ow, col.data());
    const Eigen::MatrixXd r = Eigen::MatrixXd::Random(col.rows(), col.cols());
    Tensor<double> back(1, {c, h, w});
    nn::col2im(r.data(), c, h, w, g, oh, ow, back.data());
    CHECK(col.cwiseProduct(r).sum() == doctest::Approx(x.values().dot(back.values())).epsilon(1e-12));
  }
}

TEST_CASE("conv2d matches direct summation") {
  std::mt19937_64 rng(2);
  for (const nn::ConvGeometry g : {nn::ConvGeometry{3, 1, 1}, nn::ConvGeometry{4, 2, 1}, nn::ConvGeometry{1, 1, 0}}) {
    nn::Conv2d<double> conv(3, 5, g);
    conv.init_he(rng);
    conv.bias().value = Eigen::VectorXd::Random(5);
    const auto x = random_tensor<double>(rng, 2, {3, 9, 8});
    const auto y = conv.forward(x, nn::Mode::Eval);
    const auto ref = naive_conv(x, conv.weight().value, &conv.bias().value, 5, g);
    REQUIRE(y.shape() == ref.shape());
    CHECK((y.values() - ref.values()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("transposed convolution matches the scatter oracle") {
  std::mt19937_64 rng(3);
  for (const nn::ConvGeometry g : {nn::ConvGeometry{4, 2, 1}, nn::ConvGeometry{16, 8, 4}}) {
    nn::ConvTranspose2d<double> up(2, 3, g, false);
    up.init_he(rng);
    const auto x = random_tensor<double>(rng, 2, {2, 3, 4});
    const auto y = up.forward(x, nn::Mode::Eval);
    const auto ref = naive_conv_transpose(x, up.weight().value, 3, g);
    REQUIRE(y.shape() == ref.shape());
    CHECK((y.values() - ref.values()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("bilinear transposed convolution upsamples a constant map to a constant interior") {
  nn::ConvTranspose2d<double> up(1, 1, {4, 2, 1}, false);
  up.init_bilinear();
  const auto y = up.forward(Tensor<double>::constant(1, {1, 5, 5}, 2.0), nn::Mode::Eval);
  CHECK(y.height() == 10);
  for (Index yy = 1; yy < 9; ++yy)
    for (Index xx = 1; xx < 9; ++xx) CHECK(y(0, 0, yy, xx) == doctest::Approx(2.0));
}

TEST_CASE("pooled extents per padding mode") {
  CHECK(nn::pooled_extent(15, 2, 2, nn::PoolPadding::Ceil) == 8);
  CHECK(nn::pooled_extent(15, 2, 2, nn::PoolPadding::Valid) == 7);
  CHECK(nn::pooled_extent(13, 2, 1, nn::PoolPadding::Same) == 13);
  CHECK(nn::pooled_extent(240, 2, 2, nn::PoolPadding::Ceil) == 120);
}

TEST_CASE("max pool keeps the first maximum of a tied window") {
  nn::MaxPool2d<double> pool(2, 2);
  Tensor<double> x = Tensor<double>::constant(1, {1, 2, 2}, 1.0);
  const auto y = pool.forward(x, nn::Mode::Eval);
  CHECK(y(0, 0, 0, 0) == 1.0);
  CHECK(pool.record()->at(0, 0, 0) == 0);
}

TEST_CASE("unpooling restores pooled values at their argmax positions") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    nn::MaxPool2d<double> pool(2, 2, nn::PoolPadding::Ceil);
    const auto x = random_tensor<double>(rng, 2, {3, 7, 9});
    const auto p = pool.forward(x, nn::Mode::Eval);
    const auto u = nn::max_unpool(p, *pool.record());
    CHECK(u.shape() == x.shape());
    CHECK(u.values().sum() == doctest::Approx(p.values().sum()).epsilon(1e-14));
    for (Index i = 0; i < u.size(); ++i)
      if (u.values()[i] != 0.0) CHECK(u.values()[i] == x.values()[i]);
  }
}

TEST_CASE("batch norm normalises per channel in training and uses running statistics in evaluation") {
  std::mt19937_64 rng(5);
  nn::BatchNorm2d<double> bn(3);
  auto x = random_tensor<double>(rng, 4, {3, 5, 5}, 3.0);
  x.values().array() += 7.0;
  const auto y = bn.forward(x, nn::Mode::Train);
  for (Index c = 0; c < 3; ++c) {
    double sum = 0, sq = 0;
    for (Index n = 0; n < 4; ++n)
      for (Index i = 0; i < 25; ++i) sum += y.sample(n)(c, i);
    const double mean = sum / 100;
    for (Index n = 0; n < 4; ++n)
      for (Index i = 0; i < 25; ++i) sq += std::pow(y.sample(n)(c, i) - mean, 2);
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
    CHECK(sq / 100 == doctest::Approx(1.0).epsilon(1e-3));
  }
  // Fresh running stats are (0, 1): evaluation is the identity up to eps.
  nn::BatchNorm2d<double> fresh(3);
  const auto e = fresh.forward(x, nn::Mode::Eval);
  CHECK((e.values() - x.values() / std::sqrt(1.0 + 1e-5)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("layer gradients agree with central differences") {
  std::mt19937_64 rng(6);
  SUBCASE("conv + batch norm + leaky relu + pool") {
    SequentialNet net({2, 6, 6});
    net.layers.emplace<nn::ConvBlock<double>>(2, 3, nn::ConvGeometry{3, 1, 1},
                                              nn::ConvBlock<double>::Options{true, 0.1, "conv"})
        .conv()
        .init_he(rng);
    net.layers.emplace<nn::MaxPool2d<double>>(2, 2, nn::PoolPadding::Ceil);
    const auto x = random_tensor<double>(rng, 2, {2, 6, 6});
    CHECK(fixtures::check_parameter_gradients(net, x, rng, 30).max_relative_error < 1e-5);
    CHECK(fixtures::check_input_gradients(net, x, rng, 30).max_relative_error < 1e-5);
  }
  SUBCASE("transposed conv + tanh") {
    SequentialNet net({2, 3, 3});
    net.layers.emplace<nn::ConvTranspose2d<double>>(2, 2, nn::ConvGeometry{4, 2, 1}).init_he(rng);
    net.layers.emplace<nn::Tanh<double>>();
    const auto x = random_tensor<double>(rng, 2, {2, 3, 3});
    CHECK(fixtures::check_parameter_gradients(net, x, rng, 30).max_relative_error < 1e-5);
    CHECK(fixtures::check_input_gradients(net, x, rng, 30).max_relative_error < 1e-5);
  }
}

TEST_CASE("softmax cross-entropy") {
  SUBCASE("uniform prediction costs ln 2 per pixel") {
    const Tensor<double> logits(2, {2, 3, 3});
    const Tensor<double> labels = Tensor<double>::constant(2, {1, 3, 3}, 1.0);
    CHECK(nn::softmax_cross_entropy(logits, labels).value == doctest::Approx(std::log(2.0)));
  }
  SUBCASE("saturated one-hot prediction costs nothing") {
    Tensor<double> logits(1, {2, 1, 2});
    logits(0, 0, 0, 0) = 50;
    logits(0, 1, 0, 1) = 50;
    Tensor<double> labels(1, {1, 1, 2});
    labels(0, 0, 0, 1) = 1;
    CHECK(nn::softmax_cross_entropy(logits, labels).value < 1e-12);
  }
  SUBCASE("random 4x4 case matches a per-pixel oracle") {
    std::mt19937_64 rng(7);
    const auto logits = random_tensor<double>(rng, 1, {2, 4, 4}, 2.0);
    Tensor<double> labels(1, {1, 4, 4});
    std::bernoulli_distribution coin(0.5);
    for (Index i = 0; i < 16; ++i) labels.values()[i] = coin(rng) ? 1.0 : 0.0;
    double expected = 0;
    for (Index y = 0; y < 4; ++y)
      for (Index x = 0; x < 4; ++x) {
        const double z0 = logits(0, 0, y, x), z1 = logits(0, 1, y, x);
        const double p1 = std::exp(z1) / (std::exp(z0) + std::exp(z1));
        expected -= labels(0, 0, y, x) > 0.5 ? std::log(p1) : std::log(1 - p1);
      }
    expected /= 16;
    const auto r = nn::softmax_cross_entropy(logits, labels);
    CHECK(std::abs(r.value - expected) < 1e-6);
    // gradient: (softmax - onehot) / pixels
    const double p1 = std::exp(logits(0, 1, 0, 0)) / (std::exp(logits(0, 0, 0, 0)) + std::exp(logits(0, 1, 0, 0)));
    CHECK(r.grad(0, 1, 0, 0) == doctest::Approx((p1 - labels(0, 0, 0, 0)) / 16));
  }
  SUBCASE("shape mismatch is rejected") {
    CHECK_THROWS_AS(nn::softmax_cross_entropy(Tensor<double>(1, {2, 4, 4}), Tensor<double>(1, {1, 3, 4})),
                    std::invalid_argument);
  }
}

TEST_CASE("binary cross-entropy and L1") {
  const Tensor<double> zero(1, {1, 2, 2});
  CHECK(nn::bce_with_logits(zero, 1.0).value == doctest::Approx(std::log(2.0)));
  CHECK(nn::bce_with_logits(zero, 0.0).value == doctest::Approx(std::log(2.0)));
  CHECK(nn::bce_with_logits(Tensor<double>::constant(1, {1, 1, 1}, 40.0), 1.0).value < 1e-12);
  const auto a = Tensor<double>::constant(1, {1, 2, 2}, 1.0), b = Tensor<double>::constant(1, {1, 2, 2}, -0.5);
  CHECK(nn::l1_loss(a, b).value == doctest::Approx(1.5));
}

TEST_CASE("adam's first step moves each coordinate by the learning rate") {
  nn::Parameter<double> p({3});
  p.value << 1.0, -2.0, 0.5;
  p.grad << 0.3, -7.0, 1e-3;
  nn::Adam<double> opt({&p}, {0.01});
  opt.step();
  CHECK(p.value[0] == doctest::Approx(0.99));
  CHECK(p.value[1] == doctest::Approx(-1.99));
  CHECK(p.value[2] == doctest::Approx(0.49).epsilon(1e-4));
}

TEST_CASE("gradient clipping caps the global norm") {
  nn::Parameter<double> a({2}), b({1});
  a.grad << 3.0, 0.0;
  b.grad << 4.0;
  CHECK(nn::clip_grad_norm<double>({&a, &b}, 1.0) == doctest::Approx(5.0));
  CHECK(std::sqrt(a.grad.squaredNorm() + b.grad.squaredNorm()) == doctest::Approx(1.0));
  CHECK(nn::clip_grad_norm<double>({&a, &b}, 10.0) == doctest::Approx(1.0));
}
