#pragma once

#include "sclera/nn/layer.hpp"

#include <random>
#include <stdexcept>

namespace sclera::nn {

struct ConvGeometry {
  Index kernel = 3;
  Index stride = 1;
  Index padding = 0;

  Index output_extent(Index in) const { return (in + 2 * padding - kernel) / stride + 1; }
  Index transposed_extent(Index in) const { return (in - 1) * stride - 2 * padding + kernel; }
};

/// Unfolds one C x H x W sample into a (C*k*k) x (Ho*Wo) patch matrix.
template <typename Scalar>
void im2col(const Scalar* in, Index channels, Index height, Index width, const ConvGeometry& g, Index out_h,
            Index out_w, Scalar* col) {
  const Index k = g.kernel;
  const Index cols = out_h * out_w;
  for (Index c = 0; c < channels; ++c) {
    const Scalar* plane = in + c * height * width;
    for (Index ky = 0; ky < k; ++ky) {
      for (Index kx = 0; kx < k; ++kx) {
        Scalar* row = col + ((c * k + ky) * k + kx) * cols;
        for (Index oy = 0; oy < out_h; ++oy) {
          const Index iy = oy * g.stride - g.padding + ky;
          Scalar* dst = row + oy * out_w;
          if (iy < 0 || iy >= height) {
            std::fill(dst, dst + out_w, Scalar(0));
            continue;
          }
          const Scalar* src = plane + iy * width;
          for (Index ox = 0; ox < out_w; ++ox) {
            const Index ix = ox * g.stride - g.padding + kx;
            dst[ox] = (ix >= 0 && ix < width) ? src[ix] : Scalar(0);
          }
        }
      }
    }
  }
}

/// Adjoint of im2col: scatters-and-adds patch columns back into `out`.
template <typename Scalar>
void col2im(const Scalar* col, Index channels, Index height, Index width, const ConvGeometry& g, Index out_h,
            Index out_w, Scalar* out) {
  const Index k = g.kernel;
  const Index cols = out_h * out_w;
  for (Index c = 0; c < channels; ++c) {
    Scalar* plane = out + c * height * width;
    for (Index ky = 0; ky < k; ++ky) {
      for (Index kx = 0; kx < k; ++kx) {
        const Scalar* row = col + ((c * k + ky) * k + kx) * cols;
        for (Index oy = 0; oy < out_h; ++oy) {
          const Index iy = oy * g.stride - g.padding + ky;
          if (iy < 0 || iy >= height) continue;
          Scalar* dst = plane + iy * width;
          const Scalar* src = row + oy * out_w;
          for (Index ox = 0; ox < out_w; ++ox) {
            const Index ix = ox * g.stride - g.padding + kx;
            if (ix >= 0 && ix < width) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

/// He-normal initialisation for a weight with the given fan-in.
template <typename Scalar>
void he_normal(Parameter<Scalar>& p, Index fan_in, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
  for (Index i = 0; i < p.value.size(); ++i) p.value[i] = static_cast<Scalar>(dist(rng));
}

template <typename Scalar>
class Conv2d : public Layer<Scalar> {
 public:
  using Matrix = typename Tensor<Scalar>::Matrix;
  using WeightMap = Eigen::Map<Matrix>;

  Conv2d(Index in_channels, Index out_channels, ConvGeometry g, bool bias = true)
      : in_(in_channels), out_(out_channels), geom_(g), has_bias_(bias),
        weight_({out_channels, in_channels, g.kernel, g.kernel}), bias_({out_channels}) {}

  Parameter<Scalar>& weight() { return weight_; }
  Parameter<Scalar>& bias() { return bias_; }
  Index in_channels() const { return in_; }
  Index out_channels() const { return out_; }
  const ConvGeometry& geometry() const { return geom_; }

  void init_he(std::mt19937_64& rng) {
    he_normal(weight_, in_ * geom_.kernel * geom_.kernel, rng);
    bias_.value.setZero();
  }

  Shape output_shape(const Shape& in) const override {
    check_input(in);
    return {out_, geom_.output_extent(in.height), geom_.output_extent(in.width)};
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode) override {
    const Shape os = output_shape(x.shape());
    input_ = x;
    Tensor<Scalar> y(x.batch(), os);
    const WeightMap w = weights();
    Matrix col;
    for (Index n = 0; n < x.batch(); ++n) {
      auto out = y.sample(n);
      if (is_pointwise()) {
        out.noalias() = w * x.sample(n);
      } else {
        unfold(x, n, os, col);
        out.noalias() = w * col;
      }
      if (has_bias_) out.colwise() += bias_.value;
    }
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    const Shape os = grad_out.shape();
    Tensor<Scalar> dx(input_.batch(), input_.shape());
    const WeightMap w = weights();
    WeightMap dw(weight_.grad.data(), out_, in_ * geom_.kernel * geom_.kernel);
    Matrix col, dcol;
    for (Index n = 0; n < grad_out.batch(); ++n) {
      const auto g = grad_out.sample(n);
      if (has_bias_) bias_.grad += g.rowwise().sum().transpose();
      if (is_pointwise()) {
        dw.noalias() += g * input_.sample(n).transpose();
        dx.sample(n).noalias() = w.transpose() * g;
      } else {
        unfold(input_, n, os, col);
        dw.noalias() += g * col.transpose();
        dcol.noalias() = w.transpose() * g;
        col2im(dcol.data(), in_, input_.height(), input_.width(), geom_, os.height, os.width, dx.sample_data(n));
      }
    }
    return dx;
  }

  void visit_parameters(const std::string& prefix, const ParameterVisitor<Scalar>& visit) override {
    visit(join_name(prefix, "weight"), weight_);
    if (has_bias_) visit(join_name(prefix, "bias"), bias_);
  }

  std::vector<LayerSpec> describe(const Shape& in) const override {
    return {{"conv", out_, geom_.kernel, geom_.stride, in, output_shape(in)}};
  }

 private:
  bool is_pointwise() const { return geom_.kernel == 1 && geom_.stride == 1 && geom_.padding == 0; }

  WeightMap weights() const {
    return WeightMap(const_cast<Scalar*>(weight_.value.data()), out_, in_ * geom_.kernel * geom_.kernel);
  }

  void unfold(const Tensor<Scalar>& x, Index n, const Shape& os, Matrix& col) const {
    col.resize(in_ * geom_.kernel * geom_.kernel, os.area());
    im2col(x.sample_data(n), in_, x.height(), x.width(), geom_, os.height, os.width, col.data());
  }

  void check_input(const Shape& in) const {
    if (in.channels != in_) {
      throw std::invalid_argument("conv: expected " + std::to_string(in_) + " input channels, got " +
                                  std::to_string(in.channels));
    }
    if (geom_.output_extent(in.height) < 1 || geom_.output_extent(in.width) < 1) {
      throw std::invalid_argument("conv: input " + to_string(in) + " smaller than kernel");
    }
  }

  Index in_, out_;
  ConvGeometry geom_;
  bool has_bias_;
  Parameter<Scalar> weight_, bias_;
  Tensor<Scalar> input_;
};

/// Fractionally strided convolution; weight layout is in x out x k x k.
template <typename Scalar>
class ConvTranspose2d : public Layer<Scalar> {
 public:
  using Matrix = typename Tensor<Scalar>::Matrix;
  using WeightMap = Eigen::Map<Matrix>;

  ConvTranspose2d(Index in_channels, Index out_channels, ConvGeometry g, bool bias = true)
      : in_(in_channels), out_(out_channels), geom_(g), has_bias_(bias),
        weight_({in_channels, out_channels, g.kernel, g.kernel}), bias_({out_channels}) {}

  Parameter<Scalar>& weight() { return weight_; }
  Parameter<Scalar>& bias() { return bias_; }

  void init_he(std::mt19937_64& rng) {
    he_normal(weight_, in_ * geom_.kernel * geom_.kernel / (geom_.stride * geom_.stride), rng);
    bias_.value.setZero();
  }

  /// Per-channel bilinear interpolation kernel (channel i feeds channel i only).
  void init_bilinear() {
    weight_.value.setZero();
    bias_.value.setZero();
    const Index k = geom_.kernel;
    const double factor = static_cast<double>((k + 1) / 2);
    const double center = (k % 2 == 1) ? factor - 1.0 : factor - 0.5;
    for (Index c = 0; c < std::min(in_, out_); ++c) {
      for (Index y = 0; y < k; ++y) {
        for (Index x = 0; x < k; ++x) {
          const double v = (1.0 - std::abs(y - center) / factor) * (1.0 - std::abs(x - center) / factor);
          weight_.value[((c * out_ + c) * k + y) * k + x] = static_cast<Scalar>(v);
        }
      }
    }
  }

  Shape output_shape(const Shape& in) const override {
    if (in.channels != in_) {
      throw std::invalid_argument("conv-transpose: expected " + std::to_string(in_) + " input channels, got " +
                                  std::to_string(in.channels));
    }
    return {out_, geom_.transposed_extent(in.height), geom_.transposed_extent(in.width)};
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode) override {
    const Shape os = output_shape(x.shape());
    input_ = x;
    Tensor<Scalar> y(x.batch(), os);
    const WeightMap w = weights();
    Matrix col;
    for (Index n = 0; n < x.batch(); ++n) {
      col.noalias() = w.transpose() * x.sample(n);
      col2im(col.data(), out_, os.height, os.width, geom_, x.height(), x.width(), y.sample_data(n));
      if (has_bias_) y.sample(n).colwise() += bias_.value;
    }
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    const Shape os = grad_out.shape();
    Tensor<Scalar> dx(input_.batch(), input_.shape());
    const WeightMap w = weights();
    WeightMap dw(weight_.grad.data(), in_, out_ * geom_.kernel * geom_.kernel);
    Matrix dcol(out_ * geom_.kernel * geom_.kernel, input_.shape().area());
    for (Index n = 0; n < grad_out.batch(); ++n) {
      const auto g = grad_out.sample(n);
      if (has_bias_) bias_.grad += g.rowwise().sum().transpose();
      im2col(grad_out.sample_data(n), out_, os.height, os.width, geom_, input_.height(), input_.width(),
             dcol.data());
      dw.noalias() += input_.sample(n) * dcol.transpose();
      dx.sample(n).noalias() = w * dcol;
    }
    return dx;
  }

  void visit_parameters(const std::string& prefix, const ParameterVisitor<Scalar>& visit) override {
    visit(join_name(prefix, "weight"), weight_);
    if (has_bias_) visit(join_name(prefix, "bias"), bias_);
  }

  std::vector<LayerSpec> describe(const Shape& in) const override {
    return {{"deconv", out_, geom_.kernel, geom_.stride, in, output_shape(in)}};
  }

 private:
  WeightMap weights() const {
    return WeightMap(const_cast<Scalar*>(weight_.value.data()), in_, out_ * geom_.kernel * geom_.kernel);
  }

  Index in_, out_;
  ConvGeometry geom_;
  bool has_bias_;
  Parameter<Scalar> weight_, bias_;
  Tensor<Scalar> input_;
};

}  // namespace sclera::nn
