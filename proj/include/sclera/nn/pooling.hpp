#pragma once

#include "sclera/nn/layer.hpp"

#include <limits>
#include <memory>
#include <stdexcept>

namespace sclera::nn {

/// How windows running past the bottom/right border are treated.
enum class PoolPadding {
  Valid,  // floor((in - k) / s) + 1, partial windows dropped
  Ceil,   // ceil((in - k) / s) + 1, partial windows clipped
  Same,   // ceil(in / s), darknet-style right/bottom padding
};

inline Index pooled_extent(Index in, Index kernel, Index stride, PoolPadding mode) {
  switch (mode) {
    case PoolPadding::Valid:
      return in < kernel ? 0 : (in - kernel) / stride + 1;
    case PoolPadding::Ceil:
      return in <= kernel ? 1 : (in - kernel + stride - 1) / stride + 1;
    case PoolPadding::Same:
      return (in + stride - 1) / stride;
  }
  return 0;
}

/// Argmax positions stored by a max-pool so a decoder can invert it.
/// `indices` holds, per (sample, channel, pooled cell), the flat y*W+x
/// offset of the winning input pixel within its channel plane.
struct PoolingIndexRecord {
  Index batch = 0;
  Shape input;
  Shape output;
  Index kernel = 2;
  Index stride = 2;
  std::vector<Index> indices;

  Index at(Index n, Index c, Index cell) const { return indices[(n * output.channels + c) * output.area() + cell]; }
};

template <typename Scalar>
class MaxPool2d : public Layer<Scalar> {
 public:
  MaxPool2d(Index kernel, Index stride, PoolPadding mode = PoolPadding::Valid)
      : kernel_(kernel), stride_(stride), mode_(mode), record_(std::make_shared<PoolingIndexRecord>()) {
    record_->kernel = kernel;
    record_->stride = stride;
  }

  /// Shared with the paired MaxUnpool; refreshed on every forward.
  std::shared_ptr<const PoolingIndexRecord> record() const { return record_; }

  Shape output_shape(const Shape& in) const override {
    const Shape out{in.channels, pooled_extent(in.height, kernel_, stride_, mode_),
                    pooled_extent(in.width, kernel_, stride_, mode_)};
    if (out.height < 1 || out.width < 1) throw std::invalid_argument("maxpool: input " + to_string(in) + " too small");
    return out;
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode) override {
    const Shape is = x.shape();
    const Shape os = output_shape(is);
    Tensor<Scalar> y(x.batch(), os);
    PoolingIndexRecord& rec = *record_;
    rec.batch = x.batch();
    rec.input = is;
    rec.output = os;
    rec.indices.assign(static_cast<size_t>(x.batch() * os.size()), 0);
    for (Index n = 0; n < x.batch(); ++n) {
      for (Index c = 0; c < is.channels; ++c) {
        const Scalar* plane = x.sample_data(n) + c * is.area();
        Scalar* out = y.sample_data(n) + c * os.area();
        Index* idx = rec.indices.data() + (n * os.channels + c) * os.area();
        for (Index oy = 0; oy < os.height; ++oy) {
          const Index y0 = oy * stride_, y1 = std::min(y0 + kernel_, is.height);
          for (Index ox = 0; ox < os.width; ++ox) {
            const Index x0 = ox * stride_, x1 = std::min(x0 + kernel_, is.width);
            Index best = y0 * is.width + x0;
            Scalar best_v = plane[best];
            for (Index iy = y0; iy < y1; ++iy) {
              for (Index ix = x0; ix < x1; ++ix) {
                const Scalar v = plane[iy * is.width + ix];
                if (v > best_v) {
                  best_v = v;
                  best = iy * is.width + ix;
                }
              }
            }
            out[oy * os.width + ox] = best_v;
            idx[oy * os.width + ox] = best;
          }
        }
      }
    }
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    const PoolingIndexRecord& rec = *record_;
    Tensor<Scalar> dx(rec.batch, rec.input);
    for (Index n = 0; n < rec.batch; ++n) {
      for (Index c = 0; c < rec.input.channels; ++c) {
        const Scalar* g = grad_out.sample_data(n) + c * rec.output.area();
        Scalar* d = dx.sample_data(n) + c * rec.input.area();
        for (Index cell = 0; cell < rec.output.area(); ++cell) d[rec.at(n, c, cell)] += g[cell];
      }
    }
    return dx;
  }

  std::vector<LayerSpec> describe(const Shape& in) const override {
    return {{"max", 0, kernel_, stride_, in, output_shape(in)}};
  }

 private:
  Index kernel_, stride_;
  PoolPadding mode_;
  std::shared_ptr<PoolingIndexRecord> record_;
};

/// Places each input value at the argmax recorded by the paired max-pool;
/// every other output cell is zero.
template <typename Scalar>
Tensor<Scalar> max_unpool(const Tensor<Scalar>& pooled, const PoolingIndexRecord& rec) {
  require_shape(pooled.shape(), rec.output, "unpool input");
  if (pooled.batch() != rec.batch) throw std::invalid_argument("unpool: batch differs from pooling record");
  Tensor<Scalar> out(rec.batch, rec.input);
  for (Index n = 0; n < rec.batch; ++n) {
    for (Index c = 0; c < rec.input.channels; ++c) {
      const Scalar* v = pooled.sample_data(n) + c * rec.output.area();
      Scalar* d = out.sample_data(n) + c * rec.input.area();
      for (Index cell = 0; cell < rec.output.area(); ++cell) d[rec.at(n, c, cell)] = v[cell];
    }
  }
  return out;
}

template <typename Scalar>
class MaxUnpool2d : public Layer<Scalar> {
 public:
  explicit MaxUnpool2d(std::shared_ptr<const PoolingIndexRecord> record) : record_(std::move(record)) {}

  /// The unpooled extent is the extent seen by the paired pool, which this
  /// layer cannot know from its own input alone (ceil-mode pooling).
  void set_target(Shape target) { target_ = target; }

  Shape output_shape(const Shape& in) const override { return {in.channels, target_.height, target_.width}; }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, Mode) override { return max_unpool(x, *record_); }

  Tensor<Scalar> backward(const Tensor<Scalar>& grad_out) override {
    const PoolingIndexRecord& rec = *record_;
    Tensor<Scalar> dx(rec.batch, rec.output);
    for (Index n = 0; n < rec.batch; ++n) {
      for (Index c = 0; c < rec.output.channels; ++c) {
        const Scalar* g = grad_out.sample_data(n) + c * rec.input.area();
        Scalar* d = dx.sample_data(n) + c * rec.output.area();
        for (Index cell = 0; cell < rec.output.area(); ++cell) d[cell] = g[rec.at(n, c, cell)];
      }
    }
    return dx;
  }

  std::vector<LayerSpec> describe(const Shape& in) const override {
    return {{"up", 0, record_->kernel, record_->stride, in, output_shape(in)}};
  }

 private:
  std::shared_ptr<const PoolingIndexRecord> record_;
  Shape target_;
};

}  // namespace sclera::nn
