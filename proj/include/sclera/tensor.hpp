#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sclera {

using Index = Eigen::Index;

/// Spatial extent of one feature map: channels x height x width.
struct Shape {
  Index channels = 0;
  Index height = 0;
  Index width = 0;

  Index area() const { return height * width; }
  Index size() const { return channels * height * width; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// "W x H x C", the ordering used in architecture tables.
std::string to_string(const Shape& s);

/// Dense NCHW tensor. A batch of `batch()` samples, each laid out as a
/// row-major channels x (height*width) matrix so convolutions map onto GEMM.
template <typename Scalar>
class Tensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using SampleMap = Eigen::Map<Matrix>;
  using ConstSampleMap = Eigen::Map<const Matrix>;

  Tensor() = default;
  Tensor(Index batch, Shape shape) : batch_(batch), shape_(shape), values_(Vector::Zero(batch * shape.size())) {}

  static Tensor constant(Index batch, Shape shape, Scalar v) {
    Tensor t(batch, shape);
    t.values_.setConstant(v);
    return t;
  }

  Index batch() const { return batch_; }
  const Shape& shape() const { return shape_; }
  Index channels() const { return shape_.channels; }
  Index height() const { return shape_.height; }
  Index width() const { return shape_.width; }
  Index size() const { return values_.size(); }
  bool empty() const { return values_.size() == 0; }

  Vector& values() { return values_; }
  const Vector& values() const { return values_; }
  Scalar* data() { return values_.data(); }
  const Scalar* data() const { return values_.data(); }

  Scalar* sample_data(Index n) { return values_.data() + n * shape_.size(); }
  const Scalar* sample_data(Index n) const { return values_.data() + n * shape_.size(); }

  SampleMap sample(Index n) { return SampleMap(sample_data(n), shape_.channels, shape_.area()); }
  ConstSampleMap sample(Index n) const { return ConstSampleMap(sample_data(n), shape_.channels, shape_.area()); }

  Scalar& operator()(Index n, Index c, Index y, Index x) {
    return values_[((n * shape_.channels + c) * shape_.height + y) * shape_.width + x];
  }
  Scalar operator()(Index n, Index c, Index y, Index x) const {
    return values_[((n * shape_.channels + c) * shape_.height + y) * shape_.width + x];
  }

  void set_zero() { values_.setZero(); }

  template <typename Other>
  Tensor<Other> cast() const {
    Tensor<Other> out(batch_, shape_);
    out.values() = values_.template cast<Other>();
    return out;
  }

 private:
  Index batch_ = 0;
  Shape shape_;
  Vector values_;
};

/// Throws std::invalid_argument unless `actual == expected`.
void require_shape(const Shape& actual, const Shape& expected, const std::string& what);

}  // namespace sclera
