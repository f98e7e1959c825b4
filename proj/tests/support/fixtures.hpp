#pragma once

#include "sclera/data/mask.hpp"
#include "sclera/nn/network.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <filesystem>
#include <random>
#include <string>

namespace fixtures {

namespace fs = std::filesystem;
using sclera::BinaryMask;
using sclera::Index;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("sclera-" + tag + "-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline BinaryMask random_mask(std::mt19937_64& rng, Index w, Index h, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  BinaryMask m(w, h);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) m(y, x) = coin(rng);
  return m;
}

struct Ellipse {
  double cx, cy, rx, ry;
};

/// Bright ellipse on a dark, mildly noisy field, and its mask.
inline std::pair<cv::Mat, BinaryMask> ellipse_image(int w, int h, const Ellipse& e, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> noise(0, 30);
  cv::Mat image(h, w, CV_8UC3);
  BinaryMask mask(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = (x + 0.5 - e.cx) / e.rx, dy = (y + 0.5 - e.cy) / e.ry;
      const bool inside = dx * dx + dy * dy <= 1.0;
      mask(y, x) = inside;
      const int base = inside ? 210 : 40;
      image.at<cv::Vec3b>(y, x) = cv::Vec3b(cv::saturate_cast<uchar>(base + noise(rng)),
                                            cv::saturate_cast<uchar>(base - 10 + noise(rng)),
                                            cv::saturate_cast<uchar>(base - 20 + noise(rng)));
    }
  }
  return {image, mask};
}

/// Random ellipse fully inside a w x h frame.
inline Ellipse random_ellipse(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rx = w * (0.15 + 0.15 * u(rng)), ry = h * (0.15 + 0.15 * u(rng));
  return {rx + (w - 2 * rx) * u(rng), ry + (h - 2 * ry) * u(rng), rx, ry};
}

/// Writes images/<name>.png and masks/<name>.png under `root`.
inline void write_sample(const fs::path& root, const std::string& name, const cv::Mat& image, const BinaryMask& mask) {
  fs::create_directories(root / "images");
  fs::create_directories(root / "masks");
  cv::imwrite((root / "images" / (name + ".png")).string(), image);
  cv::imwrite((root / "masks" / (name + ".png")).string(), mask.to_mat());
}

template <typename Scalar>
sclera::Tensor<Scalar> random_tensor(std::mt19937_64& rng, Index batch, sclera::Shape shape, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  sclera::Tensor<Scalar> t(batch, shape);
  for (Index i = 0; i < t.size(); ++i) t.values()[i] = static_cast<Scalar>(n(rng));
  return t;
}

struct GradCheck {
  double max_relative_error = 0.0;
  int checked = 0;
};

/// Central-difference check of parameter gradients for the scalar loss
/// <w, net(x)> with a random projection w, on `coords` random coordinates.
inline GradCheck check_parameter_gradients(sclera::nn::Network<double>& net, const sclera::Tensor<double>& x,
                                           std::mt19937_64& rng, int coords, double eps = 1e-5) {
  using sclera::nn::Mode;
  const auto y0 = net.forward(x, Mode::Train);
  const auto w = random_tensor<double>(rng, y0.batch(), y0.shape());
  const auto loss = [&] { return net.forward(x, Mode::Train).values().dot(w.values()); };
  net.zero_grad();
  net.forward(x, Mode::Train);
  net.backward(w);
  auto params = net.parameters(true);
  Index total = 0;
  for (auto* p : params) total += p->value.size();
  std::uniform_int_distribution<Index> pick(0, total - 1);
  GradCheck r;
  for (int k = 0; k < coords; ++k) {
    Index flat = pick(rng);
    size_t pi = 0;
    while (flat >= params[pi]->value.size()) flat -= params[pi++]->value.size();
    auto& p = *params[pi];
    const double saved = p.value[flat];
    p.value[flat] = saved + eps;
    const double up = loss();
    p.value[flat] = saved - eps;
    const double down = loss();
    p.value[flat] = saved;
    const double numeric = (up - down) / (2 * eps);
    const double analytic = p.grad[flat];
    const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    r.max_relative_error = std::max(r.max_relative_error, std::abs(numeric - analytic) / denom);
    ++r.checked;
  }
  return r;
}

/// Same check for d(loss)/d(input).
inline GradCheck check_input_gradients(sclera::nn::Network<double>& net, sclera::Tensor<double> x,
                                       std::mt19937_64& rng, int coords, double eps = 1e-5) {
  using sclera::nn::Mode;
  const auto y0 = net.forward(x, Mode::Train);
  const auto w = random_tensor<double>(rng, y0.batch(), y0.shape());
  net.forward(x, Mode::Train);
  const auto gx = net.backward(w);
  std::uniform_int_distribution<Index> pick(0, x.size() - 1);
  GradCheck r;
  for (int k = 0; k < coords; ++k) {
    const Index i = pick(rng);
    const double saved = x.values()[i];
    x.values()[i] = saved + eps;
    const double up = net.forward(x, Mode::Train).values().dot(w.values());
    x.values()[i] = saved - eps;
    const double down = net.forward(x, Mode::Train).values().dot(w.values());
    x.values()[i] = saved;
    const double numeric = (up - down) / (2 * eps);
    const double denom = std::max({std::abs(numeric), std::abs(gx.values()[i]), 1e-6});
    r.max_relative_error = std::max(r.max_relative_error, std::abs(numeric - gx.values()[i]) / denom);
    ++r.checked;
  }
  return r;
}

}  // namespace fixtures
