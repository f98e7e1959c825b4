#include "sclera/data/geometry.hpp"

#include "sclera/error.hpp"

#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace sclera::data {

std::optional<Crop> crop_roi(const cv::Mat& image, const detect::BoundingBox& box, const PaddingPolicy& pad) {
  const double W = image.cols, H = image.rows;
  const double half_w = box.w * W * pad.width / 2.0, half_h = box.h * H * pad.height / 2.0;
  const double cx = box.cx * W, cy = box.cy * H;
  const int x0 = static_cast<int>(std::clamp(std::lround(cx - half_w), 0L, static_cast<long>(image.cols)));
  const int x1 = static_cast<int>(std::clamp(std::lround(cx + half_w), 0L, static_cast<long>(image.cols)));
  const int y0 = static_cast<int>(std::clamp(std::lround(cy - half_h), 0L, static_cast<long>(image.rows)));
  const int y1 = static_cast<int>(std::clamp(std::lround(cy + half_h), 0L, static_cast<long>(image.rows)));
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  Crop c;
  c.transform.crop_origin = {x0, y0};
  c.transform.crop_size = {x1 - x0, y1 - y0};
  c.transform.resized_to = c.transform.crop_size;
  c.image = image(cv::Rect(c.transform.crop_origin, c.transform.crop_size)).clone();
  return c;
}

Crop full_image_roi(const cv::Mat& image) {
  Crop c;
  c.image = image.clone();
  c.transform.crop_origin = {0, 0};
  c.transform.crop_size = image.size();
  c.transform.resized_to = image.size();
  return c;
}

BinaryMask crop_mask(const BinaryMask& mask, const RoiTransform& t) {
  const cv::Rect r(t.crop_origin, t.crop_size);
  if (r.x < 0 || r.y < 0 || r.x + r.width > mask.width() || r.y + r.height > mask.height())
    throw std::invalid_argument("crop_mask: rectangle outside mask");
  return BinaryMask(BinaryMask::Array(mask.array().block(r.y, r.x, r.height, r.width)));
}

std::string to_string(Approach a) {
  switch (a) {
    case Approach::FCN: return "FCN";
    case Approach::SEGNET: return "SegNet";
    case Approach::GAN: return "GAN";
  }
  return "?";
}

Approach parse_approach(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (l == "fcn" || l == "fcn8") return Approach::FCN;
  if (l == "segnet") return Approach::SEGNET;
  if (l == "gan" || l == "pix2pix") return Approach::GAN;
  throw UsageError("unknown approach '" + s + "' (expected fcn, segnet or gan)");
}

cv::Size input_size_for(Approach a) { return a == Approach::GAN ? cv::Size(256, 256) : cv::Size(320, 240); }

BinaryMask resize_mask(const BinaryMask& mask, cv::Size target) {
  if (mask.width() == target.width && mask.height() == target.height) return mask;
  BinaryMask out(target.width, target.height);
  const double sx = static_cast<double>(mask.width()) / target.width;
  const double sy = static_cast<double>(mask.height()) / target.height;
  for (int y = 0; y < target.height; ++y) {
    const Index src_y = std::min<Index>(static_cast<Index>((y + 0.5) * sy), mask.height() - 1);
    for (int x = 0; x < target.width; ++x) {
      const Index src_x = std::min<Index>(static_cast<Index>((x + 0.5) * sx), mask.width() - 1);
      out(y, x) = mask(src_y, src_x);
    }
  }
  return out;
}

ResizedPair resize_to(const cv::Mat& image, const BinaryMask* mask, cv::Size target, int mask_channels) {
  if (image.empty()) throw DataError("resize: empty image");
  ResizedPair out;
  if (image.size() == target) out.image = image.clone();
  else cv::resize(image, out.image, target, 0, 0, cv::INTER_LINEAR);
  if (mask) {
    if (mask->width() != image.cols || mask->height() != image.rows)
      throw std::invalid_argument("resize: mask and image sizes differ");
    cv::Mat m = resize_mask(*mask, target).to_mat();
    if (mask_channels == 3) cv::merge(std::vector<cv::Mat>{m, m, m}, m);
    out.mask = m;
  }
  return out;
}

ResizedPair resize_for(Approach a, const cv::Mat& image, const BinaryMask* mask) {
  return resize_to(image, mask, input_size_for(a), a == Approach::GAN ? 3 : 1);
}

BinaryMask map_mask_to_original(const BinaryMask& mask, const RoiTransform& t, cv::Size original) {
  const cv::Rect r(t.crop_origin, t.crop_size);
  if (r.width <= 0 || r.height <= 0 || r.x < 0 || r.y < 0 || r.x + r.width > original.width ||
      r.y + r.height > original.height)
    throw std::invalid_argument("map_mask_to_original: crop rectangle does not fit the original image");
  if (mask.width() != t.resized_to.width || mask.height() != t.resized_to.height)
    throw std::invalid_argument("map_mask_to_original: mask size differs from the recorded network size");
  BinaryMask canvas(original.width, original.height, false);
  canvas.array().block(r.y, r.x, r.height, r.width) = resize_mask(mask, t.crop_size).array();
  return canvas;
}

}  // namespace sclera::data
