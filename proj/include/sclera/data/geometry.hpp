#pragma once

#include "sclera/data/mask.hpp"
#include "sclera/detect/types.hpp"

#include <opencv2/core.hpp>

#include <optional>

namespace sclera::data {

/// Per-axis growth of the detected box around its centre.
struct PaddingPolicy {
  double width = 2.5;
  double height = 2.0;
};

struct RoiTransform {
  cv::Point crop_origin;
  cv::Size crop_size;
  cv::Size resized_to;
};

struct Crop {
  cv::Mat image;
  RoiTransform transform;
};

/// Grows `box` by `pad`, clips it to the image and extracts the region.
/// Returns nullopt when nothing of the box survives clipping, in which case
/// the caller segments the full image.
std::optional<Crop> crop_roi(const cv::Mat& image, const detect::BoundingBox& box, const PaddingPolicy& pad);

/// Whole-image crop, used when no region was detected.
Crop full_image_roi(const cv::Mat& image);

/// Extracts the same rectangle from a mask.
BinaryMask crop_mask(const BinaryMask& mask, const RoiTransform& t);

enum class Approach { FCN, SEGNET, GAN };

std::string to_string(Approach a);
Approach parse_approach(const std::string& s);

/// Network input size of each approach: 320x240 for FCN and SegNet, 256x256 for the GAN.
cv::Size input_size_for(Approach a);

struct ResizedPair {
  cv::Mat image;                // CV_8UC3
  std::optional<cv::Mat> mask;  // CV_8UC1, or CV_8UC3 for the GAN; 0/255
};

/// Bilinear for the image, nearest-neighbour plus re-binarisation for the mask.
ResizedPair resize_to(const cv::Mat& image, const BinaryMask* mask, cv::Size target, int mask_channels = 1);
ResizedPair resize_for(Approach a, const cv::Mat& image, const BinaryMask* mask = nullptr);

/// Nearest-neighbour binary-mask resize.
BinaryMask resize_mask(const BinaryMask& mask, cv::Size target);

/// Resizes a network-resolution mask to the crop size and pastes it at the
/// crop origin into an all-background canvas of `original`.
BinaryMask map_mask_to_original(const BinaryMask& mask, const RoiTransform& t, cv::Size original);

}  // namespace sclera::data
