#pragma once

#include "sclera/data/mask.hpp"

#include <opencv2/core.hpp>

#include <vector>

namespace sclera::data {

/// Stacks same-sized 8-bit BGR (or gray) images into an N x C x H x W tensor
/// of RGB (or gray) values scaled to [-1, 1].
Tensor<float> images_to_tensor(const std::vector<cv::Mat>& images, Index channels = 3);

/// N x 1 x H x W tensor of class indices (0 background, 1 sclera).
Tensor<float> masks_to_labels(const std::vector<BinaryMask>& masks);

/// N x C x H x W tensor holding +1 for sclera and -1 for background,
/// replicated over C channels (the GAN's target image).
Tensor<float> masks_to_signed(const std::vector<BinaryMask>& masks, Index channels = 3);

}  // namespace sclera::data
