#include "sclera/error.hpp"
#include "sclera/log.hpp"
#include "sclera/train/trainer.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <fstream>
#include <sstream>

namespace sclera::train {

std::map<std::string, cv::Rect2d> read_box_annotations(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open box annotations " + path.string());
  std::map<std::string, cv::Rect2d> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id)) continue;
    cv::Rect2d r;
    std::string extra;
    if (!(fields >> r.x >> r.y >> r.width >> r.height) || (fields >> extra))
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 'id x y width height'");
    if (r.width <= 0 || r.height <= 0)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": box of " + id + " is empty");
    if (!out.emplace(id, r).second)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": duplicate box for " + id);
  }
  return out;
}

detect::BoundingBox normalize_box(const cv::Rect2d& box, cv::Size image) {
  const double w = image.width, h = image.height;
  return {(box.x + box.width / 2.0) / w, (box.y + box.height / 2.0) / h, box.width / w, box.height / h, 1.0};
}

namespace {

cv::Mat read_image(const data::ImageSample& s) {
  cv::Mat im = cv::imread(s.image_path.string(), cv::IMREAD_COLOR);
  if (im.empty()) throw DataError("cannot read image " + s.image_path.string());
  return im;
}

}  // namespace

std::vector<SegmentationExample> load_segmentation_examples(const std::vector<data::ImageSample>& samples,
                                                            cv::Size input,
                                                            const std::map<std::string, cv::Rect2d>* boxes,
                                                            const data::PaddingPolicy& padding) {
  std::vector<SegmentationExample> out;
  for (const auto& s : samples) {
    if (!s.mask_path) throw DataError("sample " + s.id + " has no mask");
    cv::Mat image = read_image(s);
    const cv::Mat mask_mat = cv::imread(s.mask_path->string(), cv::IMREAD_GRAYSCALE);
    if (mask_mat.empty()) throw DataError("cannot read mask " + s.mask_path->string());
    BinaryMask mask = BinaryMask::from_mat(mask_mat);
    if (mask.width() != image.cols || mask.height() != image.rows)
      throw DataError("mask of " + s.id + " does not match its image size");
    if (boxes) {
      const auto it = boxes->find(s.id);
      if (it == boxes->end()) throw DataError("no box annotation for " + s.id);
      if (auto crop = data::crop_roi(image, normalize_box(it->second, image.size()), padding)) {
        mask = data::crop_mask(mask, crop->transform);
        image = crop->image;
      } else {
        log_warning("box of " + s.id + " lies outside the image; using the full image");
      }
    }
    SegmentationExample ex;
    ex.id = s.id;
    if (image.size() == input) ex.image = image;
    else cv::resize(image, ex.image, input, 0, 0, cv::INTER_LINEAR);
    ex.mask = data::resize_mask(mask, input);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<DetectionExample> load_detection_examples(const std::vector<data::ImageSample>& samples,
                                                      const std::map<std::string, cv::Rect2d>& boxes) {
  std::vector<DetectionExample> out;
  for (const auto& s : samples) {
    const auto it = boxes.find(s.id);
    if (it == boxes.end()) throw DataError("no box annotation for " + s.id);
    DetectionExample ex;
    ex.id = s.id;
    ex.image = read_image(s);
    ex.box = normalize_box(it->second, ex.image.size());
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace sclera::train
