#include "sclera/seg/segmenter.hpp"

#include "sclera/data/tensor_io.hpp"
#include "sclera/nn/losses.hpp"

namespace sclera::seg {

SegmentationModel::SegmentationModel(SegmenterConfig cfg) : cfg_(cfg) {
  if (cfg_.width_divisor < 1) throw std::invalid_argument("segmenter: width divisor must be >= 1");
  const cv::Size size = cfg_.resolved_input();
  const Shape input{3, size.height, size.width};
  switch (cfg_.kind) {
    case Kind::FCN: {
      Fcn8Config c;
      c.input = input;
      c.width_divisor = cfg_.width_divisor;
      c.fc_channels = cfg_.fc_channels;
      c.seed = cfg_.seed;
      net_ = std::make_unique<Fcn8<float>>(c);
      break;
    }
    case Kind::SEGNET: {
      SegNetConfig c;
      c.input = input;
      c.width_divisor = cfg_.width_divisor;
      c.seed = cfg_.seed;
      net_ = std::make_unique<SegNet<float>>(c);
      break;
    }
    case Kind::GAN: {
      GeneratorConfig g;
      g.input = input;
      g.width_divisor = cfg_.width_divisor;
      g.seed = cfg_.seed;
      net_ = std::make_unique<UNetGenerator<float>>(g);
      DiscriminatorConfig d;
      d.input = {6, size.height, size.width};
      d.width_divisor = cfg_.width_divisor;
      d.seed = cfg_.seed + 1;
      disc_ = std::make_unique<PatchDiscriminator<float>>(d);
      break;
    }
  }
}

PatchDiscriminator<float>& SegmentationModel::discriminator() {
  if (!disc_) throw std::logic_error("segmenter: only the GAN has a discriminator");
  return *disc_;
}

void SegmentationModel::visit_parameters(const nn::ParameterVisitor<float>& visit) {
  net_->visit_parameters([&](const std::string& name, nn::Parameter<float>& p) { visit("net." + name, p); });
  if (disc_)
    disc_->visit_parameters([&](const std::string& name, nn::Parameter<float>& p) { visit("disc." + name, p); });
}

Tensor<float> SegmentationModel::to_input(const std::vector<cv::Mat>& images) const {
  for (const auto& im : images)
    if (im.size() != input_size())
      throw std::invalid_argument("segmenter: image is " + std::to_string(im.cols) + "x" + std::to_string(im.rows) +
                                  ", network expects " + std::to_string(input_size().width) + "x" +
                                  std::to_string(input_size().height));
  return data::images_to_tensor(images, 3);
}

ProbabilityMask SegmentationModel::to_probability(const Tensor<float>& output, Index n) const {
  ProbabilityMask::Array p(output.height(), output.width());
  if (cfg_.kind == Kind::GAN) {
    const auto s = output.sample(n);
    const Eigen::RowVectorXf mean = s.colwise().mean();
    for (Index i = 0; i < p.size(); ++i) p.data()[i] = std::clamp((mean[i] + 1.0f) / 2.0f, 0.0f, 1.0f);
  } else {
    const Tensor<float> prob = nn::softmax_channels(output);
    const auto s = prob.sample(n);
    for (Index i = 0; i < p.size(); ++i) p.data()[i] = s(1, i);
  }
  return ProbabilityMask(std::move(p));
}

ProbabilityMask SegmentationModel::segment(const cv::Mat& image) {
  const Tensor<float> input = to_input({image});
  std::lock_guard lock(forward_mutex_);
  const Tensor<float> out = net_->forward(input, nn::Mode::Eval);
  return to_probability(out, 0);
}

ProbabilityMask EchoSegmenter::segment(const SegmentRequest& request) {
  if (!request.reference) throw std::invalid_argument("echo segmenter: no reference mask supplied");
  const BinaryMask& ref = *request.reference;
  if (ref.width() != input_.width || ref.height() != input_.height)
    throw std::invalid_argument("echo segmenter: reference mask has the wrong size");
  return ProbabilityMask(ref.array().cast<float>());
}

}  // namespace sclera::seg
