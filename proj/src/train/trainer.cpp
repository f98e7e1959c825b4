#include "sclera/train/trainer.hpp"

#include "sclera/data/tensor_io.hpp"
#include "sclera/detect/loss.hpp"
#include "sclera/error.hpp"
#include "sclera/eval/metrics.hpp"
#include "sclera/train/gan.hpp"
#include "sclera/train/models.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

namespace sclera::train {

void TrainConfig::validate() const {
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (lambda_l1 < 0.0) throw UsageError("lambda_l1 must be >= 0");
  if (!(sclera_weight > 0.0)) throw UsageError("sclera class weight must be positive");
  if (!(threshold > 0.0f && threshold < 1.0f)) throw UsageError("threshold must lie in (0, 1)");
  if (select_on != "f_score" && select_on != "precision" && select_on != "recall" && select_on != "iou")
    throw UsageError("unknown validation metric '" + select_on + "'");
}

std::string TrainLog::record_line(const EpochRecord& r, const std::string& metric) {
  json j{{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"validation_" + metric, r.validation_score},
         {"seconds", r.seconds}};
  if (r.discriminator_loss) j["discriminator_loss"] = *r.discriminator_loss;
  return j.dump();
}

std::string TrainLog::to_jsonl() const {
  std::string out;
  for (const auto& r : epochs) out += record_line(r, metric) + "\n";
  return out;
}

nn::LossResult<float> segmentation_loss(const Tensor<float>& logits, const std::vector<BinaryMask>& gt,
                                        double sclera_weight) {
  if (logits.channels() != 2) throw std::invalid_argument("segmentation loss: expected 2-channel logits");
  if (static_cast<Index>(gt.size()) != logits.batch())
    throw std::invalid_argument("segmentation loss: one mask per sample required");
  const Tensor<float> labels = data::masks_to_labels(gt);
  if (sclera_weight == 1.0) return nn::softmax_cross_entropy(logits, labels);
  Eigen::VectorXf weights(2);
  weights << 1.0f, static_cast<float>(sclera_weight);
  return nn::softmax_cross_entropy(logits, labels, &weights);
}

double validate_segmenter(seg::SegmentationModel& model, const std::vector<SegmentationExample>& examples,
                          const std::string& select_on, float threshold) {
  if (examples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& ex : examples) {
    const auto m = eval::metrics(eval::pixel_counts(binarize(model.segment(ex.image), threshold), ex.mask));
    sum += select_on == "precision" ? m.precision : select_on == "recall" ? m.recall : m.f_score;
  }
  return sum / static_cast<double>(examples.size());
}

double validate_detector(detect::PeriocularDetector& detector, const std::vector<DetectionExample>& examples) {
  if (examples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& ex : examples) {
    const auto box = detector.detect(ex.image);
    if (box) sum += detect::iou(*box, ex.box);
  }
  return sum / static_cast<double>(examples.size());
}

namespace {

using Clock = std::chrono::steady_clock;

/// Shared epoch bookkeeping: log file, best-score tracking and snapshots.
class EpochDriver {
 public:
  EpochDriver(const TrainConfig& cfg, nn::Module<float>& model, std::string metric,
              std::function<void(const fs::path&, const json&)> save, json metadata, const EpochCallback& on_epoch)
      : cfg_(cfg), model_(model), save_(std::move(save)), metadata_(std::move(metadata)), on_epoch_(on_epoch) {
    result_.log.metric = std::move(metric);
    if (!cfg_.checkpoint_dir.empty()) {
      fs::create_directories(cfg_.checkpoint_dir);
      log_path_ = cfg_.checkpoint_dir / "train_log.jsonl";
      std::ofstream(log_path_, std::ios::trunc);
    }
  }

  /// Returns true when training should stop.
  bool finish_epoch(EpochRecord r) {
    result_.log.epochs.push_back(r);
    if (!log_path_.empty()) {
      std::ofstream out(log_path_, std::ios::app);
      out << TrainLog::record_line(r, result_.log.metric) << '\n';
    }
    if (result_.best_epoch == 0 || r.validation_score > result_.best_score) {
      result_.best_epoch = r.epoch;
      result_.best_score = r.validation_score;
      best_ = snapshot(model_);
      if (!cfg_.checkpoint_dir.empty()) {
        json meta = metadata_;
        meta["epoch"] = r.epoch;
        meta["select_on"] = result_.log.metric;
        meta["validation_score"] = r.validation_score;
        const fs::path path = cfg_.checkpoint_dir / "best.ckpt";
        save_(path, meta);
        result_.checkpoint = path;
      }
    }
    if (on_epoch_) on_epoch_(r);
    return cfg_.stop_at && r.validation_score >= *cfg_.stop_at;
  }

  TrainResult finish() {
    if (!best_.empty()) restore(model_, best_);
    return std::move(result_);
  }

 private:
  const TrainConfig& cfg_;
  nn::Module<float>& model_;
  std::function<void(const fs::path&, const json&)> save_;
  json metadata_;
  const EpochCallback& on_epoch_;
  fs::path log_path_;
  TrainResult result_;
  std::vector<Eigen::VectorXf> best_;
};

void require_finite(double loss, int epoch, size_t batch) {
  if (!std::isfinite(loss))
    throw NumericalError("non-finite training loss (" + std::to_string(loss) + ") at epoch " + std::to_string(epoch) +
                         ", batch " + std::to_string(batch + 1) + "; try a lower learning rate or gradient clipping");
}

std::vector<std::vector<size_t>> batches(std::vector<size_t>& order, std::mt19937_64& rng, int batch_size) {
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<size_t>> out;
  for (size_t i = 0; i < order.size(); i += static_cast<size_t>(batch_size))
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + batch_size)));
  return out;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

TrainResult train_segmenter(seg::SegmentationModel& model, const TrainConfig& cfg,
                            const std::vector<SegmentationExample>& train, const std::vector<SegmentationExample>& val,
                            const json& metadata, const EpochCallback& on_epoch) {
  cfg.validate();
  if (cfg.select_on == "iou") throw UsageError("iou is a detector metric");
  if (train.empty()) throw DataError("training set is empty");
  if (val.empty()) throw DataError("validation set is empty");
  for (const auto* set : {&train, &val})
    for (const auto& ex : *set)
      if (ex.image.size() != model.input_size() || ex.mask.width() != model.input_size().width ||
          ex.mask.height() != model.input_size().height)
        throw std::invalid_argument("training example " + ex.id + " is not at the network input size");

  const bool gan = model.kind() == seg::Kind::GAN;
  nn::AdamOptions opt{cfg.learning_rate};
  if (gan) opt.beta1 = 0.5;
  nn::Adam<float> g_opt(model.network().parameters(), opt);
  std::optional<nn::Adam<float>> d_opt;
  if (gan) d_opt.emplace(model.discriminator().parameters(), opt);

  EpochDriver driver(
      cfg, model, cfg.select_on, [&](const fs::path& p, const json& meta) { save_segmenter(p, model, meta); },
      metadata, on_epoch);
  std::mt19937_64 rng(cfg.seed);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    double loss_sum = 0.0, d_sum = 0.0;
    const auto plan = batches(order, rng, cfg.batch_size);
    for (size_t b = 0; b < plan.size(); ++b) {
      std::vector<cv::Mat> images;
      std::vector<BinaryMask> masks;
      for (size_t i : plan[b]) {
        images.push_back(train[i].image);
        masks.push_back(train[i].mask);
      }
      const Tensor<float> x = model.to_input(images);
      double loss = 0.0;
      if (gan) {
        const GanLosses l = gan_step(model.network(), static_cast<nn::Network<float>&>(model.discriminator()), g_opt,
                                     *d_opt, x, data::masks_to_signed(masks, 3), cfg.lambda_l1, cfg.clip_norm);
        loss = l.generator;
        require_finite(l.discriminator, epoch, b);
        d_sum += l.discriminator;
      } else {
        const Tensor<float> logits = model.network().forward(x, nn::Mode::Train);
        const auto l = segmentation_loss(logits, masks, cfg.sclera_weight);
        loss = static_cast<double>(l.value);
        g_opt.zero_grad();
        model.network().backward(l.grad);
        if (cfg.clip_norm > 0.0) nn::clip_grad_norm(model.network().parameters(), cfg.clip_norm);
        g_opt.step();
      }
      require_finite(loss, epoch, b);
      loss_sum += loss;
    }
    EpochRecord r;
    r.epoch = epoch;
    r.train_loss = loss_sum / static_cast<double>(plan.size());
    if (gan) r.discriminator_loss = d_sum / static_cast<double>(plan.size());
    r.validation_score = validate_segmenter(model, val, cfg.select_on, cfg.threshold);
    r.seconds = seconds_since(t0);
    if (driver.finish_epoch(r)) break;
  }
  return driver.finish();
}

TrainResult train_detector(detect::PeriocularDetector& detector, const TrainConfig& cfg,
                           const std::vector<DetectionExample>& train, const std::vector<DetectionExample>& val,
                           const json& metadata, const EpochCallback& on_epoch) {
  cfg.validate();
  if (cfg.select_on != "iou") throw UsageError("the detector is selected on iou");
  if (train.empty()) throw DataError("training set is empty");
  if (val.empty()) throw DataError("validation set is empty");

  nn::Adam<float> opt(detector.parameters(), {cfg.learning_rate});
  EpochDriver driver(
      cfg, detector, "iou", [&](const fs::path& p, const json& meta) { save_detector(p, detector, meta); },
      metadata, on_epoch);
  std::mt19937_64 rng(cfg.seed);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), size_t{0});
  // Inputs are resized once up front.
  std::vector<Tensor<float>> inputs;
  for (const auto& ex : train) inputs.push_back(detector.to_input({ex.image}));
  auto& net = detector.network();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    double loss_sum = 0.0;
    const auto plan = batches(order, rng, cfg.batch_size);
    for (size_t b = 0; b < plan.size(); ++b) {
      Tensor<float> x(static_cast<Index>(plan[b].size()), net.input_shape());
      std::vector<detect::BoundingBox> boxes;
      for (size_t k = 0; k < plan[b].size(); ++k) {
        x.sample(static_cast<Index>(k)) = inputs[plan[b][k]].sample(0);
        boxes.push_back(train[plan[b][k]].box);
      }
      const Tensor<float> raw = net.forward(x, nn::Mode::Train);
      const auto l = detect::detector_loss(raw, boxes, detector.config());
      require_finite(l.total, epoch, b);
      opt.zero_grad();
      net.backward(l.grad);
      if (cfg.clip_norm > 0.0) nn::clip_grad_norm(detector.parameters(), cfg.clip_norm);
      opt.step();
      loss_sum += l.total;
    }
    EpochRecord r;
    r.epoch = epoch;
    r.train_loss = loss_sum / static_cast<double>(plan.size());
    r.validation_score = validate_detector(detector, val);
    r.seconds = seconds_since(t0);
    if (driver.finish_epoch(r)) break;
  }
  return driver.finish();
}

}  // namespace sclera::train
