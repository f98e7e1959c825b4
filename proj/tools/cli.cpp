#include "cli.hpp"

#include "sclera/data/split.hpp"
#include "sclera/error.hpp"
#include "sclera/eval/overlay.hpp"
#include "sclera/eval/pipeline.hpp"
#include "sclera/io.hpp"
#include "sclera/log.hpp"
#include "sclera/train/models.hpp"
#include "sclera/train/trainer.hpp"

#include "CLI11.hpp"

#include <opencv2/imgcodecs.hpp>

#include <cstdio>
#include <iostream>

namespace sclera::cli {

namespace fs = std::filesystem;
using train::json;

std::string describe_model(const std::string& name) {
  if (name == "fast-yolo") return nn::format_model_spec(detect::FastYolo<float>(detect::DetectorConfig{}).describe());
  if (name == "fcn") return nn::format_model_spec(seg::Fcn8<float>(seg::Fcn8Config{}).describe());
  if (name == "segnet") return nn::format_model_spec(seg::SegNet<float>(seg::SegNetConfig{}).describe());
  if (name == "gan-generator")
    return nn::format_model_spec(seg::UNetGenerator<float>(seg::GeneratorConfig{}).describe());
  if (name == "gan-discriminator")
    return nn::format_model_spec(seg::PatchDiscriminator<float>(seg::DiscriminatorConfig{}).describe());
  throw UsageError("unknown model '" + name + "' (fast-yolo, fcn, segnet, gan-generator, gan-discriminator)");
}

namespace {

/// Knobs shared by everything that runs the segmentation pipeline.
struct PipelineFlags {
  std::string detector;
  double pad_width = 2.5;
  double pad_height = 2.0;
  float threshold = 0.5f;
  std::string metrics_at = "original";

  eval::PipelineOptions options() const {
    eval::PipelineOptions o;
    o.padding = {pad_width, pad_height};
    o.threshold = threshold;
    o.resolution = eval::parse_resolution(metrics_at);
    return o;
  }
};

void add_pipeline_flags(CLI::App* sub, PipelineFlags& f, bool with_metrics) {
  sub->add_option("--detector", f.detector, "Detector checkpoint; without one every image is segmented whole");
  sub->add_option("--pad-width", f.pad_width, "Horizontal growth factor of the detected box")->capture_default_str();
  sub->add_option("--pad-height", f.pad_height, "Vertical growth factor of the detected box")->capture_default_str();
  sub->add_option("--threshold", f.threshold, "Sclera probability threshold")->capture_default_str();
  if (with_metrics)
    sub->add_option("--metrics-at", f.metrics_at, "Compare at the original or the network resolution")
        ->check(CLI::IsMember({"original", "network"}))
        ->capture_default_str();
}

/// Evaluation inputs common to evaluate and cross-eval.
struct EvalFlags {
  PipelineFlags pipeline;
  std::string segmenter;
  std::string stub;
  std::string stub_size = "320x240";
  std::string kind;
  std::string manifest;
  std::string split;
  std::string out_dir;
  std::string overlay_dir;
  std::string approach;
};

void add_eval_flags(CLI::App* sub, EvalFlags& f) {
  auto* seg = sub->add_option("--segmenter", f.segmenter, "Segmenter checkpoint");
  auto* stub = sub->add_option("--stub", f.stub, "Stand-in segmenter instead of a checkpoint")
                   ->check(CLI::IsMember({"echo", "background"}));
  seg->excludes(stub);
  stub->excludes(seg);
  sub->add_option("--stub-size", f.stub_size, "Stub input size, WIDTHxHEIGHT")->capture_default_str();
  sub->add_option("--kind", f.kind, "Expected segmenter kind; a different checkpoint is rejected")
      ->check(CLI::IsMember({"fcn", "segnet", "gan"}));
  sub->add_option("--manifest", f.manifest, "Dataset manifest")->required();
  sub->add_option("--split", f.split, "Split file")->required();
  sub->add_option("--out-dir", f.out_dir, "Directory for metrics and reports")->required();
  sub->add_option("--overlay-dir", f.overlay_dir, "Also write <id>_overlay.png error overlays here");
  sub->add_option("--approach", f.approach, "Approach label in the report (defaults to the segmenter kind)");
  add_pipeline_flags(sub, f.pipeline, true);
}

cv::Size parse_size(const std::string& s) {
  int w = 0, h = 0;
  char x = 0;
  if (std::sscanf(s.c_str(), "%d%c%d", &w, &x, &h) != 3 || (x != 'x' && x != 'X') || w <= 0 || h <= 0)
    throw UsageError("bad size '" + s + "', expected WIDTHxHEIGHT");
  return {w, h};
}

std::set<data::SensorTag> database_or_all(const std::string& db) {
  if (db.empty()) return {data::SensorTag::UBIRIS_V2, data::SensorTag::MICHE_GS4, data::SensorTag::MICHE_IP5,
                          data::SensorTag::MICHE_GT2};
  return data::parse_database(db);
}

std::vector<data::ImageSample> subset(const data::Manifest& m, const data::SplitAssignment& split, data::Subset s,
                                      const std::set<data::SensorTag>& tags) {
  std::vector<data::ImageSample> out;
  for (auto& sample : data::select(m, split, s))
    if (tags.count(sample.sensor)) out.push_back(sample);
  return out;
}

std::string file_safe(std::string id) {
  for (char& c : id)
    if (c == '/' || c == '\\') c = '_';
  return id;
}

json sensor_list(const std::set<data::SensorTag>& tags) {
  json j = json::array();
  for (auto t : tags) j.push_back(data::to_string(t));
  return j;
}

std::set<data::SensorTag> sensors_in(const std::vector<data::ImageSample>& samples) {
  std::set<data::SensorTag> out;
  for (const auto& s : samples) out.insert(s.sensor);
  return out;
}

void print_epoch(const train::EpochRecord& r, const std::string& metric) {
  std::printf("epoch %4d  loss %.6f  val %s %.4f  %.1fs\n", r.epoch, r.train_loss, metric.c_str(),
              r.validation_score, r.seconds);
  std::fflush(stdout);
}

/// A segmenter built from a checkpoint or a stub, plus its report label.
struct LoadedSegmenter {
  std::unique_ptr<seg::SegmentationModel> model;
  std::unique_ptr<seg::Segmenter> segmenter;
  train::CheckpointHeader header;
  std::string label;
};

LoadedSegmenter load_segmenter(const EvalFlags& f) {
  LoadedSegmenter out;
  if (!f.stub.empty()) {
    const cv::Size size = parse_size(f.stub_size);
    if (f.stub == "echo") out.segmenter = std::make_unique<seg::EchoSegmenter>(size);
    else out.segmenter = std::make_unique<seg::BackgroundSegmenter>(size);
    out.label = f.stub;
  } else if (!f.segmenter.empty()) {
    std::optional<seg::Kind> expected;
    if (!f.kind.empty()) expected = data::parse_approach(f.kind);
    out.model = train::load_segmenter(f.segmenter, expected, &out.header);
    out.segmenter = std::make_unique<seg::NetworkSegmenter>(*out.model);
    out.label = data::to_string(out.model->kind());
  } else {
    throw UsageError("one of --segmenter or --stub is required");
  }
  if (!f.approach.empty()) out.label = f.approach;
  return out;
}

void write_evaluation(const eval::EvaluationResult& r, const fs::path& dir, const CLI::App& app) {
  write_text_file(dir / "per_image.csv", eval::serialize_records(r.records));
  write_text_file(dir / "report.csv", eval::emit_report({r.row}, eval::ReportFormat::Csv));
  const std::string text = eval::emit_report({r.row}, eval::ReportFormat::Text);
  write_text_file(dir / "report.txt", text);
  write_text_file(dir / "run_config.ini", app.config_to_str(true, true));
  std::cout << text;
  if (!r.excluded.empty()) std::cout << r.excluded.size() << " image(s) excluded\n";
}

eval::ImageCallback overlay_writer(const std::string& dir) {
  if (dir.empty()) return {};
  fs::create_directories(dir);
  return [dir](const data::ImageSample& s, const cv::Mat& image, const eval::PipelineOutput& out, const BinaryMask& gt) {
    const fs::path path = fs::path(dir) / (file_safe(s.id) + "_overlay.png");
    if (!cv::imwrite(path.string(), eval::render_error_overlay(out.mask, gt, image)))
      throw DataError("cannot write " + path.string());
  };
}

void require_evaluable(const std::vector<data::ImageSample>& samples) {
  if (samples.empty()) throw DataError("no images to evaluate");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Periocular sclera segmentation: detection, segmentation, training and evaluation"};
  app.set_config("--config", "", "INI file with option defaults; command-line flags win");
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Log progress details to stderr");
  app.add_flag("-q,--quiet", quiet, "Only log errors");

  // ingest
  std::string ingest_root, ingest_layout, ingest_sensor, ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Scan a dataset directory into a manifest");
  ingest->add_option("--root", ingest_root, "Dataset root directory")->required();
  auto* layout_opt = ingest->add_option("--layout", ingest_layout, "Layout description file");
  auto* sensor_opt = ingest->add_option("--sensor", ingest_sensor, "Single-sensor layout: images/*, masks/{stem}.png");
  layout_opt->excludes(sensor_opt);
  ingest->add_option("--out", ingest_out, "Manifest to write")->required();

  // split
  std::string split_manifest, split_out;
  std::uint64_t split_seed = 0;
  data::SplitRatios ratios;
  auto* split = app.add_subcommand("split", "Seeded train/validation/test split of a manifest");
  split->add_option("--manifest", split_manifest, "Manifest file")->required();
  split->add_option("--seed", split_seed, "Shuffle seed (required for reproducibility)")->required();
  split->add_option("--out", split_out, "Split file to write")->required();
  split->add_option("--train", ratios.train, "Training fraction")->capture_default_str();
  split->add_option("--validation", ratios.validation, "Validation fraction")->capture_default_str();
  split->add_option("--test", ratios.test, "Test fraction")->capture_default_str();

  // train-detector and train-seg
  struct TrainFlags {
    std::string manifest, split, boxes, out_dir, database;
    train::TrainConfig cfg;
  };
  TrainFlags td, ts;
  td.cfg.learning_rate = 1e-3;
  td.cfg.select_on = "iou";
  const auto add_train_flags = [](CLI::App* sub, TrainFlags& f) {
    sub->add_option("--manifest", f.manifest, "Dataset manifest")->required();
    sub->add_option("--split", f.split, "Split file")->required();
    sub->add_option("--out-dir", f.out_dir, "Directory for best.ckpt, train_log.jsonl and run_config.ini")
        ->required();
    sub->add_option("--database", f.database, "Train on these sensors only (UBIRIS, MICHE, GS4, IP5, GT2, ...)");
    sub->add_option("--epochs", f.cfg.epochs, "Training epochs")->capture_default_str();
    sub->add_option("--batch-size", f.cfg.batch_size, "Images per batch")->capture_default_str();
    sub->add_option("--lr", f.cfg.learning_rate, "Adam learning rate")->capture_default_str();
    sub->add_option("--seed", f.cfg.seed, "Initialisation and shuffling seed")->capture_default_str();
    sub->add_option("--clip-norm", f.cfg.clip_norm, "Gradient norm cap (<= 0 disables)")->capture_default_str();
    sub->add_option("--stop-at", f.cfg.stop_at, "Stop once the validation score reaches this value");
  };

  Index det_input = 416, det_channels = 3, det_divisor = 1;
  double det_confidence = 0.25;
  auto* train_det = app.add_subcommand("train-detector", "Train the periocular region detector");
  add_train_flags(train_det, td);
  train_det->add_option("--boxes", td.boxes, "Box annotations: id x y width height per line")->required();
  train_det->add_option("--input-size", det_input, "Square network input side, a multiple of 32")
      ->capture_default_str();
  train_det->add_option("--channels", det_channels, "1 for grayscale, 3 for colour input")
      ->check(CLI::IsMember({1, 3}))
      ->capture_default_str();
  train_det->add_option("--width-divisor", det_divisor, "Divide every hidden layer's width")->capture_default_str();
  train_det->add_option("--confidence", det_confidence, "Detection confidence threshold")->capture_default_str();

  std::string seg_kind;
  Index seg_divisor = 1, seg_fc = 4096;
  int seg_w = 0, seg_h = 0;
  double seg_pad_w = 2.5, seg_pad_h = 2.0;
  auto* train_seg = app.add_subcommand("train-seg", "Train a sclera segmenter");
  train_seg->add_option("--kind", seg_kind, "fcn, segnet or gan")
      ->required()
      ->check(CLI::IsMember({"fcn", "segnet", "gan"}));
  add_train_flags(train_seg, ts);
  train_seg->add_option("--boxes", ts.boxes, "Crop every image to its padded box before training");
  train_seg->add_option("--pad-width", seg_pad_w, "Horizontal box growth when cropping")->capture_default_str();
  train_seg->add_option("--pad-height", seg_pad_h, "Vertical box growth when cropping")->capture_default_str();
  train_seg->add_option("--lambda-l1", ts.cfg.lambda_l1, "GAN: weight of the L1 term")->capture_default_str();
  train_seg->add_option("--sclera-weight", ts.cfg.sclera_weight, "Cross-entropy weight of sclera pixels")
      ->capture_default_str();
  train_seg->add_option("--select-on", ts.cfg.select_on, "Validation metric used to pick the best epoch")
      ->check(CLI::IsMember({"f_score", "precision", "recall"}))
      ->capture_default_str();
  train_seg->add_option("--threshold", ts.cfg.threshold, "Binarisation threshold during validation")
      ->capture_default_str();
  train_seg->add_option("--width-divisor", seg_divisor, "Divide every layer's width")->capture_default_str();
  train_seg->add_option("--fc-channels", seg_fc, "FCN: width of the first 1x1 layer")->capture_default_str();
  train_seg->add_option("--input-width", seg_w, "Network input width (0 = native size)")->capture_default_str();
  train_seg->add_option("--input-height", seg_h, "Network input height (0 = native size)")->capture_default_str();

  // segment
  std::string segment_ckpt, segment_out, segment_kind;
  std::vector<std::string> segment_images;
  PipelineFlags segment_flags;
  auto* segment = app.add_subcommand("segment", "Write sclera masks for images");
  segment->add_option("--segmenter", segment_ckpt, "Segmenter checkpoint")->required();
  segment->add_option("--kind", segment_kind, "Expected segmenter kind")->check(CLI::IsMember({"fcn", "segnet", "gan"}));
  segment->add_option("--out-dir", segment_out, "Directory for <stem>_mask.png files")->required();
  segment->add_option("images", segment_images, "Input images")->required();
  add_pipeline_flags(segment, segment_flags, false);

  // evaluate
  EvalFlags ev;
  std::string ev_subset = "test", ev_database;
  auto* evaluate = app.add_subcommand("evaluate", "Per-image metrics and a mean/std report");
  add_eval_flags(evaluate, ev);
  evaluate->add_option("--subset", ev_subset, "Split part to evaluate")
      ->check(CLI::IsMember({"train", "validation", "test"}))
      ->capture_default_str();
  evaluate->add_option("--database", ev_database, "Restrict to these sensors");

  // cross-eval
  EvalFlags cx;
  std::string cx_train, cx_test;
  auto* cross = app.add_subcommand("cross-eval", "Evaluate on a database disjoint from the training one");
  add_eval_flags(cross, cx);
  cross->add_option("--train-db", cx_train, "Database the segmenter was trained on")->required();
  cross->add_option("--test-db", cx_test, "Database to test on")->required();

  // overlay
  std::string ov_image, ov_pred, ov_gt, ov_out;
  auto* overlay = app.add_subcommand("overlay", "Paint false positives green and false negatives red");
  overlay->add_option("--image", ov_image, "Base image")->required();
  overlay->add_option("--prediction", ov_pred, "Predicted mask")->required();
  overlay->add_option("--ground-truth", ov_gt, "Ground-truth mask")->required();
  overlay->add_option("--out", ov_out, "Output image")->required();

  // report
  std::vector<std::string> rep_rows;
  std::string rep_format = "text", rep_out;
  auto* report = app.add_subcommand("report", "Aggregate per-image metric files into a results table");
  report->add_option("--row", rep_rows, "DATABASE,APPROACH,per_image.csv; repeat for more rows")->required();
  report->add_option("--format", rep_format, "csv or text")->check(CLI::IsMember({"csv", "text"}))->capture_default_str();
  report->add_option("--out", rep_out, "Write here instead of standard output");

  // describe-model
  std::string dm_name, dm_ckpt;
  auto* describe = app.add_subcommand("describe-model", "Print the layer table of a network");
  auto* dm_name_opt = describe->add_option("model", dm_name, "fast-yolo, fcn, segnet, gan-generator, gan-discriminator");
  auto* dm_ckpt_opt = describe->add_option("--checkpoint", dm_ckpt, "Describe the network stored in a checkpoint");
  dm_name_opt->excludes(dm_ckpt_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  set_log_level(quiet ? LogLevel::Quiet : verbose ? LogLevel::Info : LogLevel::Warning);

  try {
    if (ingest->parsed()) {
      data::Layout layout;
      if (!ingest_layout.empty()) layout = data::Layout::read(ingest_layout);
      else if (!ingest_sensor.empty()) layout = data::Layout::single(data::parse_sensor(ingest_sensor));
      else throw UsageError("ingest needs --layout or --sensor");
      const data::Manifest m = data::load_dataset(ingest_root, layout);
      data::write_manifest(m, ingest_out);
      Index masks = 0;
      for (const auto& s : m.samples) masks += s.mask_path ? 1 : 0;
      if (!quiet) std::cout << m.samples.size() << " images, " << masks << " with masks\n";
    } else if (split->parsed()) {
      const data::Manifest m = data::read_manifest(split_manifest);
      const data::SplitAssignment s = data::make_splits(m, ratios, split_seed);
      write_text_file(split_out, data::serialize_split(s, m));
      if (!quiet)
        std::cout << "train " << s.train.size() << ", validation " << s.validation.size() << ", test "
                  << s.test.size() << "\n";
    } else if (train_det->parsed()) {
      td.cfg.checkpoint_dir = td.out_dir;
      const data::Manifest m = data::read_manifest(td.manifest);
      const data::SplitAssignment s = data::read_split(td.split);
      const auto tags = database_or_all(td.database);
      const auto boxes = train::read_box_annotations(td.boxes);
      const auto train_samples = subset(m, s, data::Subset::Train, tags);
      const auto tr = train::load_detection_examples(train_samples, boxes);
      const auto va = train::load_detection_examples(subset(m, s, data::Subset::Validation, tags), boxes);
      detect::DetectorConfig cfg;
      cfg.input_size = det_input;
      cfg.input_channels = det_channels;
      cfg.width_divisor = det_divisor;
      cfg.confidence_threshold = det_confidence;
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      detect::PeriocularDetector det(cfg, td.cfg.seed);
      fs::create_directories(td.out_dir);
      write_text_file(fs::path(td.out_dir) / "run_config.ini", app.config_to_str(true, true));
      json meta{{"train_sensors", sensor_list(sensors_in(train_samples))}, {"split_seed", s.seed}};
      const auto result = train::train_detector(det, td.cfg, tr, va, meta, [&](const train::EpochRecord& r) {
        if (!quiet) print_epoch(r, "iou");
      });
      if (!quiet)
        std::cout << "best epoch " << result.best_epoch << " (iou " << result.best_score << ") -> "
                  << result.checkpoint->string() << "\n";
    } else if (train_seg->parsed()) {
      ts.cfg.checkpoint_dir = ts.out_dir;
      seg::SegmenterConfig cfg;
      cfg.kind = data::parse_approach(seg_kind);
      if (seg_w > 0 || seg_h > 0) {
        if (seg_w <= 0 || seg_h <= 0) throw UsageError("set both --input-width and --input-height");
        cfg.input_size = cv::Size(seg_w, seg_h);
      }
      cfg.width_divisor = seg_divisor;
      cfg.fc_channels = seg_fc;
      cfg.seed = ts.cfg.seed;
      std::unique_ptr<seg::SegmentationModel> model;
      try {
        model = std::make_unique<seg::SegmentationModel>(cfg);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const data::Manifest m = data::read_manifest(ts.manifest);
      const data::SplitAssignment s = data::read_split(ts.split);
      const auto tags = database_or_all(ts.database);
      std::optional<std::map<std::string, cv::Rect2d>> boxes;
      if (!ts.boxes.empty()) boxes = train::read_box_annotations(ts.boxes);
      const data::PaddingPolicy pad{seg_pad_w, seg_pad_h};
      const auto train_samples = subset(m, s, data::Subset::Train, tags);
      const auto tr = train::load_segmentation_examples(train_samples, model->input_size(), boxes ? &*boxes : nullptr, pad);
      const auto va = train::load_segmentation_examples(subset(m, s, data::Subset::Validation, tags),
                                                        model->input_size(), boxes ? &*boxes : nullptr, pad);
      fs::create_directories(ts.out_dir);
      write_text_file(fs::path(ts.out_dir) / "run_config.ini", app.config_to_str(true, true));
      json meta{{"train_sensors", sensor_list(sensors_in(train_samples))}, {"split_seed", s.seed}};
      const auto result = train::train_segmenter(*model, ts.cfg, tr, va, meta, [&](const train::EpochRecord& r) {
        if (!quiet) print_epoch(r, ts.cfg.select_on);
      });
      if (!quiet)
        std::cout << "best epoch " << result.best_epoch << " (" << ts.cfg.select_on << " " << result.best_score
                  << ") -> " << result.checkpoint->string() << "\n";
    } else if (segment->parsed()) {
      std::optional<seg::Kind> expected;
      if (!segment_kind.empty()) expected = data::parse_approach(segment_kind);
      auto model = train::load_segmenter(segment_ckpt, expected);
      std::unique_ptr<detect::PeriocularDetector> det;
      if (!segment_flags.detector.empty()) det = train::load_detector(segment_flags.detector);
      seg::NetworkSegmenter segmenter(*model);
      eval::SegmentationPipeline pipeline(det.get(), segmenter, segment_flags.options());
      fs::create_directories(segment_out);
      size_t failed = 0;
      for (const auto& path : segment_images) {
        const cv::Mat image = cv::imread(path, cv::IMREAD_COLOR);
        if (image.empty()) {
          log_warning("skipping unreadable image " + path);
          ++failed;
          continue;
        }
        const auto out = pipeline.run(image);
        if (out.full_image && det) log_info(path + ": no periocular region detected, segmented the full image");
        const fs::path dst = fs::path(segment_out) / (fs::path(path).stem().string() + "_mask.png");
        if (!cv::imwrite(dst.string(), out.mask.to_mat())) throw DataError("cannot write " + dst.string());
      }
      write_text_file(fs::path(segment_out) / "run_config.ini", app.config_to_str(true, true));
      if (!quiet) std::cout << segment_images.size() - failed << " of " << segment_images.size() << " images segmented\n";
      if (failed > 0) return 2;
    } else if (evaluate->parsed() || cross->parsed()) {
      const bool is_cross = cross->parsed();
      const EvalFlags& f = is_cross ? cx : ev;
      std::set<data::SensorTag> train_db, test_db;
      if (is_cross) {
        train_db = database_or_all(cx_train);
        test_db = database_or_all(cx_test);
        eval::require_disjoint(train_db, test_db);
      }
      LoadedSegmenter ls = load_segmenter(f);
      if (is_cross && ls.model && ls.header.metadata.contains("train_sensors")) {
        std::set<data::SensorTag> trained;
        for (const auto& t : ls.header.metadata["train_sensors"]) trained.insert(data::parse_sensor(t.get<std::string>()));
        if (trained != train_db)
          throw DataError("segmenter was trained on " + data::database_label(trained) + ", not " +
                          data::database_label(train_db));
      }
      std::unique_ptr<detect::PeriocularDetector> det;
      if (!f.pipeline.detector.empty()) det = train::load_detector(f.pipeline.detector);
      eval::SegmentationPipeline pipeline(det.get(), *ls.segmenter, f.pipeline.options());
      const data::Manifest m = data::read_manifest(f.manifest);
      const data::SplitAssignment s = data::read_split(f.split);
      eval::EvaluationResult r;
      if (is_cross) {
        r = eval::cross_sensor_evaluate(pipeline, m, s, train_db, test_db, ls.label, overlay_writer(f.overlay_dir));
      } else {
        const data::Subset part = ev_subset == "train"        ? data::Subset::Train
                                  : ev_subset == "validation" ? data::Subset::Validation
                                                              : data::Subset::Test;
        const auto tags = database_or_all(ev_database);
        const auto samples = subset(m, s, part, tags);
        require_evaluable(samples);
        const std::string label = ev_database.empty() ? data::database_label(sensors_in(samples))
                                                      : data::database_label(tags);
        r = eval::evaluate(pipeline, samples, label, ls.label, overlay_writer(f.overlay_dir));
      }
      if (r.records.empty()) throw DataError("every image was excluded from evaluation");
      write_evaluation(r, f.out_dir, app);
    } else if (overlay->parsed()) {
      const cv::Mat image = cv::imread(ov_image, cv::IMREAD_COLOR);
      const cv::Mat pred = cv::imread(ov_pred, cv::IMREAD_GRAYSCALE);
      const cv::Mat gt = cv::imread(ov_gt, cv::IMREAD_GRAYSCALE);
      if (image.empty() || pred.empty() || gt.empty()) throw DataError("cannot read overlay inputs");
      const cv::Mat out = eval::render_error_overlay(BinaryMask::from_mat(pred), BinaryMask::from_mat(gt), image);
      if (fs::path(ov_out).has_parent_path()) fs::create_directories(fs::path(ov_out).parent_path());
      if (!cv::imwrite(ov_out, out)) throw DataError("cannot write " + ov_out);
    } else if (report->parsed()) {
      std::vector<eval::ReportRow> rows;
      for (const auto& spec : rep_rows) {
        const auto first = spec.find(','), second = spec.find(',', first == std::string::npos ? first : first + 1);
        if (first == std::string::npos || second == std::string::npos)
          throw UsageError("--row expects DATABASE,APPROACH,FILE, got '" + spec + "'");
        const auto records = eval::parse_records(read_text_file(spec.substr(second + 1)));
        rows.push_back(eval::aggregate(records, spec.substr(0, first), spec.substr(first + 1, second - first - 1)));
      }
      const std::string text =
          eval::emit_report(rows, rep_format == "csv" ? eval::ReportFormat::Csv : eval::ReportFormat::Text);
      if (rep_out.empty()) std::cout << text;
      else write_text_file(rep_out, text);
    } else if (describe->parsed()) {
      if (!dm_ckpt.empty()) std::cout << train::read_checkpoint_header(dm_ckpt).model_spec;
      else if (!dm_name.empty()) std::cout << describe_model(dm_name);
      else throw UsageError("describe-model needs a model name or --checkpoint");
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace sclera::cli
