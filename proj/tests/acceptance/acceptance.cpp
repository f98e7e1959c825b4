// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "cli.hpp"

#include "sclera/data/split.hpp"
#include "sclera/detect/decode.hpp"
#include "sclera/error.hpp"
#include "sclera/eval/overlay.hpp"
#include "sclera/eval/pipeline.hpp"
#include "sclera/io.hpp"
#include "sclera/log.hpp"
#include "sclera/seg/fcn8.hpp"
#include "sclera/seg/pix2pix.hpp"
#include "sclera/seg/segnet.hpp"
#include "sclera/train/trainer.hpp"
#include "support/fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace sclera;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome outcome(bool pass, std::string detail) { return {pass, std::move(detail)}; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

/// Runs one criterion; exceeding the time budget counts as a failure.
void criterion(int number, const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= budget_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s  %2d  %-34s %8.2fs / %gs  %s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(), secs,
              budget_seconds, o.detail.c_str(), in_time ? "" : "  [over time budget]");
  std::fflush(stdout);
}

/// Calls the command-line entry point with std::cout silenced.
int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sclera");
  args.insert(args.begin() + 1, "-q");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  return code;
}

// 1 ------------------------------------------------------------------------

Outcome golden_files() {
  const std::string dir = SCLERA_GOLDEN_DIR;
  bool ok = true;
  std::string detail;
  for (const auto& [model, file] : std::vector<std::pair<std::string, std::string>>{{"fast-yolo", "fast_yolo.txt"},
                                                                                   {"segnet", "segnet.txt"}}) {
    const auto start = std::chrono::steady_clock::now();
    const std::string text = cli::describe_model(model);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool same = text == read_text_file(dir + "/" + file);
    ok = ok && same && secs < 1.0;
    detail += model + (same ? " match " : " DIFFERS ") + fmt("%.2fs", secs) + "; ";
  }
  return outcome(ok, detail + "(each < 1s)");
}

// 2 ------------------------------------------------------------------------

Outcome fcn_coarse_grid() {
  const seg::Fcn8Config full;
  const Shape declared = seg::Fcn8<float>(full).coarse_shape();
  // A thin variant at the same input size, run forward to observe the real map.
  seg::Fcn8Config thin = full;
  thin.width_divisor = 32;
  thin.fc_channels = 16;
  seg::Fcn8<float> net(thin);
  std::mt19937_64 rng(2);
  net.forward(fixtures::random_tensor<float>(rng, 1, net.input_shape()), nn::Mode::Eval);
  const Shape observed = net.last_coarse_scores().shape();
  const bool ok = declared.width == 10 && declared.height == 8 && observed == declared;
  return outcome(ok, "coarse score map " + to_string(observed) + " (want 10 wide x 8 high)");
}

// 3 ------------------------------------------------------------------------

struct OracleMetrics {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0, recall = 0, f = 0;
};

OracleMetrics brute_force(const BinaryMask& pred, const BinaryMask& gt) {
  OracleMetrics o;
  for (Index y = 0; y < gt.height(); ++y)
    for (Index x = 0; x < gt.width(); ++x) {
      const bool p = pred(y, x), g = gt(y, x);
      if (p && g) ++o.tp;
      else if (p) ++o.fp;
      else if (g) ++o.fn;
      else ++o.tn;
    }
  const auto ratio = [](long hit, long miss, long other_miss) {
    if (hit + miss == 0) return other_miss == 0 ? 1.0 : 0.0;
    return static_cast<double>(hit) / static_cast<double>(hit + miss);
  };
  o.precision = ratio(o.tp, o.fp, o.fn);
  o.recall = ratio(o.tp, o.fn, o.fp);
  o.f = o.precision + o.recall == 0 ? 0.0 : 2 * o.precision * o.recall / (o.precision + o.recall);
  return o;
}

Outcome metrics_oracle() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  double worst = 0.0;
  int count_mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    // Mix in sparse and dense masks so near-degenerate pairs are covered.
    const auto pred = fixtures::random_mask(rng, 16, 16, density(rng));
    const auto gt = fixtures::random_mask(rng, 16, 16, density(rng));
    const auto c = eval::pixel_counts(pred, gt);
    const auto m = eval::metrics(c);
    const auto o = brute_force(pred, gt);
    if (c.tp != o.tp || c.fp != o.fp || c.fn != o.fn || c.tn != o.tn) ++count_mismatches;
    worst = std::max({worst, std::abs(m.precision - o.precision), std::abs(m.recall - o.recall),
                      std::abs(m.f_score - o.f)});
  }
  // Degenerate conventions, spelled out.
  const BinaryMask empty(16, 16), full(16, 16, true);
  BinaryMask left(16, 16), right(16, 16);
  for (Index y = 0; y < 16; ++y)
    for (Index x = 0; x < 8; ++x) {
      left(y, x) = true;
      right(y, x + 8) = true;
    }
  struct Fixture {
    const BinaryMask& pred;
    const BinaryMask& gt;
    double p, r, f;
  };
  const std::vector<Fixture> fixtures_{{empty, empty, 1, 1, 1}, {empty, full, 0, 0, 0}, {full, empty, 0, 0, 0},
                                       {full, full, 1, 1, 1},   {left, right, 0, 0, 0},  {full, left, 0.5, 1, 2.0 / 3}};
  int degenerate_failures = 0;
  for (const auto& fx : fixtures_) {
    const auto m = eval::metrics(eval::pixel_counts(fx.pred, fx.gt));
    if (std::abs(m.precision - fx.p) > 1e-12 || std::abs(m.recall - fx.r) > 1e-12 || std::abs(m.f_score - fx.f) > 1e-12)
      ++degenerate_failures;
  }
  const bool ok = count_mismatches == 0 && worst <= 1e-12 && degenerate_failures == 0;
  return outcome(ok, "1000 pairs, count mismatches " + std::to_string(count_mismatches) + ", max |diff| " +
                         fmt("%.1e", worst) + " (tol 1e-12), degenerate fixtures failing " +
                         std::to_string(degenerate_failures) + "/" + std::to_string(fixtures_.size()));
}

// 4 ------------------------------------------------------------------------

struct RefDetection {
  Index row, col, anchor;
  double cx, cy, w, h, confidence;
};

/// Written independently of the library decoder: anchor-major loop, explicit softmax.
std::vector<RefDetection> reference_decode(const Tensor<float>& raw, const detect::DetectorConfig& cfg) {
  const Index s = raw.height(), per_anchor = 5 + cfg.classes;
  const auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  std::vector<RefDetection> out;
  for (Index a = 0; a < static_cast<Index>(cfg.anchors.size()); ++a) {
    for (Index r = 0; r < s; ++r) {
      for (Index c = 0; c < s; ++c) {
        const auto at = [&](Index k) { return static_cast<double>(raw(0, a * per_anchor + k, r, c)); };
        double cls = 0.0;
        if (cfg.classes == 1) {
          cls = sig(at(5));
        } else {
          std::vector<double> e;
          double total = 0.0;
          for (Index k = 0; k < cfg.classes; ++k) total += e.emplace_back(std::exp(at(5 + k)));
          for (double v : e) cls = std::max(cls, v / total);
        }
        const double conf = sig(at(4)) * cls;
        if (conf < cfg.confidence_threshold) continue;
        out.push_back({r, c, a, (c + sig(at(0))) / s, (r + sig(at(1))) / s,
                       cfg.anchors[a].width * std::exp(at(2)) / s, cfg.anchors[a].height * std::exp(at(3)) / s, conf});
      }
    }
  }
  return out;
}

Outcome decoder_oracle() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  int count_mismatches = 0, monotonicity_failures = 0;
  for (int t = 0; t < 100; ++t) {
    detect::DetectorConfig cfg;
    if (t % 5 == 4) cfg.classes = 3;
    const auto raw = fixtures::random_tensor<float>(rng, 1, {cfg.head_filters(), cfg.grid(), cfg.grid()}, 2.0);
    const auto got = detect::decode_predictions(raw, cfg);
    auto want = reference_decode(raw, cfg);
    std::sort(want.begin(), want.end(), [](const auto& a, const auto& b) {
      return std::tie(a.row, a.col, a.anchor) < std::tie(b.row, b.col, b.anchor);
    });
    if (got.size() != want.size()) {
      ++count_mismatches;
      continue;
    }
    for (size_t i = 0; i < got.size(); ++i) {
      if (got[i].row != want[i].row || got[i].col != want[i].col || got[i].anchor != want[i].anchor) {
        ++count_mismatches;
        break;
      }
      const auto& b = got[i].box;
      worst = std::max({worst, std::abs(b.cx - want[i].cx), std::abs(b.cy - want[i].cy), std::abs(b.w - want[i].w),
                        std::abs(b.h - want[i].h), std::abs(b.confidence - want[i].confidence)});
    }
    // Raising the threshold only ever removes detections.
    std::set<std::tuple<Index, Index, Index>> previous;
    for (int k = 0; k < 10; ++k) {
      detect::DetectorConfig swept = cfg;
      swept.confidence_threshold = k / 10.0;
      std::set<std::tuple<Index, Index, Index>> kept;
      for (const auto& d : detect::decode_predictions(raw, swept)) kept.insert({d.row, d.col, d.anchor});
      if (k > 0 && !std::includes(previous.begin(), previous.end(), kept.begin(), kept.end())) ++monotonicity_failures;
      previous = std::move(kept);
    }
  }
  const bool ok = count_mismatches == 0 && worst <= 1e-6 && monotonicity_failures == 0;
  return outcome(ok, "100 tensors, set mismatches " + std::to_string(count_mismatches) + ", max |diff| " +
                         fmt("%.1e", worst) + " (tol 1e-6), sweep violations " +
                         std::to_string(monotonicity_failures));
}

// 5 ------------------------------------------------------------------------

Outcome unpool_conservation() {
  // Stage inputs of a quarter-width SegNet at 320x240; odd extents exercise clipped windows.
  const std::vector<Shape> stages{{16, 240, 320}, {32, 120, 160}, {64, 60, 80}, {128, 30, 40}, {128, 15, 20}};
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<size_t> pick(0, stages.size() - 1);
  int sum_failures = 0, placement_failures = 0;
  for (int t = 0; t < 100; ++t) {
    const auto x = fixtures::random_tensor<float>(rng, 1, stages[pick(rng)]);
    nn::MaxPool2d<float> pool(2, 2, nn::PoolPadding::Ceil);
    const auto pooled = pool.forward(x, nn::Mode::Eval);
    const auto& rec = *pool.record();
    const auto up = nn::max_unpool(pooled, rec);
    const Shape is = rec.input, os = rec.output;
    for (Index c = 0; c < is.channels; ++c) {
      double pooled_sum = 0.0, unpooled_sum = 0.0;
      for (Index oy = 0; oy < os.height; ++oy) {
        for (Index ox = 0; ox < os.width; ++ox) {
          const float v = pooled(0, c, oy, ox);
          pooled_sum += v;
          int holders = 0;
          for (Index iy = 2 * oy; iy < std::min(2 * oy + 2, is.height); ++iy)
            for (Index ix = 2 * ox; ix < std::min(2 * ox + 2, is.width); ++ix) {
              const float u = up(0, c, iy, ix);
              unpooled_sum += u;
              if (u != 0.0f) holders += u == v ? 1 : 2;
            }
          if (holders != 1) ++placement_failures;
        }
      }
      if (pooled_sum != unpooled_sum) ++sum_failures;
    }
  }
  const bool ok = sum_failures == 0 && placement_failures == 0;
  return outcome(ok, "100 inputs, sum mismatches " + std::to_string(sum_failures) + ", windows without exactly one value " +
                         std::to_string(placement_failures));
}

// 6 ------------------------------------------------------------------------

Outcome gradient_checks() {
  std::mt19937_64 rng(6);
  constexpr int kCoords = 25;
  std::string detail;
  bool ok = true;
  const auto check = [&](const std::string& name, nn::Network<double>& net) {
    const auto x = fixtures::random_tensor<double>(rng, 2, net.input_shape());
    const auto r = fixtures::check_parameter_gradients(net, x, rng, kCoords);
    ok = ok && r.checked >= 20 && r.max_relative_error <= 1e-3;
    detail += name + " " + fmt("%.1e", r.max_relative_error) + " ";
  };
  seg::Fcn8<double> fcn({{3, 32, 32}, 16, 64, 2, 1});
  check("fcn8", fcn);
  seg::SegNet<double> segnet({{3, 32, 32}, 16, 2, 2});
  check("segnet", segnet);
  seg::UNetGenerator<double> gen({{3, 16, 16}, 3, 64, 16, 0, 3});
  check("generator", gen);
  seg::PatchDiscriminator<double> disc({{6, 32, 32}, 64, 16, 3, 4});
  check("discriminator", disc);
  return outcome(ok, std::to_string(kCoords) + " weights each, max rel err: " + detail + "(tol 1e-3)");
}

// 7 ------------------------------------------------------------------------

std::vector<train::SegmentationExample> ellipse_set(int count, int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<train::SegmentationExample> out;
  for (int i = 0; i < count; ++i) {
    auto [image, mask] = fixtures::ellipse_image(w, h, fixtures::random_ellipse(rng, w, h), rng());
    out.push_back({"ellipse" + std::to_string(i), image, mask});
  }
  return out;
}

Outcome overfit() {
  std::string detail;
  bool ok = true;

  {
    const auto [image, mask] = fixtures::ellipse_image(160, 120, {70, 65, 40, 25}, 7);
    const std::vector<train::DetectionExample> one{{"eye", image, {70.0 / 160, 65.0 / 120, 80.0 / 160, 50.0 / 120}}};
    detect::DetectorConfig dc;
    dc.input_size = 128;
    dc.width_divisor = 4;
    detect::PeriocularDetector det(dc, 7);
    train::TrainConfig cfg;
    cfg.epochs = 500;  // one image, batch 1: one step per epoch
    cfg.batch_size = 1;
    cfg.learning_rate = 1e-3;
    cfg.select_on = "iou";
    cfg.stop_at = 0.7;
    const auto r = train::train_detector(det, cfg, one, one);
    const double final_iou = train::validate_detector(det, one);
    ok = ok && final_iou >= 0.7;
    detail += "detector iou " + fmt("%.3f", final_iou) + " after " + std::to_string(r.log.epochs.size()) + " steps; ";
  }

  const auto data = ellipse_set(4, 64, 64, 8);
  for (auto kind : {seg::Kind::FCN, seg::Kind::SEGNET, seg::Kind::GAN}) {
    seg::SegmenterConfig sc;
    sc.kind = kind;
    sc.input_size = cv::Size(64, 64);
    sc.width_divisor = 8;
    sc.fc_channels = 128;
    sc.seed = 8;
    seg::SegmentationModel model(sc);
    train::TrainConfig cfg;
    cfg.epochs = 300;
    cfg.batch_size = 2;
    cfg.learning_rate = kind == seg::Kind::GAN ? 2e-4 : 1e-3;
    cfg.seed = 8;
    cfg.stop_at = 0.95;
    const auto r = train::train_segmenter(model, cfg, data, data);
    const double f = train::validate_segmenter(model, data, "f_score", 0.5f);
    ok = ok && f >= 0.95;
    detail += data::to_string(kind) + " F " + fmt("%.3f", f) + " after " + std::to_string(r.log.epochs.size()) +
              " epochs; ";
  }
  return outcome(ok, detail + "(want iou >= 0.7, F >= 0.95)");
}

// 8 ------------------------------------------------------------------------

/// Writes `count` ellipse images with masks and returns (manifest, split) paths.
std::pair<fs::path, fs::path> ellipse_dataset_on_disk(const fixtures::TempDir& dir, int count, int w, int h,
                                                      const std::string& sensor, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const fs::path root = dir / sensor;
  for (int i = 0; i < count; ++i) {
    const auto [image, mask] = fixtures::ellipse_image(w, h, fixtures::random_ellipse(rng, w, h), rng());
    fixtures::write_sample(root, "img" + std::to_string(i), image, mask);
  }
  const fs::path manifest = dir / (sensor + ".manifest"), split = dir / (sensor + ".split");
  if (cli({"ingest", "--root", root.string(), "--sensor", sensor, "--out", manifest.string()}) != 0)
    throw std::runtime_error("ingest failed");
  if (cli({"split", "--manifest", manifest.string(), "--seed", "11", "--out", split.string()}) != 0)
    throw std::runtime_error("split failed");
  return {manifest, split};
}

/// Metric cells (recall, precision, F) of the single data row of report.csv.
std::vector<std::string> report_cells(const fs::path& csv) {
  std::istringstream lines(read_text_file(csv));
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  std::vector<std::string> cells;
  std::istringstream fields(row);
  for (std::string f; std::getline(fields, f, ',');) cells.push_back(f);
  if (cells.size() != 5) throw std::runtime_error("unexpected report row: " + row);
  return {cells[2], cells[3], cells[4]};
}

Outcome pipeline_end_to_end() {
  fixtures::TempDir dir("acceptance-e2e");
  const auto [manifest, split] = ellipse_dataset_on_disk(dir, 10, 320, 240, "UBIRIS_V2", 12);
  const auto run = [&](const std::string& stub) {
    const fs::path out = dir / stub;
    const int code = cli({"evaluate", "--stub", stub, "--manifest", manifest.string(), "--split", split.string(),
                          "--out-dir", out.string()});
    if (code != 0) throw std::runtime_error("evaluate --stub " + stub + " exited with " + std::to_string(code));
    return report_cells(out / "report.csv");
  };
  const auto echo = run("echo");
  const auto background = run("background");
  const std::string perfect = "100.00 ± 00.00", zero = "00.00 ± 00.00";
  const bool ok = echo[0] == perfect && echo[1] == perfect && echo[2] == perfect && background[0] == zero;
  return outcome(ok, "echo R/P/F " + echo[0] + " | " + echo[1] + " | " + echo[2] + "; background recall " +
                         background[0]);
}

// 9 ------------------------------------------------------------------------

Outcome protocol_determinism() {
  fixtures::TempDir dir("acceptance-split");
  data::Manifest m;
  m.root = dir.path();
  const data::SensorTag sensors[] = {data::SensorTag::MICHE_GS4, data::SensorTag::MICHE_IP5, data::SensorTag::MICHE_GT2,
                                     data::SensorTag::UBIRIS_V2};
  for (int i = 0; i < 1000; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "s%04d", i);
    data::ImageSample s;
    s.id = id;
    s.image_path = dir / (std::string(id) + ".png");
    s.mask_path = dir / (std::string(id) + "_mask.png");
    s.sensor = sensors[i % 4];
    s.width = 320;
    s.height = 240;
    m.samples.push_back(s);
  }
  const fs::path manifest = dir / "all.manifest";
  data::write_manifest(m, manifest);
  const auto split_to = [&](const std::string& name) {
    const fs::path out = dir / name;
    if (cli({"split", "--manifest", manifest.string(), "--seed", "2019", "--out", out.string()}) != 0)
      throw std::runtime_error("split failed");
    return out;
  };
  const fs::path a = split_to("a.split"), b = split_to("b.split");
  const auto s = data::read_split(a);
  const bool counts = s.train.size() == 400 && s.validation.size() == 200 && s.test.size() == 400;
  const bool identical = read_text_file(a) == read_text_file(b);

  const int overlap = cli({"cross-eval", "--stub", "echo", "--manifest", manifest.string(), "--split", a.string(),
                           "--out-dir", (dir / "cross").string(), "--train-db", "MICHE", "--test-db", "IP5"});
  const bool refused = overlap == 1 && !fs::exists(dir / "cross" / "report.csv");
  return outcome(counts && identical && refused,
                 "split " + std::to_string(s.train.size()) + "/" + std::to_string(s.validation.size()) + "/" +
                     std::to_string(s.test.size()) + ", reruns " + (identical ? "byte-identical" : "DIFFER") +
                     ", overlapping cross-eval exit code " + std::to_string(overlap));
}

// 10 -----------------------------------------------------------------------

Outcome overlay_correctness() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> extent(8, 64), channel(1, 254);
  std::uniform_real_distribution<double> density(0.05, 0.95);
  fixtures::TempDir dir("acceptance-overlay");
  int mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    const int w = extent(rng), h = extent(rng);
    const auto pred = fixtures::random_mask(rng, w, h, density(rng));
    const auto gt = fixtures::random_mask(rng, w, h, density(rng));
    // Channel values in [1, 254] can never equal a pure overlay colour.
    cv::Mat base(h, w, CV_8UC3);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) base.at<cv::Vec3b>(y, x) = cv::Vec3b(channel(rng), channel(rng), channel(rng));
    cv::Mat rendered = eval::render_error_overlay(pred, gt, base);
    if (t < 5) {
      // Also through the command line and a PNG round trip.
      const fs::path img = dir / "base.png", p = dir / "pred.png", g = dir / "gt.png", out = dir / "out.png";
      cv::imwrite(img.string(), base);
      cv::imwrite(p.string(), pred.to_mat());
      cv::imwrite(g.string(), gt.to_mat());
      if (cli({"overlay", "--image", img.string(), "--prediction", p.string(), "--ground-truth", g.string(), "--out",
               out.string()}) != 0) {
        ++mismatches;
        continue;
      }
      rendered = cv::imread(out.string(), cv::IMREAD_COLOR);
    }
    const auto c = eval::pixel_counts(pred, gt);
    Index green = 0, red = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const auto px = rendered.at<cv::Vec3b>(y, x);
        green += px == eval::kFalsePositiveColor;
        red += px == eval::kFalseNegativeColor;
      }
    if (green != c.fp || red != c.fn) ++mismatches;
  }
  return outcome(mismatches == 0, "50 pairs, count mismatches " + std::to_string(mismatches));
}

}  // namespace

int main() {
  set_log_level(LogLevel::Quiet);
  criterion(1, "architecture golden files", 2, golden_files);
  criterion(2, "fcn coarse grid", 1, fcn_coarse_grid);
  criterion(3, "metrics oracle", 10, metrics_oracle);
  criterion(4, "decoder oracle", 10, decoder_oracle);
  criterion(5, "unpooling conservation", 5, unpool_conservation);
  criterion(6, "gradient check", 120, gradient_checks);
  criterion(7, "overfit smoke tests", 900, overfit);
  criterion(8, "pipeline end-to-end", 30, pipeline_end_to_end);
  criterion(9, "protocol determinism", 5, protocol_determinism);
  criterion(10, "overlay correctness", 5, overlay_correctness);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
