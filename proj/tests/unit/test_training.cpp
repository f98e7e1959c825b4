#include "doctest.h"

#include "sclera/error.hpp"
#include "sclera/io.hpp"
#include "sclera/train/gan.hpp"
#include "sclera/train/trainer.hpp"
#include "support/fixtures.hpp"

#include <cmath>
#include <sstream>

using namespace sclera;
using namespace sclera::train;

namespace {

std::vector<SegmentationExample> ellipse_examples(int count, int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SegmentationExample> out;
  for (int i = 0; i < count; ++i) {
    auto [image, mask] = fixtures::ellipse_image(w, h, fixtures::random_ellipse(rng, w, h), rng());
    out.push_back({"e" + std::to_string(i), image, mask});
  }
  return out;
}

seg::SegmentationModel tiny_model(seg::Kind kind, std::uint64_t seed = 1) {
  seg::SegmenterConfig cfg;
  cfg.kind = kind;
  cfg.input_size = cv::Size(32, 32);
  cfg.width_divisor = 16;
  cfg.fc_channels = 64;
  cfg.seed = seed;
  return seg::SegmentationModel(cfg);
}

}  // namespace

TEST_CASE("segmentation loss") {
  const Tensor<float> logits(2, {2, 4, 4});
  std::mt19937_64 rng(1);
  const std::vector<BinaryMask> masks{fixtures::random_mask(rng, 4, 4), fixtures::random_mask(rng, 4, 4)};
  CHECK(segmentation_loss(logits, masks).value == doctest::Approx(std::log(2.0)));
  // Weighting the sclera class scales only the sclera pixels' terms.
  const double frac = static_cast<double>(masks[0].count() + masks[1].count()) / 32.0;
  CHECK(segmentation_loss(logits, masks, 3.0).value == doctest::Approx(std::log(2.0) * (1 + 2 * frac)));
  CHECK_THROWS_AS(segmentation_loss(Tensor<float>(2, {3, 4, 4}), masks), std::invalid_argument);
  CHECK_THROWS_AS(segmentation_loss(logits, {masks[0]}), std::invalid_argument);
}

TEST_CASE("one conditional-GAN step") {
  seg::UNetGenerator<double> g({{3, 32, 32}, 3, 64, 16, 0, 1});
  seg::PatchDiscriminator<double> d({{6, 32, 32}, 64, 16, 3, 2});
  std::mt19937_64 rng(3);
  const auto x = fixtures::random_tensor<double>(rng, 2, g.input_shape());
  // A per-pixel function of the input: the sign of its first channel.
  Tensor<double> target(2, g.output_shape());
  for (Index n = 0; n < 2; ++n)
    for (Index c = 0; c < 3; ++c)
      for (Index y = 0; y < 32; ++y)
        for (Index xx = 0; xx < 32; ++xx) target(n, c, y, xx) = x(n, 0, y, xx) > 0 ? 1.0 : -1.0;

  SUBCASE("discriminator loss starts near 2 ln 2") {
    nn::Adam<double> go(g.parameters(), {2e-4, 0.5}), dopt(d.parameters(), {2e-4, 0.5});
    const auto l = gan_step<double>(g, d, go, dopt, x, target, 100.0);
    CHECK(std::abs(l.discriminator - 2 * std::log(2.0)) < 0.35);
    CHECK(l.generator == doctest::Approx(l.adversarial + 100.0 * l.l1));
  }
  SUBCASE("lambda 0 leaves only the adversarial term") {
    nn::Adam<double> go(g.parameters(), {2e-4, 0.5}), dopt(d.parameters(), {2e-4, 0.5});
    const auto l = gan_step<double>(g, d, go, dopt, x, target, 0.0);
    CHECK(l.generator == l.adversarial);
  }
  SUBCASE("the discriminator's gradients are cleared after the step") {
    nn::Adam<double> go(g.parameters(), {2e-4, 0.5}), dopt(d.parameters(), {2e-4, 0.5});
    gan_step<double>(g, d, go, dopt, x, target, 100.0);
    for (auto* p : d.parameters()) CHECK(p->grad.squaredNorm() == 0.0);
  }
  SUBCASE("the L1 term falls over repeated steps on one pair") {
    nn::Adam<double> go(g.parameters(), {2e-3, 0.5}), dopt(d.parameters(), {2e-4, 0.5});
    const double first = gan_step<double>(g, d, go, dopt, x, target, 100.0).l1;
    double last = first;
    for (int i = 0; i < 200; ++i) last = gan_step<double>(g, d, go, dopt, x, target, 100.0).l1;
    CHECK(last < 0.5 * first);
  }
}

TEST_CASE("training configuration validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  for (auto mutate : std::vector<std::function<void(TrainConfig&)>>{
           [](TrainConfig& t) { t.epochs = 0; }, [](TrainConfig& t) { t.batch_size = 0; },
           [](TrainConfig& t) { t.learning_rate = 0; }, [](TrainConfig& t) { t.lambda_l1 = -1; },
           [](TrainConfig& t) { t.select_on = "accuracy"; }, [](TrainConfig& t) { t.threshold = 1.0f; }}) {
    TrainConfig bad;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), UsageError);
  }
}

TEST_CASE("one epoch writes one log line and a checkpoint") {
  fixtures::TempDir dir("train");
  auto model = tiny_model(seg::Kind::FCN);
  const auto data = ellipse_examples(3, 32, 32, 4);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 2;
  cfg.checkpoint_dir = dir / "run";
  int calls = 0;
  const auto r = train_segmenter(model, cfg, data, {data[0]}, {{"train_sensors", {"UBIRIS_V2"}}},
                                 [&](const EpochRecord& e) {
                                   ++calls;
                                   CHECK(e.epoch == 1);
                                 });
  CHECK(calls == 1);
  CHECK(r.log.epochs.size() == 1);
  CHECK(r.best_epoch == 1);
  REQUIRE(r.checkpoint);
  CHECK(fs::exists(*r.checkpoint));
  std::istringstream lines(read_text_file(dir / "run" / "train_log.jsonl"));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    CHECK(j.contains("epoch"));
    CHECK(j.contains("train_loss"));
    CHECK(j.contains("validation_f_score"));
    CHECK(j.contains("seconds"));
    ++count;
  }
  CHECK(count == 1);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto data = ellipse_examples(4, 32, 32, 5);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 2;
  cfg.learning_rate = 1e-3;
  cfg.seed = 9;
  for (auto kind : {seg::Kind::SEGNET, seg::Kind::GAN}) {
    auto a = tiny_model(kind), b = tiny_model(kind);
    const auto ra = train_segmenter(a, cfg, data, data);
    const auto rb = train_segmenter(b, cfg, data, data);
    CHECK(ra.log.epochs.back().train_loss == rb.log.epochs.back().train_loss);
    const auto pa = a.parameters(false), pb = b.parameters(false);
    REQUIRE(pa.size() == pb.size());
    bool same = true;
    for (size_t i = 0; i < pa.size(); ++i) same = same && pa[i]->value == pb[i]->value;
    CHECK(same);
    if (kind == seg::Kind::GAN) CHECK(ra.log.epochs.back().discriminator_loss.has_value());
  }
}

TEST_CASE("training failures") {
  const auto data = ellipse_examples(2, 32, 32, 6);
  auto model = tiny_model(seg::Kind::SEGNET);
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(train_segmenter(model, cfg, {}, data), DataError);
  CHECK_THROWS_AS(train_segmenter(model, cfg, data, {}), DataError);
  const auto big = ellipse_examples(1, 40, 32, 7);
  CHECK_THROWS_AS(train_segmenter(model, cfg, big, data), std::invalid_argument);

  SUBCASE("a diverging run stops with a numerical error") {
    TrainConfig wild = cfg;
    wild.epochs = 5;
    wild.learning_rate = 1e37;
    wild.clip_norm = 0;
    auto fcn = tiny_model(seg::Kind::FCN);
    CHECK_THROWS_AS(train_segmenter(fcn, wild, data, data), NumericalError);
  }
}

TEST_CASE("box annotations") {
  fixtures::TempDir dir("boxes");
  write_text_file(dir / "ok.txt", "# id x y w h\nimg1 10 20 30 40\nsub/img2 0 0 5 5  # trailing\n\n");
  const auto boxes = read_box_annotations(dir / "ok.txt");
  CHECK(boxes.size() == 2);
  CHECK(boxes.at("img1").width == 30);
  const auto b = normalize_box(boxes.at("img1"), {100, 200});
  CHECK(b.cx == doctest::Approx(0.25));
  CHECK(b.cy == doctest::Approx(0.2));
  CHECK(b.w == doctest::Approx(0.3));
  CHECK(b.h == doctest::Approx(0.2));
  write_text_file(dir / "dup.txt", "a 1 1 2 2\na 1 1 2 2\n");
  CHECK_THROWS_AS(read_box_annotations(dir / "dup.txt"), DataError);
  write_text_file(dir / "short.txt", "a 1 1 2\n");
  CHECK_THROWS_AS(read_box_annotations(dir / "short.txt"), DataError);
  write_text_file(dir / "empty.txt", "a 1 1 0 2\n");
  CHECK_THROWS_AS(read_box_annotations(dir / "empty.txt"), DataError);
  CHECK_THROWS_AS(read_box_annotations(dir / "missing.txt"), DataError);
}

TEST_CASE("detector training selects on iou") {
  detect::DetectorConfig dc;
  dc.input_size = 64;
  dc.width_divisor = 16;
  detect::PeriocularDetector det(dc, 1);
  const auto [image, mask] = fixtures::ellipse_image(80, 60, {40, 30, 15, 10}, 1);
  const std::vector<DetectionExample> ex{{"a", image, {0.5, 0.5, 0.4, 0.35}}};
  TrainConfig cfg;
  cfg.epochs = 2;
  CHECK_THROWS_AS(train_detector(det, cfg, ex, ex), UsageError);
  cfg.select_on = "iou";
  const auto r = train_detector(det, cfg, ex, ex);
  CHECK(r.log.metric == "iou");
  CHECK(r.log.epochs.size() == 2);
  CHECK(r.best_score == validate_detector(det, ex));
}

TEST_CASE("training stops once the validation score reaches the target") {
  const auto data = ellipse_examples(2, 32, 32, 8);
  auto model = tiny_model(seg::Kind::SEGNET);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.stop_at = 0.0;
  const auto r = train_segmenter(model, cfg, data, data);
  CHECK(r.log.epochs.size() == 1);
  cfg.stop_at = 1.5;
  CHECK(train_segmenter(model, cfg, data, data).log.epochs.size() == 5);
}
