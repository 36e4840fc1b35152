#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "saa/losses.hpp"
#include "saa/registry.hpp"
#include "saa/synthetic.hpp"
#include "saa/toy_detectors.hpp"

using namespace saa;

namespace {

ImagePlane scene_with(PixelCoord center, ToyColor color, int size = 160) {
  ImagePlane image = make_background(size, size, 17);
  plant_toy_object(image, center, toy_object_size(size), color);
  return image;
}

}  // namespace

TEST_CASE("toy detectors see nothing on a plain background") {
  for (auto make : {make_toy_one_stage, make_toy_two_stage}) {
    const auto det = make({});
    for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(det->detect(make_background(160, 160, seed)).empty());
  }
}

TEST_CASE("one planted object gives one detection of its color") {
  const auto one = make_toy_one_stage();
  const auto two = make_toy_two_stage();
  const int size = toy_object_size(160);
  CHECK(size == 25);
  for (ToyColor color : {ToyColor::red, ToyColor::green, ToyColor::blue}) {
    for (PixelCoord center : {PixelCoord{80, 80}, PixelCoord{40, 117}, PixelCoord{125, 30}}) {
      const ImagePlane image = scene_with(center, color);
      const Box truth{center.row - size / 2.0, center.col - size / 2.0, center.row + size / 2.0,
                      center.col + size / 2.0};
      for (const DetectorAdapter* det : {one.get(), two.get()}) {
        const auto found = det->detect(image);
        REQUIRE(found.size() == 1);
        CHECK(found[0].category == static_cast<int>(color));
        CHECK(found[0].score >= det->score_threshold());
        CHECK(iou(found[0].box, truth) > 0.5);
      }
    }
  }
}

TEST_CASE("separate objects give separate detections") {
  for (int n = 1; n <= 5; ++n) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const SyntheticScene scene = make_synthetic_scene(160, 160, n, seed);
      CHECK(make_toy_one_stage()->detect(scene.image).size() == static_cast<std::size_t>(n));
      CHECK(make_toy_two_stage()->detect(scene.image).size() == static_cast<std::size_t>(n));
    }
  }
}

TEST_CASE("raw scores are well formed") {
  const ImagePlane image = scene_with({70, 90}, ToyColor::green);
  const RawScores a = make_toy_one_stage()->raw_scores(image);
  CHECK(a.box_count() == kToyOneStageGrid * kToyOneStageGrid);
  CHECK(a.objectness.size() == a.box_count());
  for (std::size_t b = 0; b < a.box_count(); ++b) {
    CHECK(a.objectness[b] > 0.0);
    CHECK(a.objectness[b] < 1.0);
    double row = 0.0;
    for (int c = 0; c < a.columns(); ++c) row += a.prob(b, c);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
  const RawScores b = make_toy_two_stage()->raw_scores(image);
  CHECK(b.box_count() == kToyTwoStageGrid * kToyTwoStageGrid);
  CHECK(b.box_count() >= 10 * a.box_count());
  CHECK(b.objectness.empty());
  CHECK(b.columns() == kToyCategories + 1);
  for (std::size_t k = 0; k < b.box_count(); ++k) {
    double row = 0.0;
    for (int c = 0; c < b.columns(); ++c) row += b.prob(k, c);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("forward is deterministic and detect agrees with detections_from") {
  const ImagePlane image = make_synthetic_scene(160, 160, 3, 5).image;
  for (auto make : {make_toy_one_stage, make_toy_two_stage}) {
    const auto det = make({});
    const RawScores s1 = det->raw_scores(image);
    const RawScores s2 = det->raw_scores(image);
    CHECK(s1.class_probs == s2.class_probs);
    CHECK(s1.objectness == s2.objectness);
    CHECK(s1.boxes == s2.boxes);
    CHECK(det->detect(image) == det->detections_from(s1));
  }
}

TEST_CASE("nms merges overlapping candidates on one object") {
  const ImagePlane image = scene_with({80, 80}, ToyColor::red);
  ToyDetectorConfig loose;
  loose.nms_threshold = 1.0;
  CHECK(make_toy_two_stage(loose)->detect(image).size() > 1);
  CHECK(make_toy_two_stage()->detect(image).size() == 1);
}

TEST_CASE("native size follows the config and scales to other inputs") {
  ToyDetectorConfig config;
  config.native_height = config.native_width = 64;
  const auto det = make_toy_one_stage(config);
  CHECK(det->preprocess_spec().target_height == 64);
  const ImagePlane image = scene_with({250, 250}, ToyColor::blue, 500);
  CHECK(make_toy_one_stage()->detect(image).size() == 1);
  CHECK(toy_object_size(500) == 78);
}

TEST_CASE("backward has the input shape and vanishes for a zero upstream") {
  const ImagePlane image = scene_with({80, 80}, ToyColor::red, 100);
  for (auto make : {make_toy_one_stage, make_toy_two_stage}) {
    const auto det = make({});
    const auto pass = det->forward(image);
    const ImagePlane zero = det->backward(*pass, ScoreGradient::zeros_like(pass->scores));
    CHECK(zero.same_shape(image));
    for (double v : zero.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("input gradient matches finite differences at a few pixels") {
  const ImagePlane image = scene_with({64, 70}, ToyColor::green, 128);
  for (auto make : {make_toy_one_stage, make_toy_two_stage}) {
    const auto det = make({});
    const LossWeights w{1.0, 0.0};
    const auto pass = det->forward(image);
    const ImagePlane grad = det->backward(*pass, detector_loss(pass->scores, w).gradient);
    const double h = 1e-4;
    for (auto [r, c, ch] : {std::tuple{60, 66, 1}, {64, 75, 0}, {55, 58, 2}, {70, 70, 1}}) {
      ImagePlane plus = image;
      ImagePlane minus = image;
      plus.at(r, c, ch) += h;
      minus.at(r, c, ch) -= h;
      const double fd = (detector_loss(det->raw_scores(plus), w).value -
                         detector_loss(det->raw_scores(minus), w).value) / (2 * h);
      CHECK(grad.at(r, c, ch) == doctest::Approx(fd).epsilon(1e-4).scale(1e-3));
    }
  }
}

TEST_CASE("toy detectors reject non-RGB input") {
  CHECK_THROWS_AS(make_toy_one_stage()->detect(ImagePlane(64, 64, 1)), DimensionError);
}

TEST_CASE("registry builds toys by name and rejects unknown backends") {
  auto& registry = DetectorRegistry::global();
  CHECK(registry.contains("toy_one_stage"));
  CHECK(registry.contains("toy_two_stage"));
  const auto det = registry.create("toy_two_stage", {{"label", "TS"}, {"score_threshold", 0.7}});
  CHECK(det->label() == "TS");
  CHECK(det->style() == DetectorStyle::two_stage);
  CHECK(det->score_threshold() == 0.7);
  CHECK(registry.create("toy_one_stage")->label() == "toy_one_stage");
  CHECK(registry.create("toy_one_stage", nullptr)->label() == "toy_one_stage");
  CHECK_THROWS_AS(registry.create("yolov4"), AdapterError);
  CHECK_THROWS_AS(registry.create("toy_one_stage", {{"native_size", {8, 8}}}), AdapterError);
  CHECK_THROWS_AS(registry.create("toy_one_stage", {{"native_size", "big"}}), AdapterError);
}
