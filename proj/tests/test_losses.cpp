#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "saa/losses.hpp"

using namespace saa;

namespace {

RawScores one_stage(std::vector<double> objectness, std::vector<double> probs, int classes) {
  RawScores s;
  s.style = DetectorStyle::one_stage;
  s.num_classes = classes;
  s.objectness = std::move(objectness);
  s.class_probs = std::move(probs);
  s.boxes.assign(s.objectness.size(), Box{0, 0, 1, 1});
  return s;
}

RawScores two_stage(std::vector<double> probs, int classes) {
  RawScores s;
  s.style = DetectorStyle::two_stage;
  s.num_classes = classes;
  s.class_probs = std::move(probs);
  s.boxes.assign(s.class_probs.size() / (classes + 1), Box{0, 0, 1, 1});
  return s;
}

}  // namespace

TEST_CASE("one-stage loss is the best objectness times class probability") {
  const RawScores s = one_stage({0.9, 0.5}, {0.7, 0.3, 0.2, 0.8}, 2);
  const LossValue loss = loss_yolo(s);
  CHECK(loss.value == doctest::Approx(0.63));
  CHECK(loss.gradient.objectness == std::vector<double>{0.7, 0.0});
  CHECK(loss.gradient.class_probs == std::vector<double>{0.9, 0.0, 0.0, 0.0});
}

TEST_CASE("two-stage terms by hand") {
  // Columns: background, c0, c1.
  const RawScores s = two_stage({0.1, 0.7, 0.2,   //
                                 0.8, 0.1, 0.1,   //
                                 0.5, 0.2, 0.3},  //
                                2);
  CHECK(loss_frcnn_term1(s).value == doctest::Approx(0.7));
  CHECK(loss_frcnn_term2(s).value == doctest::Approx((0.7 + 0.1 + 0.3) / 3.0));
  const LossValue both = loss_frcnn(s, {1.0, 1.0});
  CHECK(both.value == doctest::Approx(0.7 + 1.1 / 3.0));
  CHECK(both.gradient.class_probs[1] == doctest::Approx(1.0 + 1.0 / 3.0));
  CHECK(both.gradient.class_probs[4] == doctest::Approx(1.0 / 3.0));  // first of the tied maxima
  CHECK(both.gradient.class_probs[5] == 0.0);
  CHECK(both.gradient.class_probs[0] == 0.0);  // background never carries gradient
  CHECK_THROWS(loss_frcnn(s, {-1.0, 0.0}));
  CHECK_THROWS(loss_yolo(s));
  CHECK_THROWS(loss_frcnn_term1(one_stage({0.5}, {1.0}, 1)));
}

TEST_CASE("losses of an empty candidate set are zero") {
  CHECK(loss_yolo(one_stage({}, {}, 3)).value == 0.0);
  CHECK(loss_frcnn(two_stage({}, 3), {1.0, 1.0}).value == 0.0);
}

TEST_CASE("ensemble is a plain sum") {
  const double parts[] = {0.63, 0.4};
  CHECK(loss_ensemble(parts) == doctest::Approx(1.03));
  CHECK_THROWS(loss_ensemble(std::span<const double>{}));
}

TEST_CASE("detector_loss dispatches on style") {
  const RawScores a = one_stage({0.5}, {0.6, 0.4}, 2);
  const RawScores b = two_stage({0.2, 0.5, 0.3, 0.9, 0.05, 0.05}, 2);
  CHECK(detector_loss(a, {0.0, 1.0}).value == doctest::Approx(0.3));
  CHECK(detector_loss(b, {1.0, 0.0}).value == doctest::Approx(0.5));
  CHECK(detector_loss(b, {0.0, 1.0}).value == doctest::Approx(0.275));
}

TEST_CASE("losses agree with the brute-force oracles on random scores") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const RawScores one = oracle::random_one_stage(rng, 1 + trial % 17, 1 + trial % 4);
    const RawScores two = oracle::random_two_stage(rng, 1 + trial % 23, 1 + trial % 5);
    CHECK(loss_yolo(one).value == doctest::Approx(oracle::yolo_loss(one)).epsilon(1e-14));
    CHECK(loss_frcnn_term1(two).value == doctest::Approx(oracle::frcnn_term1(two)).epsilon(1e-14));
    CHECK(loss_frcnn_term2(two).value == doctest::Approx(oracle::frcnn_term2(two)).epsilon(1e-12));
    CHECK(loss_frcnn_term1(two).value >= loss_frcnn_term2(two).value);
  }
}

TEST_CASE("loss gradients match finite differences in score space") {
  std::mt19937_64 rng(8);
  const RawScores two = oracle::random_two_stage(rng, 6, 3);
  const LossWeights w{0.7, 1.3};
  const LossValue base = loss_frcnn(two, w);
  const double h = 1e-7;
  for (std::size_t i = 0; i < two.class_probs.size(); ++i) {
    RawScores plus = two;
    RawScores minus = two;
    plus.class_probs[i] += h;
    minus.class_probs[i] -= h;
    const double fd = (loss_frcnn(plus, w).value - loss_frcnn(minus, w).value) / (2 * h);
    CHECK(base.gradient.class_probs[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}
