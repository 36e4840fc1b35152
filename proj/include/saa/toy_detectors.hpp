#pragma once

#include <memory>
#include <string>

#include "saa/detector.hpp"

namespace saa {

/// Desk-scale stand-ins for a one-stage and a two-stage detector.
///
/// Both share a first layer of 3x3 "texture units" computed on the
/// preprocessed image: each unit responds with tanh(g * (chroma - lambda *
/// variance)), so flat saturated color drives it to +1, flat gray leaves it
/// at 0 and any color discontinuity inside its support pushes it toward -1.
/// Candidate boxes pool unit responses over tapered windows; box geometry is
/// regressed from the centroid of strongly positive units and is not differentiated.
///
/// The one-stage variant scores an 8x8 grid of cells with a sigmoid
/// objectness and a softmax over the categories. The two-stage variant
/// scores a 26x26 grid of proposals (676, more than ten times the one-stage
/// count) with a softmax over {background, categories}. All weights are
/// compile-time constants.
struct ToyDetectorConfig {
  std::string label;
  int native_height = 128;
  int native_width = 128;
  double score_threshold = 0.5;
  double nms_threshold = 0.5;
};

inline constexpr int kToyCategories = 3;
inline constexpr int kToyOneStageGrid = 8;
inline constexpr int kToyTwoStageGrid = 26;
/// Side of the square objects the toy detectors are tuned for, in native pixels.
inline constexpr double kToyObjectNative = 20.0;

std::unique_ptr<DetectorAdapter> make_toy_one_stage(ToyDetectorConfig config = {});
std::unique_ptr<DetectorAdapter> make_toy_two_stage(ToyDetectorConfig config = {});

/// Object side in input pixels for an image of `input_dim` seen at `native_dim`.
int toy_object_size(int input_dim, int native_dim = 128);

}  // namespace saa
