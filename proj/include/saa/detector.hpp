#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "saa/detection.hpp"
#include "saa/imaging.hpp"

namespace saa {

/// A detector backend could not be constructed or run. Kept distinct from
/// DimensionError so callers can tell plumbing failures from bad inputs.
class AdapterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DetectorStyle { one_stage, two_stage };

/// Pre-NMS candidate scores.
///
/// One-stage detectors fill `objectness` and give class_probs rows over the
/// foreground categories only. Two-stage detectors leave `objectness` empty
/// and give class_probs rows over {background, categories...}, background in
/// column 0.
struct RawScores {
  DetectorStyle style = DetectorStyle::one_stage;
  int num_classes = 0;
  std::vector<Box> boxes;
  std::vector<double> objectness;
  std::vector<double> class_probs;

  std::size_t box_count() const { return boxes.size(); }
  int columns() const { return style == DetectorStyle::two_stage ? num_classes + 1 : num_classes; }
  double prob(std::size_t box, int column) const {
    return class_probs[box * columns() + column];
  }
  /// P(c|b) for foreground category c, whatever the style.
  double foreground_prob(std::size_t box, int category) const {
    return prob(box, style == DetectorStyle::two_stage ? category + 1 : category);
  }
  /// conf(c,b) = objectness(b) * P(c|b) for one-stage scores, P(c|b) otherwise.
  double confidence(std::size_t box, int category) const;
};

/// Gradient of a scalar with respect to every entry of a RawScores.
struct ScoreGradient {
  std::vector<double> objectness;
  std::vector<double> class_probs;

  static ScoreGradient zeros_like(const RawScores& scores);
};

/// Scores plus whatever intermediates the adapter needs for its backward pass.
class ForwardPass {
 public:
  virtual ~ForwardPass() = default;
  RawScores scores;
  int input_height = 0;
  int input_width = 0;
};

struct AdapterInfo {
  std::string name;
  std::string label;  // display name used in reports
  DetectorStyle style = DetectorStyle::one_stage;
  PreprocessSpec preprocess;
  double score_threshold = 0.5;
  double nms_threshold = 0.5;
};

/// Uniform contract over detectors. Implementations are immutable after
/// construction, so one adapter can serve concurrent attacks.
class DetectorAdapter {
 public:
  explicit DetectorAdapter(AdapterInfo info);
  virtual ~DetectorAdapter() = default;

  const AdapterInfo& info() const { return info_; }
  const std::string& name() const { return info_.name; }
  const std::string& label() const { return info_.label; }
  DetectorStyle style() const { return info_.style; }
  const PreprocessSpec& preprocess_spec() const { return info_.preprocess; }
  double score_threshold() const { return info_.score_threshold; }
  double nms_threshold() const { return info_.nms_threshold; }

  /// Runs preprocess and the network on an input-space image.
  virtual std::unique_ptr<ForwardPass> forward(const ImagePlane& image) const = 0;

  /// Gradient of a scalar loss with respect to the input-space image, given
  /// its gradient with respect to pass.scores. Includes the preprocess.
  virtual ImagePlane backward(const ForwardPass& pass, const ScoreGradient& upstream) const = 0;

  RawScores raw_scores(const ImagePlane& image) const;

  /// NMS(threshold-filter(scores)).
  std::vector<Detection> detections_from(const RawScores& scores) const;
  std::vector<Detection> detect(const ImagePlane& image) const;

 private:
  AdapterInfo info_;
};

/// Per-candidate score used for thresholding: max_c conf(c,b), with argmax.
Detection candidate_detection(const RawScores& scores, std::size_t box);

}  // namespace saa
