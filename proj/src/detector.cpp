#include "saa/detector.hpp"

namespace saa {

double RawScores::confidence(std::size_t box, int category) const {
  const double p = foreground_prob(box, category);
  return style == DetectorStyle::one_stage ? objectness[box] * p : p;
}

ScoreGradient ScoreGradient::zeros_like(const RawScores& scores) {
  ScoreGradient grad;
  grad.objectness.assign(scores.objectness.size(), 0.0);
  grad.class_probs.assign(scores.class_probs.size(), 0.0);
  return grad;
}

DetectorAdapter::DetectorAdapter(AdapterInfo info) : info_(std::move(info)) {
  info_.preprocess.validate();
  if (info_.label.empty()) info_.label = info_.name;
}

RawScores DetectorAdapter::raw_scores(const ImagePlane& image) const {
  return forward(image)->scores;
}

Detection candidate_detection(const RawScores& scores, std::size_t box) {
  Detection det;
  det.box = scores.boxes[box];
  det.score = -1.0;
  for (int c = 0; c < scores.num_classes; ++c) {
    const double conf = scores.confidence(box, c);
    if (conf > det.score) {
      det.score = conf;
      det.category = c;
    }
  }
  return det;
}

std::vector<Detection> DetectorAdapter::detections_from(const RawScores& scores) const {
  std::vector<Detection> candidates;
  for (std::size_t b = 0; b < scores.box_count(); ++b) {
    Detection det = candidate_detection(scores, b);
    if (det.score >= info_.score_threshold) candidates.push_back(det);
  }
  return nms(candidates, info_.nms_threshold);
}

std::vector<Detection> DetectorAdapter::detect(const ImagePlane& image) const {
  return detections_from(raw_scores(image));
}

}  // namespace saa
