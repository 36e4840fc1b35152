#pragma once

#include <span>

#include "saa/detector.hpp"

namespace saa {

/// Weights of the two-stage loss: alpha1 on the single strongest box,
/// alpha2 on the mean of per-box maxima.
struct LossWeights {
  double alpha1 = 1.0;
  double alpha2 = 0.0;

  bool operator==(const LossWeights&) const = default;
};

/// Scalar loss with its gradient with respect to the scores it was computed from.
struct LossValue {
  double value = 0.0;
  ScoreGradient gradient;
};

/// max over boxes and categories of objectness * P(c|b). At ties the
/// gradient goes to the first maximal entry in (box, category) order.
LossValue loss_yolo(const RawScores& scores);

/// max over boxes and foreground categories of P(c|b).
LossValue loss_frcnn_term1(const RawScores& scores);

/// Mean over boxes of max over foreground categories of P(c|b).
LossValue loss_frcnn_term2(const RawScores& scores);

/// alpha1 * term1 + alpha2 * term2. Throws std::invalid_argument on negative weights.
LossValue loss_frcnn(const RawScores& scores, LossWeights weights);

/// Unweighted sum. Throws std::invalid_argument on an empty list.
double loss_ensemble(std::span<const double> per_detector);

/// The loss an attack minimizes for one detector: loss_yolo for one-stage
/// scores, loss_frcnn with the given weights for two-stage scores.
LossValue detector_loss(const RawScores& scores, LossWeights weights);

}  // namespace saa
