#include "saa/losses.hpp"

#include <numeric>
#include <stdexcept>

namespace saa {

namespace {

void require_style(const RawScores& scores, DetectorStyle style, const char* what) {
  if (scores.style != style) throw std::invalid_argument(std::string(what) + ": wrong score style");
}

struct ArgMax {
  double value = 0.0;
  int category = -1;
};

ArgMax best_foreground(const RawScores& scores, std::size_t box) {
  ArgMax best;
  for (int c = 0; c < scores.num_classes; ++c) {
    const double p = scores.foreground_prob(box, c);
    if (best.category < 0 || p > best.value) best = {p, c};
  }
  return best;
}

std::size_t column_index(const RawScores& scores, std::size_t box, int category) {
  const int offset = scores.style == DetectorStyle::two_stage ? 1 : 0;
  return box * scores.columns() + category + offset;
}

}  // namespace

LossValue loss_yolo(const RawScores& scores) {
  require_style(scores, DetectorStyle::one_stage, "loss_yolo");
  LossValue out{0.0, ScoreGradient::zeros_like(scores)};
  if (scores.box_count() == 0) return out;
  std::size_t best_box = 0;
  int best_category = -1;
  for (std::size_t b = 0; b < scores.box_count(); ++b) {
    for (int c = 0; c < scores.num_classes; ++c) {
      const double conf = scores.confidence(b, c);
      if (best_category < 0 || conf > out.value) {
        out.value = conf;
        best_box = b;
        best_category = c;
      }
    }
  }
  out.gradient.objectness[best_box] = scores.foreground_prob(best_box, best_category);
  out.gradient.class_probs[column_index(scores, best_box, best_category)] =
      scores.objectness[best_box];
  return out;
}

LossValue loss_frcnn_term1(const RawScores& scores) {
  require_style(scores, DetectorStyle::two_stage, "loss_frcnn_term1");
  LossValue out{0.0, ScoreGradient::zeros_like(scores)};
  if (scores.box_count() == 0) return out;
  std::size_t best_box = 0;
  ArgMax best;
  for (std::size_t b = 0; b < scores.box_count(); ++b) {
    const ArgMax m = best_foreground(scores, b);
    if (best.category < 0 || m.value > best.value) {
      best = m;
      best_box = b;
    }
  }
  out.value = best.value;
  out.gradient.class_probs[column_index(scores, best_box, best.category)] = 1.0;
  return out;
}

LossValue loss_frcnn_term2(const RawScores& scores) {
  require_style(scores, DetectorStyle::two_stage, "loss_frcnn_term2");
  LossValue out{0.0, ScoreGradient::zeros_like(scores)};
  const std::size_t n = scores.box_count();
  if (n == 0) return out;
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t b = 0; b < n; ++b) {
    const ArgMax m = best_foreground(scores, b);
    out.value += m.value;
    out.gradient.class_probs[column_index(scores, b, m.category)] = inv;
  }
  out.value *= inv;
  return out;
}

LossValue loss_frcnn(const RawScores& scores, LossWeights weights) {
  require_style(scores, DetectorStyle::two_stage, "loss_frcnn");
  if (weights.alpha1 < 0.0 || weights.alpha2 < 0.0) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
  LossValue out{0.0, ScoreGradient::zeros_like(scores)};
  auto accumulate = [&](const LossValue& term, double alpha) {
    out.value += alpha * term.value;
    for (std::size_t i = 0; i < out.gradient.class_probs.size(); ++i) {
      out.gradient.class_probs[i] += alpha * term.gradient.class_probs[i];
    }
  };
  if (weights.alpha1 != 0.0) accumulate(loss_frcnn_term1(scores), weights.alpha1);
  if (weights.alpha2 != 0.0) accumulate(loss_frcnn_term2(scores), weights.alpha2);
  return out;
}

double loss_ensemble(std::span<const double> per_detector) {
  if (per_detector.empty()) throw std::invalid_argument("ensemble needs at least one detector loss");
  return std::accumulate(per_detector.begin(), per_detector.end(), 0.0);
}

LossValue detector_loss(const RawScores& scores, LossWeights weights) {
  return scores.style == DetectorStyle::one_stage ? loss_yolo(scores) : loss_frcnn(scores, weights);
}

}  // namespace saa
