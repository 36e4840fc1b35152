#include "saa/detection.hpp"

#include <algorithm>
#include <numeric>

namespace saa {

double Box::area() const {
  return std::max(0.0, row_max - row_min) * std::max(0.0, col_max - col_min);
}

double iou(const Box& a, const Box& b) {
  const double rows = std::min(a.row_max, b.row_max) - std::max(a.row_min, b.row_min);
  const double cols = std::min(a.col_max, b.col_max) - std::max(a.col_min, b.col_min);
  if (rows <= 0.0 || cols <= 0.0) return 0.0;
  const double inter = rows * cols;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });

  std::vector<bool> dropped(detections.size(), false);
  std::vector<Detection> kept;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (dropped[order[i]]) continue;
    const Detection& keep = detections[order[i]];
    kept.push_back(keep);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (!dropped[order[j]] && iou(keep.box, detections[order[j]].box) > iou_threshold) {
        dropped[order[j]] = true;
      }
    }
  }
  return kept;
}

}  // namespace saa
