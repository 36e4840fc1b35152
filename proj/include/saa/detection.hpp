#pragma once

#include <span>
#include <vector>

namespace saa {

/// Axis-aligned box in input-image pixel coordinates (pixel centers at
/// integer positions).
struct Box {
  double row_min = 0.0;
  double col_min = 0.0;
  double row_max = 0.0;
  double col_max = 0.0;

  double area() const;
  double center_row() const { return 0.5 * (row_min + row_max); }
  double center_col() const { return 0.5 * (col_min + col_max); }
  bool valid() const { return row_min < row_max && col_min < col_max; }

  bool operator==(const Box&) const = default;
};

struct Detection {
  Box box;
  int category = 0;
  double score = 0.0;

  bool operator==(const Detection&) const = default;
};

double iou(const Box& a, const Box& b);

/// Greedy suppression: repeatedly keep the highest-scoring survivor and drop
/// every remaining box whose IoU with it exceeds the threshold. Equal scores
/// keep input order.
std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold);

}  // namespace saa
