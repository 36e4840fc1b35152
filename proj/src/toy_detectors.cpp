#include "saa/toy_detectors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace saa {

namespace {

// Frozen weights. Lengths are in native (preprocessed) pixels.
constexpr double kUnitGain = 0.3;
constexpr double kVarianceWeight = 2.0;
constexpr double kTaper = 0.3;  // window weight falls to 1 - kTaper at the rim
constexpr double kNormMean = 0.5;
constexpr double kNormScale = 0.25;
constexpr double kAnchorHalf = kToyObjectNative / 2.0;
constexpr double kCentroidGate = 0.5;  // units below this do not place boxes

constexpr int kOneStageWindowHalf = 18;
constexpr double kOneStageBias = -4.0;
constexpr double kOneStageCoverageGain = 22.5;
constexpr double kOneStageClassGain = 4.0;
constexpr std::array<double, kToyCategories> kOneStageClassBias{0.2, 0.0, -0.2};

constexpr int kTwoStageWindowHalf = 14;
constexpr double kTwoStageCoverageGain = 16.0;
constexpr double kTwoStageClassGain = 0.5;
constexpr std::array<double, kToyCategories> kTwoStageClassBias{-5.0, -5.3, -5.6};

// Category c reads channel c against the mean of the other two.
double color_mix(int category, int channel) { return category == channel ? 1.0 : -0.5; }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void softmax_inplace(std::span<double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : z) v /= total;
}

// dL/dz from dL/dp for p = softmax(z).
void softmax_backward(std::span<const double> p, std::span<const double> dp, std::span<double> dz) {
  double dot = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) dot += p[k] * dp[k];
  for (std::size_t k = 0; k < p.size(); ++k) dz[k] = p[k] * (dp[k] - dot);
}

// First layer: one unit per interior native pixel, reading its 3x3 support.
struct UnitField {
  int rows = 0;
  int cols = 0;
  std::vector<double> response;  // tanh output
  std::vector<double> color;     // 3 per unit, support mean per channel

  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * cols + c; }
};

UnitField compute_units(const ImagePlane& x) {
  UnitField field;
  field.rows = x.height() - 2;
  field.cols = x.width() - 2;
  if (field.rows < 1 || field.cols < 1) throw DimensionError("toy detector input too small");
  field.response.resize(static_cast<std::size_t>(field.rows) * field.cols);
  field.color.resize(field.response.size() * 3);

  // Per-pixel chroma: squared deviation of channels from their mean.
  ImagePlane chroma(x.height(), x.width(), 1);
  for (int r = 0; r < x.height(); ++r) {
    for (int c = 0; c < x.width(); ++c) {
      const double mean = (x.at(r, c, 0) + x.at(r, c, 1) + x.at(r, c, 2)) / 3.0;
      double s = 0.0;
      for (int ch = 0; ch < 3; ++ch) s += (x.at(r, c, ch) - mean) * (x.at(r, c, ch) - mean);
      chroma.at(r, c, 0) = s;
    }
  }

  for (int i = 0; i < field.rows; ++i) {
    for (int j = 0; j < field.cols; ++j) {
      double m = 0.0;
      std::array<double, 3> sum{};
      std::array<double, 3> sum_sq{};
      for (int dr = 0; dr < 3; ++dr) {
        for (int dc = 0; dc < 3; ++dc) {
          m += chroma.at(i + dr, j + dc, 0);
          for (int ch = 0; ch < 3; ++ch) {
            const double v = x.at(i + dr, j + dc, ch);
            sum[ch] += v;
            sum_sq[ch] += v * v;
          }
        }
      }
      m /= 9.0;
      double variance = 0.0;
      for (int ch = 0; ch < 3; ++ch) {
        const double mu = sum[ch] / 9.0;
        variance += sum_sq[ch] / 9.0 - mu * mu;
        field.color[field.index(i, j) * 3 + ch] = mu;
      }
      field.response[field.index(i, j)] = std::tanh(kUnitGain * (m - kVarianceWeight * variance));
    }
  }
  return field;
}

void units_backward(const ImagePlane& x, const UnitField& field, std::span<const double> d_response,
                    std::span<const double> d_color, ImagePlane& d_x) {
  for (int i = 0; i < field.rows; ++i) {
    for (int j = 0; j < field.cols; ++j) {
      const std::size_t u = field.index(i, j);
      const double h = field.response[u];
      const double da = d_response[u] * (1.0 - h * h) * kUnitGain;
      const double* dmu = &d_color[u * 3];
      if (da == 0.0 && dmu[0] == 0.0 && dmu[1] == 0.0 && dmu[2] == 0.0) continue;
      const double* mu = &field.color[u * 3];
      for (int dr = 0; dr < 3; ++dr) {
        for (int dc = 0; dc < 3; ++dc) {
          const int r = i + dr;
          const int c = j + dc;
          const double mean = (x.at(r, c, 0) + x.at(r, c, 1) + x.at(r, c, 2)) / 3.0;
          for (int ch = 0; ch < 3; ++ch) {
            const double v = x.at(r, c, ch);
            const double d_chroma = 2.0 / 9.0 * (v - mean);
            const double d_variance = 2.0 / 9.0 * (v - mu[ch]);
            d_x.at(r, c, ch) += da * (d_chroma - kVarianceWeight * d_variance) + dmu[ch] / 9.0;
          }
        }
      }
    }
  }
}

// Tapered pooling window centered on a native pixel.
struct Window {
  int center_row = 0;
  int center_col = 0;
  int half = 0;
};

double taper(int offset, int half) {
  return 1.0 - kTaper * std::abs(offset) / static_cast<double>(half);
}

// Weight sum over a full (unclipped) window; clipped windows keep this
// normalizer so a flat gray image pools to exactly zero everywhere.
double window_norm(int half) {
  double axis = 0.0;
  for (int d = -half + 1; d < half; ++d) axis += taper(d, half);
  return axis * axis;
}

struct WindowEvidence {
  double coverage = 0.0;
  std::array<double, 3> color{};
  double centroid_row = 0.0;
  double centroid_col = 0.0;
};

// Unit (i,j) sits on native pixel (i+1, j+1).
template <typename Fn>
void for_each_unit(const UnitField& field, const Window& w, Fn&& fn) {
  const int i0 = std::max(0, w.center_row - w.half + 1 - 1);
  const int i1 = std::min(field.rows - 1, w.center_row + w.half - 1 - 1);
  const int j0 = std::max(0, w.center_col - w.half + 1 - 1);
  const int j1 = std::min(field.cols - 1, w.center_col + w.half - 1 - 1);
  for (int i = i0; i <= i1; ++i) {
    const double wr = taper(i + 1 - w.center_row, w.half);
    for (int j = j0; j <= j1; ++j) {
      fn(field.index(i, j), i, j, wr * taper(j + 1 - w.center_col, w.half));
    }
  }
}

WindowEvidence pool(const UnitField& field, const Window& w) {
  WindowEvidence ev;
  const double norm = window_norm(w.half);
  double mass = 0.0;
  double row_moment = 0.0;
  double col_moment = 0.0;
  for_each_unit(field, w, [&](std::size_t u, int i, int j, double weight) {
    const double h = field.response[u];
    ev.coverage += weight * h;
    for (int ch = 0; ch < 3; ++ch) ev.color[ch] += weight * h * field.color[u * 3 + ch];
    if (h > kCentroidGate) {
      mass += h;
      row_moment += h * (i + 1);
      col_moment += h * (j + 1);
    }
  });
  ev.coverage /= norm;
  for (double& c : ev.color) c /= norm;
  if (mass > 1e-9) {
    ev.centroid_row = row_moment / mass;
    ev.centroid_col = col_moment / mass;
  } else {
    ev.centroid_row = w.center_row;
    ev.centroid_col = w.center_col;
  }
  return ev;
}

void pool_backward(const UnitField& field, const Window& w, double d_coverage,
                   const std::array<double, 3>& d_color, std::vector<double>& d_response,
                   std::vector<double>& d_unit_color) {
  const double norm = window_norm(w.half);
  for_each_unit(field, w, [&](std::size_t u, int, int, double weight) {
    const double scale = weight / norm;
    const double h = field.response[u];
    double g = d_coverage;
    for (int ch = 0; ch < 3; ++ch) {
      g += d_color[ch] * field.color[u * 3 + ch];
      d_unit_color[u * 3 + ch] += d_color[ch] * scale * h;
    }
    d_response[u] += g * scale;
  });
}

// Category logits contributed by pooled color evidence.
std::array<double, kToyCategories> color_logits(const std::array<double, 3>& color, double gain) {
  std::array<double, kToyCategories> z{};
  for (int c = 0; c < kToyCategories; ++c) {
    for (int ch = 0; ch < 3; ++ch) z[c] += gain * color_mix(c, ch) * color[ch];
  }
  return z;
}

std::array<double, 3> color_logits_backward(std::span<const double> dz, double gain) {
  std::array<double, 3> d_color{};
  for (int c = 0; c < kToyCategories; ++c) {
    for (int ch = 0; ch < 3; ++ch) d_color[ch] += gain * color_mix(c, ch) * dz[c];
  }
  return d_color;
}

class ToyPass : public ForwardPass {
 public:
  ImagePlane native;
  UnitField units;
};

class ToyDetector : public DetectorAdapter {
 public:
  ToyDetector(AdapterInfo info, std::vector<Window> windows)
      : DetectorAdapter(std::move(info)), windows_(std::move(windows)) {}

  std::unique_ptr<ForwardPass> forward(const ImagePlane& image) const override {
    if (image.channels() != 3) throw DimensionError("toy detectors expect RGB input");
    auto pass = std::make_unique<ToyPass>();
    pass->input_height = image.height();
    pass->input_width = image.width();
    pass->native = preprocess(image, preprocess_spec());
    pass->units = compute_units(pass->native);

    RawScores& scores = pass->scores;
    scores.style = style();
    scores.num_classes = kToyCategories;
    scores.boxes.reserve(windows_.size());
    const double row_scale = static_cast<double>(image.height()) / pass->native.height();
    const double col_scale = static_cast<double>(image.width()) / pass->native.width();
    for (const Window& w : windows_) {
      const WindowEvidence ev = pool(pass->units, w);
      score_window(ev, scores);
      const double cr = (ev.centroid_row + 0.5) * row_scale - 0.5;
      const double cc = (ev.centroid_col + 0.5) * col_scale - 0.5;
      scores.boxes.push_back({cr - kAnchorHalf * row_scale, cc - kAnchorHalf * col_scale,
                              cr + kAnchorHalf * row_scale, cc + kAnchorHalf * col_scale});
    }
    return pass;
  }

  ImagePlane backward(const ForwardPass& base, const ScoreGradient& upstream) const override {
    const auto& pass = dynamic_cast<const ToyPass&>(base);
    const UnitField& units = pass.units;
    std::vector<double> d_response(units.response.size(), 0.0);
    std::vector<double> d_color(units.color.size(), 0.0);
    for (std::size_t b = 0; b < windows_.size(); ++b) {
      double d_coverage = 0.0;
      std::array<double, kToyCategories> dz{};
      if (!window_backward(pass.scores, upstream, b, d_coverage, dz)) continue;
      const auto d_pooled_color = color_logits_backward(dz, class_gain());
      pool_backward(units, windows_[b], d_coverage, d_pooled_color, d_response, d_color);
    }
    ImagePlane d_native(pass.native.height(), pass.native.width(), 3, 0.0);
    units_backward(pass.native, units, d_response, d_color, d_native);
    return preprocess_backward(d_native, pass.input_height, pass.input_width, preprocess_spec());
  }

 protected:
  virtual void score_window(const WindowEvidence& ev, RawScores& scores) const = 0;
  // Fills dL/dcoverage and dL/d(category logits) for box b; false if all zero.
  virtual bool window_backward(const RawScores& scores, const ScoreGradient& upstream,
                               std::size_t b, double& d_coverage,
                               std::array<double, kToyCategories>& dz) const = 0;
  virtual double class_gain() const = 0;

 private:
  std::vector<Window> windows_;
};

class ToyOneStage final : public ToyDetector {
 public:
  using ToyDetector::ToyDetector;

 protected:
  void score_window(const WindowEvidence& ev, RawScores& scores) const override {
    scores.objectness.push_back(sigmoid(kOneStageBias + kOneStageCoverageGain * ev.coverage));
    auto z = color_logits(ev.color, kOneStageClassGain);
    for (int c = 0; c < kToyCategories; ++c) z[c] += kOneStageClassBias[c];
    softmax_inplace(z);
    scores.class_probs.insert(scores.class_probs.end(), z.begin(), z.end());
  }

  bool window_backward(const RawScores& scores, const ScoreGradient& upstream, std::size_t b,
                       double& d_coverage, std::array<double, kToyCategories>& dz) const override {
    const double d_obj = upstream.objectness[b];
    const std::span<const double> p(&scores.class_probs[b * kToyCategories], kToyCategories);
    const std::span<const double> dp(&upstream.class_probs[b * kToyCategories], kToyCategories);
    const bool any_dp = std::any_of(dp.begin(), dp.end(), [](double v) { return v != 0.0; });
    if (d_obj == 0.0 && !any_dp) return false;
    const double obj = scores.objectness[b];
    d_coverage = d_obj * obj * (1.0 - obj) * kOneStageCoverageGain;
    softmax_backward(p, dp, dz);
    return true;
  }

  double class_gain() const override { return kOneStageClassGain; }
};

class ToyTwoStage final : public ToyDetector {
 public:
  using ToyDetector::ToyDetector;

 protected:
  void score_window(const WindowEvidence& ev, RawScores& scores) const override {
    const auto color = color_logits(ev.color, kTwoStageClassGain);
    std::array<double, kToyCategories + 1> z{};
    z[0] = 0.0;  // background
    for (int c = 0; c < kToyCategories; ++c) {
      z[c + 1] = kTwoStageCoverageGain * ev.coverage + color[c] + kTwoStageClassBias[c];
    }
    softmax_inplace(z);
    scores.class_probs.insert(scores.class_probs.end(), z.begin(), z.end());
  }

  bool window_backward(const RawScores& scores, const ScoreGradient& upstream, std::size_t b,
                       double& d_coverage, std::array<double, kToyCategories>& dz) const override {
    constexpr int kColumns = kToyCategories + 1;
    const std::span<const double> p(&scores.class_probs[b * kColumns], kColumns);
    const std::span<const double> dp(&upstream.class_probs[b * kColumns], kColumns);
    if (std::all_of(dp.begin(), dp.end(), [](double v) { return v == 0.0; })) return false;
    std::array<double, kColumns> dz_all{};
    softmax_backward(p, dp, dz_all);
    d_coverage = 0.0;
    for (int c = 0; c < kToyCategories; ++c) {
      dz[c] = dz_all[c + 1];
      d_coverage += kTwoStageCoverageGain * dz_all[c + 1];
    }
    return true;
  }

  double class_gain() const override { return kTwoStageClassGain; }
};

AdapterInfo toy_info(const ToyDetectorConfig& config, std::string name, DetectorStyle style) {
  if (config.native_height < 16 || config.native_width < 16) {
    throw AdapterError("toy detector native size must be at least 16x16");
  }
  AdapterInfo info;
  info.name = std::move(name);
  info.label = config.label.empty() ? info.name : config.label;
  info.style = style;
  info.preprocess.target_height = config.native_height;
  info.preprocess.target_width = config.native_width;
  info.preprocess.mean = {kNormMean, kNormMean, kNormMean};
  info.preprocess.scale = {kNormScale, kNormScale, kNormScale};
  info.score_threshold = config.score_threshold;
  info.nms_threshold = config.nms_threshold;
  return info;
}

// Evenly spread integer centers across [first, last].
std::vector<int> spread(int count, int first, int last) {
  std::vector<int> centers(count);
  for (int k = 0; k < count; ++k) {
    centers[k] = count == 1 ? (first + last) / 2
                            : static_cast<int>(std::lround(first + k * double(last - first) / (count - 1)));
  }
  return centers;
}

}  // namespace

std::unique_ptr<DetectorAdapter> make_toy_one_stage(ToyDetectorConfig config) {
  AdapterInfo info = toy_info(config, "toy_one_stage", DetectorStyle::one_stage);
  std::vector<Window> windows;
  for (int gy = 0; gy < kToyOneStageGrid; ++gy) {
    for (int gx = 0; gx < kToyOneStageGrid; ++gx) {
      const int cy = (2 * gy + 1) * config.native_height / (2 * kToyOneStageGrid);
      const int cx = (2 * gx + 1) * config.native_width / (2 * kToyOneStageGrid);
      windows.push_back({cy, cx, kOneStageWindowHalf});
    }
  }
  return std::make_unique<ToyOneStage>(std::move(info), std::move(windows));
}

std::unique_ptr<DetectorAdapter> make_toy_two_stage(ToyDetectorConfig config) {
  AdapterInfo info = toy_info(config, "toy_two_stage", DetectorStyle::two_stage);
  const auto rows = spread(kToyTwoStageGrid, 4, config.native_height - 4);
  const auto cols = spread(kToyTwoStageGrid, 4, config.native_width - 4);
  std::vector<Window> windows;
  for (int cy : rows) {
    for (int cx : cols) windows.push_back({cy, cx, kTwoStageWindowHalf});
  }
  return std::make_unique<ToyTwoStage>(std::move(info), std::move(windows));
}

int toy_object_size(int input_dim, int native_dim) {
  return static_cast<int>(std::lround(kToyObjectNative * input_dim / native_dim));
}

}  // namespace saa
