#include "saa/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace saa {

ImagePlane::ImagePlane(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw DimensionError("image dims must be positive");
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

BinaryMask::BinaryMask(int height, int width) : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw DimensionError("mask dims must be positive");
  }
  data_.assign(static_cast<std::size_t>(height) * width, 0);
}

long BinaryMask::popcount() const {
  return std::count(data_.begin(), data_.end(), std::uint8_t{1});
}

void PreprocessSpec::validate() const {
  if (target_height < 1 || target_width < 1) {
    throw std::invalid_argument("preprocess target dims must be positive");
  }
  for (double s : scale) {
    if (!(s > 0.0)) throw std::invalid_argument("preprocess scale must be positive");
  }
}

namespace {

void require_mask_matches(const ImagePlane& image, const BinaryMask& mask) {
  if (image.height() != mask.height() || image.width() != mask.width()) {
    std::ostringstream msg;
    msg << "mask " << mask.height() << "x" << mask.width() << " does not match image "
        << image.height() << "x" << image.width();
    throw DimensionError(msg.str());
  }
}

// Source sampling positions along one axis: lower index, upper index and
// the weight of the upper sample.
struct AxisTap {
  int lo;
  int hi;
  double frac;
};

std::vector<AxisTap> axis_taps(int source, int target) {
  std::vector<AxisTap> taps(target);
  const double ratio = static_cast<double>(source) / target;
  for (int i = 0; i < target; ++i) {
    double pos = (i + 0.5) * ratio - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(source - 1));
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, source - 1);
    taps[i] = {lo, hi, pos - lo};
  }
  return taps;
}

}  // namespace

ImagePlane apply_patch(const ImagePlane& image, const Patch& patch, const BinaryMask& mask) {
  if (!image.same_shape(patch)) {
    throw DimensionError("patch shape does not match image");
  }
  require_mask_matches(image, mask);
  ImagePlane out = image;
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      if (!mask.at(r, c)) continue;
      for (int ch = 0; ch < image.channels(); ++ch) out.at(r, c, ch) = patch.at(r, c, ch);
    }
  }
  return out;
}

Patch apply_patch_backward(const ImagePlane& grad_output, const BinaryMask& mask) {
  require_mask_matches(grad_output, mask);
  Patch grad(grad_output.height(), grad_output.width(), grad_output.channels(), 0.0);
  for (int r = 0; r < grad.height(); ++r) {
    for (int c = 0; c < grad.width(); ++c) {
      if (!mask.at(r, c)) continue;
      for (int ch = 0; ch < grad.channels(); ++ch) grad.at(r, c, ch) = grad_output.at(r, c, ch);
    }
  }
  return grad;
}

ImagePlane resize_bilinear(const ImagePlane& image, int target_height, int target_width) {
  if (target_height < 1 || target_width < 1) {
    throw std::invalid_argument("resize target dims must be positive");
  }
  if (image.height() == target_height && image.width() == target_width) return image;
  const auto rows = axis_taps(image.height(), target_height);
  const auto cols = axis_taps(image.width(), target_width);
  ImagePlane out(target_height, target_width, image.channels());
  for (int r = 0; r < target_height; ++r) {
    const AxisTap& ty = rows[r];
    for (int c = 0; c < target_width; ++c) {
      const AxisTap& tx = cols[c];
      for (int ch = 0; ch < image.channels(); ++ch) {
        const double top = image.at(ty.lo, tx.lo, ch) +
                           (image.at(ty.lo, tx.hi, ch) - image.at(ty.lo, tx.lo, ch)) * tx.frac;
        const double bottom = image.at(ty.hi, tx.lo, ch) +
                              (image.at(ty.hi, tx.hi, ch) - image.at(ty.hi, tx.lo, ch)) * tx.frac;
        out.at(r, c, ch) = top + (bottom - top) * ty.frac;
      }
    }
  }
  return out;
}

ImagePlane resize_bilinear_backward(const ImagePlane& grad_output, int source_height,
                                    int source_width) {
  if (grad_output.height() == source_height && grad_output.width() == source_width) {
    return grad_output;
  }
  const auto rows = axis_taps(source_height, grad_output.height());
  const auto cols = axis_taps(source_width, grad_output.width());
  ImagePlane grad(source_height, source_width, grad_output.channels(), 0.0);
  for (int r = 0; r < grad_output.height(); ++r) {
    const AxisTap& ty = rows[r];
    for (int c = 0; c < grad_output.width(); ++c) {
      const AxisTap& tx = cols[c];
      for (int ch = 0; ch < grad_output.channels(); ++ch) {
        const double g = grad_output.at(r, c, ch);
        if (g == 0.0) continue;
        grad.at(ty.lo, tx.lo, ch) += g * (1.0 - ty.frac) * (1.0 - tx.frac);
        grad.at(ty.lo, tx.hi, ch) += g * (1.0 - ty.frac) * tx.frac;
        grad.at(ty.hi, tx.lo, ch) += g * ty.frac * (1.0 - tx.frac);
        grad.at(ty.hi, tx.hi, ch) += g * ty.frac * tx.frac;
      }
    }
  }
  return grad;
}

ImagePlane preprocess(const ImagePlane& image, const PreprocessSpec& spec) {
  spec.validate();
  if (image.channels() > 3) throw DimensionError("preprocess supports at most 3 channels");
  ImagePlane out = resize_bilinear(image, spec.target_height, spec.target_width);
  auto data = out.data();
  const int channels = out.channels();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int ch = static_cast<int>(i % channels);
    data[i] = (data[i] - spec.mean[ch]) / spec.scale[ch];
  }
  return out;
}

ImagePlane preprocess_backward(const ImagePlane& grad_output, int source_height,
                               int source_width, const PreprocessSpec& spec) {
  spec.validate();
  if (grad_output.height() != spec.target_height || grad_output.width() != spec.target_width) {
    throw DimensionError("gradient does not match preprocess target dims");
  }
  ImagePlane scaled = grad_output;
  auto data = scaled.data();
  const int channels = scaled.channels();
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] /= spec.scale[static_cast<int>(i % channels)];
  }
  return resize_bilinear_backward(scaled, source_height, source_width);
}

double quantize_value(double v) { return std::round(v * 255.0) / 255.0; }

Patch quantize_patch(const Patch& patch) {
  Patch out = patch;
  for (double& v : out.data()) v = quantize_value(v);
  return out;
}

bool on_quantization_lattice(double v) { return v == quantize_value(v); }

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::string check_unit_range(const ImagePlane& image) {
  const auto data = image.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i] >= 0.0 && data[i] <= 1.0)) {
      std::ostringstream msg;
      msg << "element " << i << " = " << data[i] << " outside [0,1]";
      return msg.str();
    }
  }
  return {};
}

}  // namespace saa
