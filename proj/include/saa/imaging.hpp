#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace saa {

/// Raised when two rasters that must agree in shape do not.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// H x W x C raster of intensities, stored row-major with interleaved
/// channels (the same order as an 8-bit RGB PNG scanline).
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int height, int width, int channels = 3, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int row, int col, int ch) { return data_[index(row, col, ch)]; }
  double at(int row, int col, int ch) const { return data_[index(row, col, ch)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const ImagePlane& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  bool operator==(const ImagePlane& other) const = default;

 private:
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Adversarial content P. Same layout as the image it is composited onto.
using Patch = ImagePlane;

/// H x W field of {0,1}; one entry per spatial pixel, broadcast across channels.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }

  std::uint8_t at(int row, int col) const { return data_[index(row, col)]; }
  void set(int row, int col, bool on) { data_[index(row, col)] = on ? 1 : 0; }

  std::span<const std::uint8_t> data() const { return data_; }
  long popcount() const;

  bool operator==(const BinaryMask& other) const = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

enum class Interpolation { bilinear };

/// Detector-side input transform: resize, then (value - mean) / scale per channel.
struct PreprocessSpec {
  int target_height = 0;
  int target_width = 0;
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> scale{1.0, 1.0, 1.0};
  Interpolation interpolation = Interpolation::bilinear;

  /// Throws std::invalid_argument on non-positive dims or scales.
  void validate() const;
};

/// Img = I * (1 - M) + P * M, with M broadcast over channels.
ImagePlane apply_patch(const ImagePlane& image, const Patch& patch, const BinaryMask& mask);

/// Vector-Jacobian product of apply_patch with respect to the patch: the
/// upstream gradient on the mask support and exactly zero elsewhere.
Patch apply_patch_backward(const ImagePlane& grad_output, const BinaryMask& mask);

/// Bilinear resize with half-pixel centers, edge-clamped.
ImagePlane resize_bilinear(const ImagePlane& image, int target_height, int target_width);

/// Adjoint of resize_bilinear: scatters a target-sized gradient back onto
/// a source of the given dims.
ImagePlane resize_bilinear_backward(const ImagePlane& grad_output, int source_height,
                                    int source_width);

ImagePlane preprocess(const ImagePlane& image, const PreprocessSpec& spec);
ImagePlane preprocess_backward(const ImagePlane& grad_output, int source_height,
                               int source_width, const PreprocessSpec& spec);

/// Nearest point of the 8-bit lattice {k/255}.
double quantize_value(double v);
Patch quantize_patch(const Patch& patch);
bool on_quantization_lattice(double v);

std::uint8_t to_byte(double v);
inline double from_byte(std::uint8_t b) { return static_cast<double>(b) / 255.0; }

/// Returns the first element outside [0,1] as an error message, or empty.
std::string check_unit_range(const ImagePlane& image);

}  // namespace saa
