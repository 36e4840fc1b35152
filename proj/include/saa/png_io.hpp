#pragma once

#include <filesystem>
#include <stdexcept>

#include "saa/imaging.hpp"

namespace saa {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decodes any 8/16-bit PNG to 3-channel RGB; byte b maps to b/255 exactly.
ImagePlane read_png(const std::filesystem::path& path);

/// Encodes an RGB (or single-channel) plane as 8-bit PNG using round(v*255).
void write_png(const std::filesystem::path& path, const ImagePlane& image);

/// Masks are stored as single-channel 8-bit PNG with values {0,255}.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
BinaryMask read_mask_png(const std::filesystem::path& path);

}  // namespace saa
