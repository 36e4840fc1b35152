#include "saa/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

namespace saa {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FileHandle = std::unique_ptr<std::FILE, FileCloser>;

FileHandle open_file(const std::filesystem::path& path, const char* mode) {
  FileHandle file(std::fopen(path.c_str(), mode));
  if (!file) throw ImageIoError("cannot open " + path.string());
  return file;
}

struct RawPng {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> bytes;
};

RawPng decode(const std::filesystem::path& path, bool want_gray) {
  FileHandle file = open_file(path, "rb");
  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw ImageIoError(path.string() + " is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ImageIoError("libpng read struct allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw ImageIoError("libpng info struct allocation failed");
  }
  RawPng raw;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageIoError("corrupt PNG: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  const bool gray_source = (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA);
  if (want_gray && !gray_source) {
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  } else if (!want_gray && gray_source) {
    png_set_gray_to_rgb(png);
  }
  png_read_update_info(png, info);

  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  raw.bytes.resize(stride * raw.height);
  rows.resize(raw.height);
  for (int r = 0; r < raw.height; ++r) rows[r] = raw.bytes.data() + stride * r;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return raw;
}

void encode(const std::filesystem::path& path, int height, int width, int channels,
            const std::vector<std::uint8_t>& bytes) {
  FileHandle file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ImageIoError("libpng write struct allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw ImageIoError("libpng info struct allocation failed");
  }
  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ImageIoError("failed to encode " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int r = 0; r < height; ++r) {
    rows[r] = const_cast<png_bytep>(bytes.data() + stride * r);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

ImagePlane read_png(const std::filesystem::path& path) {
  const RawPng raw = decode(path, false);
  if (raw.channels != 3) throw ImageIoError("unsupported channel layout in " + path.string());
  ImagePlane image(raw.height, raw.width, 3);
  auto data = image.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = from_byte(raw.bytes[i]);
  return image;
}

void write_png(const std::filesystem::path& path, const ImagePlane& image) {
  if (image.channels() != 3 && image.channels() != 1) {
    throw ImageIoError("PNG output needs 1 or 3 channels");
  }
  std::vector<std::uint8_t> bytes(image.size());
  const auto data = image.data();
  for (std::size_t i = 0; i < data.size(); ++i) bytes[i] = to_byte(data[i]);
  encode(path, image.height(), image.width(), image.channels(), bytes);
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  std::vector<std::uint8_t> bytes(mask.data().size());
  const auto data = mask.data();
  for (std::size_t i = 0; i < data.size(); ++i) bytes[i] = data[i] ? 255 : 0;
  encode(path, mask.height(), mask.width(), 1, bytes);
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
  const RawPng raw = decode(path, true);
  if (raw.channels != 1) throw ImageIoError("mask PNG must be single-channel: " + path.string());
  BinaryMask mask(raw.height, raw.width);
  for (int r = 0; r < raw.height; ++r) {
    for (int c = 0; c < raw.width; ++c) {
      const std::uint8_t b = raw.bytes[static_cast<std::size_t>(r) * raw.width + c];
      if (b != 0 && b != 255) throw ImageIoError("mask PNG holds values other than 0/255");
      mask.set(r, c, b == 255);
    }
  }
  return mask;
}

}  // namespace saa
