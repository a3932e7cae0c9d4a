#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace mfir {

/*
  Single-channel luminance image, row-major, samples in [0, 1].
*/
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, double fill = 0.0)
      : width(w), height(h), values(w * h, fill) {}

  double& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
  double at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
};

using Rgb = std::array<double, 3>;

/*
  Color image, row-major (r, g, b) triples with channels in [0, 1].
*/
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Rgb> values;

  RgbImage() = default;
  RgbImage(std::size_t w, std::size_t h, Rgb fill = {0.0, 0.0, 0.0})
      : width(w), height(h), values(w * h, fill) {}

  Rgb& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
  const Rgb& at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
};

inline constexpr std::size_t kDefaultAnalysisSide = 128;

// BT.601 luma.
double luminance(const Rgb& px) noexcept;

GrayImage to_grayscale(const RgbImage& image);

// Bilinear resampling with pixel-center alignment; edges clamp.
GrayImage resample_bilinear(const GrayImage& image, std::size_t width, std::size_t height);

// Decodes a PNG or JPEG at native resolution. Throws Error{UnreadableFile}
// when the file is missing or corrupt and Error{UnsupportedFormat} when it is
// neither PNG nor JPEG.
RgbImage load_rgb(const std::filesystem::path& path);

// load_rgb, then luminance, then bilinear resampling to side x side.
GrayImage load_grayscale(const std::filesystem::path& path, std::size_t side);

// Lossless 8-bit PNG. Channels are rounded to the nearest of 256 levels.
void save_png(const RgbImage& image, const std::filesystem::path& path);

bool is_supported_image_file(const std::filesystem::path& path);

}  // namespace mfir
