#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mfir/image.hpp"

namespace mfir {

inline constexpr std::size_t kHueBins = 8;
inline constexpr std::size_t kSaturationBins = 3;
inline constexpr std::size_t kValueBins = 3;
inline constexpr std::size_t kColorBins = kHueBins * kSaturationBins * kValueBins;
inline constexpr const char* kHistogramScheme = "hsv-8x3x3";

struct ColorHistogram {
  std::string scheme = kHistogramScheme;
  std::vector<double> bins;  // sums to 1
};

struct Hsv {
  double h = 0.0;  // degrees in [0, 360); 0 for achromatic pixels
  double s = 0.0;
  double v = 0.0;
};

Hsv rgb_to_hsv(const Rgb& px) noexcept;

// Bin index h*9 + s*3 + v for the 8x3x3 quantization.
std::size_t hsv_bin(const Hsv& hsv) noexcept;

// Fraction of pixels per HSV bin. Throws Error{EmptyImage} for zero pixels.
ColorHistogram extract_color_histogram(const RgbImage& image);

}  // namespace mfir
