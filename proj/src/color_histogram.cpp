#include "mfir/color_histogram.hpp"

#include <algorithm>
#include <cmath>

#include "mfir/error.hpp"

namespace mfir {

namespace {

std::size_t quantize(double value, double range, std::size_t bins) noexcept {
  const double scaled = std::floor(value / range * static_cast<double>(bins));
  if (!(scaled > 0.0)) {
    return 0;
  }
  return std::min(static_cast<std::size_t>(scaled), bins - 1);
}

}  // namespace

Hsv rgb_to_hsv(const Rgb& px) noexcept {
  const double r = px[0];
  const double g = px[1];
  const double b = px[2];
  const double hi = std::max({r, g, b});
  const double lo = std::min({r, g, b});
  const double chroma = hi - lo;

  Hsv out;
  out.v = hi;
  out.s = hi > 0.0 ? chroma / hi : 0.0;
  if (chroma <= 0.0) {
    return out;
  }
  double h = 0.0;
  if (hi == r) {
    h = 60.0 * std::fmod((g - b) / chroma, 6.0);
  } else if (hi == g) {
    h = 60.0 * ((b - r) / chroma + 2.0);
  } else {
    h = 60.0 * ((r - g) / chroma + 4.0);
  }
  if (h < 0.0) {
    h += 360.0;
  }
  if (h >= 360.0) {
    h -= 360.0;
  }
  out.h = h;
  return out;
}

std::size_t hsv_bin(const Hsv& hsv) noexcept {
  const std::size_t hb = quantize(hsv.h, 360.0, kHueBins);
  const std::size_t sb = quantize(hsv.s, 1.0, kSaturationBins);
  const std::size_t vb = quantize(hsv.v, 1.0, kValueBins);
  return hb * kSaturationBins * kValueBins + sb * kValueBins + vb;
}

ColorHistogram extract_color_histogram(const RgbImage& image) {
  if (image.values.empty()) {
    throw Error(ErrorKind::EmptyImage, "extract_color_histogram: image has no pixels");
  }
  std::vector<std::size_t> counts(kColorBins, 0);
  for (const Rgb& px : image.values) {
    ++counts[hsv_bin(rgb_to_hsv(px))];
  }
  ColorHistogram out;
  out.bins.resize(kColorBins);
  const auto total = static_cast<double>(image.values.size());
  for (std::size_t i = 0; i < kColorBins; ++i) {
    out.bins[i] = static_cast<double>(counts[i]) / total;
  }
  return out;
}

}  // namespace mfir
