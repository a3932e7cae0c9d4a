#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "mfir/image.hpp"

namespace mfir {

using Complex = std::complex<double>;

struct GaborBankParams {
  std::size_t scales = 4;        // M
  std::size_t orientations = 6;  // N
  double u_low = 0.05;           // cycles/pixel, centre frequency of scale 0
  double u_high = 0.4;           // cycles/pixel, centre frequency of scale M-1
  std::size_t kernel_radius = 15;

  // Throws Error{InvalidParams} unless M >= 2, N >= 1,
  // 0 < u_low < u_high < 0.5 and kernel_radius >= 1.
  void validate() const;

  std::size_t filter_count() const noexcept { return scales * orientations; }
  std::size_t texture_length() const noexcept { return 2 * filter_count(); }

  friend bool operator==(const GaborBankParams&, const GaborBankParams&) = default;
};

struct GaborKernel {
  std::size_t scale = 0;        // m
  std::size_t orientation = 0;  // n
  std::size_t radius = 0;
  double center_frequency = 0.0;
  double angle = 0.0;
  std::vector<Complex> taps;  // (2r+1)^2, row-major, offset (dx, dy) at [(dy+r)(2r+1) + dx+r]

  std::size_t side() const noexcept { return 2 * radius + 1; }
  const Complex& tap(long dx, long dy) const {
    const auto r = static_cast<long>(radius);
    return taps[static_cast<std::size_t>((dy + r) * static_cast<long>(side()) + dx + r)];
  }
};

struct ResponseMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Complex> values;

  const Complex& at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
};

// [mu_00, sigma_00, mu_01, sigma_01, ...], orientation fastest.
using TextureVector = std::vector<double>;

struct TextureStats {
  double mean = 0.0;
  double stddev = 0.0;
};

/*
  Dyadic Gabor family derived from the complex mother function

      g(x, y) = 1 / (2 pi sx sy) * exp(-(x^2/sx^2 + y^2/sy^2) / 2 + 2 pi j W x).

  Scale m has centre frequency u_low * a^m with a = (u_high/u_low)^(1/(M-1));
  orientation n is rotated to n*pi/N. The mother uses W = u_high and sx, sy
  chosen so the half-peak contours of adjacent filters touch in frequency.
  Each kernel is a^{-k} g(a^{-k} x', a^{-k} y') for k = M-1-m, and then has its
  complex tap mean removed so a flat image produces no response.
*/
std::vector<GaborKernel> build_filter_bank(const GaborBankParams& params);

// Same-size convolution of the image with the conjugated kernel,
//   R(x, y) = sum_{dx,dy} I(x - dx, y - dy) * conj(g(dx, dy)),
// with reflect padding (edge sample not repeated) at the borders.
ResponseMap convolve_response(const GrayImage& image, const GaborKernel& kernel);

// Mean and population standard deviation of |R| over all samples.
TextureStats texture_stats(const ResponseMap& response);

TextureVector extract_texture_vector(const GrayImage& image, std::span<const GaborKernel> bank);

// Index of the mu entry for filter (m, n) inside a TextureVector.
inline std::size_t texture_mean_index(std::size_t m, std::size_t n, std::size_t orientations) noexcept {
  return 2 * (m * orientations + n);
}


/*
  Frequency-domain evaluation of a whole filter bank for images of one fixed
  size. Kernel spectra are computed once; each image then costs one forward
  transform plus one inverse transform per kernel. Results match
  convolve_response to rounding (the padded image is transformed at its own
  size, so circular wrap-around only touches samples that are discarded).
  Safe to share across threads once constructed.
*/
class SpectralFilterBank {
 public:
  SpectralFilterBank(std::span<const GaborKernel> bank, std::size_t width, std::size_t height);
  ~SpectralFilterBank();
  SpectralFilterBank(SpectralFilterBank&&) noexcept;
  SpectralFilterBank& operator=(SpectralFilterBank&&) noexcept;

  std::size_t width() const noexcept;
  std::size_t height() const noexcept;
  std::size_t size() const noexcept;

  std::vector<ResponseMap> responses(const GrayImage& image) const;
  TextureVector texture_vector(const GrayImage& image) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mfir
