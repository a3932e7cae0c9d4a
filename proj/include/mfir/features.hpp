#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "mfir/fusion.hpp"
#include "mfir/gabor.hpp"

namespace mfir {

// Holds the filter bank and its spectra so they are built once per corpus.
// Texture goes through SpectralFilterBank, which matches the direct
// convolution to rounding.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const GaborBankParams& params, std::size_t side = kDefaultAnalysisSide);

  // Texture from the side x side grayscale image, colour from native pixels.
  ImageFeatures extract(const std::filesystem::path& path) const;
  ImageFeatures extract(const RgbImage& image) const;

  const GaborBankParams& params() const noexcept { return params_; }
  std::size_t side() const noexcept { return side_; }
  const std::vector<GaborKernel>& bank() const noexcept { return bank_; }

 private:
  GaborBankParams params_;
  std::size_t side_;
  std::vector<GaborKernel> bank_;
  SpectralFilterBank spectral_;
};

// Texture entries followed by colour bins.
std::vector<double> feature_row(const ImageFeatures& features);

}  // namespace mfir
