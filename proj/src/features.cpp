#include "mfir/features.hpp"

#include "mfir/error.hpp"

namespace mfir {

FeatureExtractor::FeatureExtractor(const GaborBankParams& params, std::size_t side)
    : params_(params),
      side_(side > 0 ? side : throw Error(ErrorKind::InvalidParams, "analysis side must be positive")),
      bank_(build_filter_bank(params)),
      spectral_(bank_, side_, side_) {}

ImageFeatures FeatureExtractor::extract(const RgbImage& image) const {
  ImageFeatures out;
  out.color = extract_color_histogram(image);
  const GrayImage gray = resample_bilinear(to_grayscale(image), side_, side_);
  out.texture = spectral_.texture_vector(gray);
  return out;
}

ImageFeatures FeatureExtractor::extract(const std::filesystem::path& path) const {
  return extract(load_rgb(path));
}

std::vector<double> feature_row(const ImageFeatures& features) {
  std::vector<double> row = features.texture;
  row.insert(row.end(), features.color.bins.begin(), features.color.bins.end());
  return row;
}

}  // namespace mfir
