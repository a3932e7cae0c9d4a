#include "mfir/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "mfir/error.hpp"

namespace mfir {

namespace {

enum class Container { Png, Jpeg, Other };

Container sniff(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::UnreadableFile, "cannot open " + path.string());
  }
  std::array<unsigned char, 8> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  static constexpr std::array<unsigned char, 8> kPng = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (got >= kPng.size() && std::equal(kPng.begin(), kPng.end(), head.begin())) {
    return Container::Png;
  }
  if (got >= 3 && head[0] == 0xff && head[1] == 0xd8 && head[2] == 0xff) {
    return Container::Jpeg;
  }
  return Container::Other;
}

}  // namespace

double luminance(const Rgb& px) noexcept {
  return 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
}

GrayImage to_grayscale(const RgbImage& image) {
  GrayImage out(image.width, image.height);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    // Clamp away rounding drift above 1 for white pixels.
    out.values[i] = std::clamp(luminance(image.values[i]), 0.0, 1.0);
  }
  return out;
}

GrayImage resample_bilinear(const GrayImage& image, std::size_t width, std::size_t height) {
  if (image.width == 0 || image.height == 0 || width == 0 || height == 0) {
    throw Error(ErrorKind::InvalidParams, "resample_bilinear: empty image or target size");
  }
  if (image.width == width && image.height == height) {
    return image;
  }
  GrayImage out(width, height);
  const double sx = static_cast<double>(image.width) / static_cast<double>(width);
  const double sy = static_cast<double>(image.height) / static_cast<double>(height);
  const auto max_x = static_cast<double>(image.width - 1);
  const auto max_y = static_cast<double>(image.height - 1);

  for (std::size_t y = 0; y < height; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - static_cast<double>(x0);
      const double top = (1.0 - wx) * image.at(x0, y0) + wx * image.at(x1, y0);
      const double bottom = (1.0 - wx) * image.at(x0, y1) + wx * image.at(x1, y1);
      out.at(x, y) = (1.0 - wy) * top + wy * bottom;
    }
  }
  return out;
}

RgbImage load_rgb(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::UnreadableFile, "no such file: " + path.string());
  }
  if (sniff(path) == Container::Other) {
    throw Error(ErrorKind::UnsupportedFormat, "not a PNG or JPEG file: " + path.string());
  }

  // IMREAD_ANYDEPTH keeps 16-bit PNG samples; alpha is dropped.
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_COLOR | cv::IMREAD_ANYDEPTH);
  if (mat.empty()) {
    throw Error(ErrorKind::UnreadableFile, "cannot decode " + path.string());
  }
  double scale = 1.0 / 255.0;
  if (mat.depth() == CV_16U) {
    scale = 1.0 / 65535.0;
  } else if (mat.depth() != CV_8U) {
    throw Error(ErrorKind::UnsupportedFormat, "unsupported sample depth in " + path.string());
  }
  cv::Mat bgr;
  mat.convertTo(bgr, CV_64FC3, scale);

  RgbImage out(static_cast<std::size_t>(bgr.cols), static_cast<std::size_t>(bgr.rows));
  for (int r = 0; r < bgr.rows; ++r) {
    const auto* row = bgr.ptr<cv::Vec3d>(r);
    for (int c = 0; c < bgr.cols; ++c) {
      out.at(static_cast<std::size_t>(c), static_cast<std::size_t>(r)) = {row[c][2], row[c][1], row[c][0]};
    }
  }
  return out;
}

GrayImage load_grayscale(const std::filesystem::path& path, std::size_t side) {
  if (side == 0) {
    throw Error(ErrorKind::InvalidParams, "load_grayscale: side must be positive");
  }
  return resample_bilinear(to_grayscale(load_rgb(path)), side, side);
}

void save_png(const RgbImage& image, const std::filesystem::path& path) {
  if (image.width == 0 || image.height == 0) {
    throw Error(ErrorKind::EmptyImage, "save_png: empty image");
  }
  cv::Mat bgr(static_cast<int>(image.height), static_cast<int>(image.width), CV_8UC3);
  for (std::size_t y = 0; y < image.height; ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(static_cast<int>(y));
    for (std::size_t x = 0; x < image.width; ++x) {
      const Rgb& px = image.at(x, y);
      for (int ch = 0; ch < 3; ++ch) {
        const double v = std::clamp(px[static_cast<std::size_t>(2 - ch)], 0.0, 1.0);
        row[x][ch] = static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr, {cv::IMWRITE_PNG_COMPRESSION, 6});
  } catch (const cv::Exception& e) {
    throw Error(ErrorKind::IoError, "cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) {
    throw Error(ErrorKind::IoError, "cannot write " + path.string());
  }
}

bool is_supported_image_file(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace mfir
