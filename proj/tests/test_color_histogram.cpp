#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mfir/color_histogram.hpp"
#include "mfir/error.hpp"

using namespace mfir;

namespace {

double total(const ColorHistogram& h) { return std::accumulate(h.bins.begin(), h.bins.end(), 0.0); }

RgbImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RgbImage img(w, h);
  for (auto& px : img.values) px = {u(rng), u(rng), u(rng)};
  return img;
}

}  // namespace

TEST_CASE("hsv conversion of primaries") {
  auto hsv = rgb_to_hsv({1, 0, 0});
  CHECK(hsv.h == 0.0);
  CHECK(hsv.s == 1.0);
  CHECK(hsv.v == 1.0);
  CHECK(rgb_to_hsv({0, 1, 0}).h == doctest::Approx(120.0));
  CHECK(rgb_to_hsv({0, 0, 1}).h == doctest::Approx(240.0));
  CHECK(rgb_to_hsv({1, 0, 1}).h == doctest::Approx(300.0));
  // Achromatic pixels get hue 0.
  hsv = rgb_to_hsv({0.4, 0.4, 0.4});
  CHECK(hsv.h == 0.0);
  CHECK(hsv.s == 0.0);
  CHECK(hsv.v == doctest::Approx(0.4));
}

TEST_CASE("single colour fills exactly one bin") {
  const ColorHistogram h = extract_color_histogram(RgbImage(5, 3, {0.2, 0.6, 0.9}));
  REQUIRE(h.bins.size() == 72);
  CHECK(std::count(h.bins.begin(), h.bins.end(), 1.0) == 1);
  CHECK(std::count(h.bins.begin(), h.bins.end(), 0.0) == 71);
  CHECK(h.scheme == "hsv-8x3x3");
}

TEST_CASE("half red, half blue") {
  RgbImage img(4, 2, {1, 0, 0});
  for (std::size_t x = 0; x < 4; ++x) img.at(x, 1) = {0, 0, 1};
  const ColorHistogram h = extract_color_histogram(img);
  // red: h-bin 0, s-bin 2, v-bin 2 -> 8; blue: 240 deg -> h-bin 5 -> 45 + 8 = 53
  CHECK(h.bins[8] == 0.5);
  CHECK(h.bins[53] == 0.5);
  CHECK(total(h) == doctest::Approx(1.0));
}

TEST_CASE("histograms are normalized for random images") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const ColorHistogram h = extract_color_histogram(random_image(1 + i % 13, 1 + i % 7, rng));
    CHECK(std::abs(total(h) - 1.0) < 1e-9);
    for (double b : h.bins) CHECK(b >= 0.0);
  }
}

TEST_CASE("pixel order does not matter") {
  std::mt19937_64 rng(23);
  RgbImage img = random_image(12, 9, rng);
  const ColorHistogram before = extract_color_histogram(img);
  std::shuffle(img.values.begin(), img.values.end(), rng);
  CHECK(extract_color_histogram(img).bins == before.bins);
}

TEST_CASE("concatenation averages histograms") {
  std::mt19937_64 rng(29);
  const RgbImage a = random_image(6, 5, rng);
  const RgbImage b = random_image(6, 5, rng);
  RgbImage both(6, 10);
  std::copy(a.values.begin(), a.values.end(), both.values.begin());
  std::copy(b.values.begin(), b.values.end(), both.values.begin() + 30);
  const auto ha = extract_color_histogram(a);
  const auto hb = extract_color_histogram(b);
  const auto hab = extract_color_histogram(both);
  for (std::size_t i = 0; i < kColorBins; ++i) CHECK(std::abs(hab.bins[i] - 0.5 * (ha.bins[i] + hb.bins[i])) < 1e-9);
}

TEST_CASE("empty image is rejected") {
  try {
    extract_color_histogram(RgbImage{});
    FAIL("expected EmptyImage");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyImage);
  }
}
