#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mfir/error.hpp"
#include "mfir/gabor.hpp"

using namespace mfir;

namespace {

GrayImage grating(std::size_t side, double freq, double angle, double phase = 0.0) {
  GrayImage img(side, side);
  for (std::size_t y = 0; y < side; ++y)
    for (std::size_t x = 0; x < side; ++x) {
      const double u = x * std::cos(angle) + y * std::sin(angle);
      img.at(x, y) = 0.5 + 0.5 * std::cos(2.0 * std::numbers::pi * freq * u + phase);
    }
  return img;
}

GrayImage noise_image(std::size_t w, std::size_t h, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrayImage img(w, h);
  for (auto& v : img.values) v = u(rng);
  return img;
}

std::pair<std::size_t, std::size_t> argmax_mean(const TextureVector& tv, std::size_t orientations) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < tv.size(); i += 2)
    if (tv[i] > tv[best]) best = i;
  const std::size_t filter = best / 2;
  return {filter / orientations, filter % orientations};
}

}  // namespace

TEST_CASE("default bank layout and centre frequencies") {
  const GaborBankParams p;  // M=4, N=6, 0.05..0.4, radius 15
  const auto bank = build_filter_bank(p);
  REQUIRE(bank.size() == 24);
  CHECK(bank[0].scale == 0);
  CHECK(bank[0].orientation == 0);
  CHECK(bank[0].center_frequency == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(bank[0].angle == 0.0);
  // a = (0.4/0.05)^(1/3) = 2
  for (const auto& k : bank) {
    CHECK(k.center_frequency == doctest::Approx(0.05 * std::pow(2.0, k.scale)).epsilon(1e-12));
    CHECK(k.angle == doctest::Approx(k.orientation * std::numbers::pi / 6.0));
    CHECK(k.taps.size() == 31u * 31u);
  }
  // n varies fastest
  CHECK(bank[7].scale == 1);
  CHECK(bank[7].orientation == 1);
}

TEST_CASE("two-scale bank uses a = u_high / u_low") {
  GaborBankParams p;
  p.scales = 2;
  p.orientations = 1;
  p.u_low = 0.1;
  p.u_high = 0.4;
  const auto bank = build_filter_bank(p);
  REQUIRE(bank.size() == 2);
  CHECK(bank[1].center_frequency == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("kernels are zero-DC and finite") {
  for (const GaborBankParams& p : {GaborBankParams{}, GaborBankParams{3, 4, 0.08, 0.3, 7}, GaborBankParams{2, 1, 0.1, 0.4, 3}}) {
    for (const auto& k : build_filter_bank(p)) {
      Complex sum{0, 0};
      for (const auto& t : k.taps) {
        CHECK(std::isfinite(t.real()));
        CHECK(std::isfinite(t.imag()));
        sum += t;
      }
      CHECK(std::abs(sum) < 1e-9);
    }
  }
}

TEST_CASE("invalid bank parameters are rejected") {
  const auto kind_of = [](GaborBankParams p) {
    try {
      build_filter_bank(p);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  CHECK(kind_of({1, 6, 0.05, 0.4, 15}) == ErrorKind::InvalidParams);
  CHECK(kind_of({4, 0, 0.05, 0.4, 15}) == ErrorKind::InvalidParams);
  CHECK(kind_of({4, 6, 0.0, 0.4, 15}) == ErrorKind::InvalidParams);
  CHECK(kind_of({4, 6, 0.4, 0.05, 15}) == ErrorKind::InvalidParams);
  CHECK(kind_of({4, 6, 0.05, 0.5, 15}) == ErrorKind::InvalidParams);
  CHECK(kind_of({4, 6, 0.05, 0.4, 0}) == ErrorKind::InvalidParams);
}

TEST_CASE("zero image gives zero response") {
  const auto bank = build_filter_bank({});
  const GrayImage zero(32, 32);
  const ResponseMap r = convolve_response(zero, bank[5]);
  CHECK(r.width == 32);
  CHECK(r.height == 32);
  for (const auto& v : r.values) CHECK(v == Complex{0, 0});
}

TEST_CASE("impulse response reproduces the conjugated kernel") {
  const auto bank = build_filter_bank({});
  GrayImage img(65, 65);
  img.at(32, 32) = 1.0;
  for (const std::size_t idx : {0u, 9u, 23u}) {
    const GaborKernel& k = bank[idx];
    const ResponseMap r = convolve_response(img, k);
    double worst = 0.0;
    double worst_flip = 0.0;
    for (long dy = -15; dy <= 15; ++dy)
      for (long dx = -15; dx <= 15; ++dx) {
        const Complex got = r.at(static_cast<std::size_t>(32 + dx), static_cast<std::size_t>(32 + dy));
        worst = std::max(worst, std::abs(got - std::conj(k.tap(dx, dy))));
        // Hermitian symmetry of the Gabor taps: conj(g(d)) == g(-d).
        worst_flip = std::max(worst_flip, std::abs(got - k.tap(-dx, -dy)));
      }
    CHECK(worst < 1e-9);
    CHECK(worst_flip < 1e-9);
  }
}

TEST_CASE("flat image gives no interior response") {
  const auto bank = build_filter_bank({});
  const double c = 0.73;
  const GrayImage flat(64, 64, c);
  for (const auto& k : bank) {
    const ResponseMap r = convolve_response(flat, k);
    for (std::size_t y = 15; y < 49; ++y)
      for (std::size_t x = 15; x < 49; ++x) CHECK(std::abs(r.at(x, y)) < 1e-6 * c);
  }
}

TEST_CASE("texture_stats examples") {
  ResponseMap zero{4, 1, {{0, 0}, {0, 0}, {0, 0}, {0, 0}}};
  auto s = texture_stats(zero);
  CHECK(s.mean == 0.0);
  CHECK(s.stddev == 0.0);

  // |3+4i| = 5 everywhere
  ResponseMap constant{2, 2, {{3, 4}, {-3, 4}, {5, 0}, {0, -5}}};
  s = texture_stats(constant);
  CHECK(s.mean == doctest::Approx(5.0));
  CHECK(s.stddev == doctest::Approx(0.0));

  ResponseMap split{4, 1, {{0, 0}, {2, 0}, {0, 0}, {0, 2}}};
  s = texture_stats(split);
  CHECK(s.mean == doctest::Approx(1.0));
  CHECK(s.stddev == doctest::Approx(1.0));

  CHECK_THROWS_AS(texture_stats(ResponseMap{}), Error);
}

TEST_CASE("texture_stats matches a long-double two-pass reference") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    ResponseMap r{37, 11, {}};
    for (std::size_t i = 0; i < 37 * 11; ++i) r.values.emplace_back(n(rng), n(rng));
    long double sum = 0;
    for (const auto& v : r.values) sum += std::hypot(static_cast<long double>(v.real()), static_cast<long double>(v.imag()));
    const long double mean = sum / r.values.size();
    long double sq = 0;
    for (const auto& v : r.values) {
      const long double d = std::hypot(static_cast<long double>(v.real()), static_cast<long double>(v.imag())) - mean;
      sq += d * d;
    }
    const long double sd = std::sqrt(sq / r.values.size());
    const auto s = texture_stats(r);
    CHECK(std::abs(s.mean - static_cast<double>(mean)) <= 1e-12 * static_cast<double>(mean));
    CHECK(std::abs(s.stddev - static_cast<double>(sd)) <= 1e-12 * static_cast<double>(sd));
  }
}

TEST_CASE("texture vector shape and zero image") {
  const auto bank = build_filter_bank({});
  const TextureVector zero = extract_texture_vector(GrayImage(32, 32), bank);
  REQUIRE(zero.size() == 48);
  for (double v : zero) CHECK(v == 0.0);

  const TextureVector tv = extract_texture_vector(noise_image(40, 40, 1), bank);
  REQUIRE(tv.size() == 48);
  for (std::size_t i = 0; i < tv.size(); ++i) {
    CHECK(std::isfinite(tv[i]));
    if (i % 2 == 1) CHECK(tv[i] >= 0.0);
  }
  CHECK_THROWS_AS(extract_texture_vector(GrayImage(8, 8), std::span<const GaborKernel>{}), Error);
}

TEST_CASE("texture statistics scale with image intensity") {
  const auto bank = build_filter_bank({2, 3, 0.1, 0.3, 6});
  const GrayImage img = noise_image(33, 29, 9);
  const TextureVector base = extract_texture_vector(img, bank);
  for (const double s : {2.0, 0.7, 13.0}) {
    GrayImage scaled = img;
    for (auto& v : scaled.values) v *= s;
    const TextureVector tv = extract_texture_vector(scaled, bank);
    for (std::size_t i = 0; i < tv.size(); ++i) CHECK(tv[i] == doctest::Approx(s * base[i]).epsilon(1e-12));
  }
}

TEST_CASE("grating at filter (1, 0) peaks at or next to that filter") {
  const GaborBankParams p;
  const auto bank = build_filter_bank(p);
  const GrayImage img = grating(128, 0.05 * 2.0, 0.0);
  const auto [m, n] = argmax_mean(extract_texture_vector(img, bank), p.orientations);
  CHECK(m <= 2);
  CHECK((n == 0 || n == 1 || n == 5));
}

TEST_CASE("spectral bank matches direct convolution") {
  const auto bank = build_filter_bank({});
  const GrayImage img = noise_image(128, 128, 21);
  const SpectralFilterBank spectral(bank, 128, 128);
  const auto fast = spectral.responses(img);
  REQUIRE(fast.size() == bank.size());
  for (const std::size_t idx : {0u, 11u, 23u}) {
    const ResponseMap direct = convolve_response(img, bank[idx]);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.values.size(); ++i)
      worst = std::max(worst, std::abs(direct.values[i] - fast[idx].values[i]));
    CHECK(worst < 1e-9);
  }
  const TextureVector a = extract_texture_vector(img, bank);
  const TextureVector b = spectral.texture_vector(img);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
}

TEST_CASE("spectral bank handles images smaller than the kernel") {
  const auto bank = build_filter_bank({});
  const GrayImage img = noise_image(9, 6, 4);
  const SpectralFilterBank spectral(bank, 9, 6);
  const auto fast = spectral.responses(img);
  for (std::size_t idx = 0; idx < bank.size(); idx += 5) {
    const ResponseMap direct = convolve_response(img, bank[idx]);
    for (std::size_t i = 0; i < direct.values.size(); ++i) CHECK(std::abs(direct.values[i] - fast[idx].values[i]) < 1e-9);
  }
  CHECK_THROWS_AS(spectral.responses(GrayImage(10, 6)), Error);
}
