#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fusion_oracle.hpp"
#include "index_factory.hpp"
#include "mfir/error.hpp"
#include "mfir/fusion.hpp"

using namespace mfir;

namespace {

FeatureMatrix from_columns(const std::vector<std::vector<double>>& cols) {
  FeatureMatrix m(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < m.rows; ++i) m.at(i, j) = cols[j][i];
  return m;
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("internal normalization examples") {
  const auto [norm, stats] = internal_normalize(from_columns({{1, 2, 3}, {4, 4, 4}}));
  CHECK(stats.mean[0] == doctest::Approx(2.0));
  CHECK(stats.stddev[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(norm.at(0, 0) == doctest::Approx(-1.224744871391589));
  CHECK(norm.at(1, 0) == 0.0);
  CHECK(norm.at(2, 0) == doctest::Approx(1.224744871391589));
  for (std::size_t i = 0; i < 3; ++i) CHECK(norm.at(i, 1) == 0.0);
}

TEST_CASE("internal normalization gives zero-mean unit-variance columns") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(3.0, 7.0);
  for (int trial = 0; trial < 30; ++trial) {
    FeatureMatrix m(2 + trial, 6);
    for (auto& v : m.values) v = n(rng);
    for (std::size_t i = 0; i < m.rows; ++i) m.at(i, 4) = 1.5;
    const auto [norm, stats] = internal_normalize(m);
    for (std::size_t j = 0; j < m.cols; ++j) {
      double mean = 0, sq = 0;
      for (std::size_t i = 0; i < m.rows; ++i) mean += norm.at(i, j);
      mean /= m.rows;
      for (std::size_t i = 0; i < m.rows; ++i) sq += (norm.at(i, j) - mean) * (norm.at(i, j) - mean);
      const double sd = std::sqrt(sq / m.rows);
      CHECK(std::abs(mean) < 1e-9);
      if (j == 4) {
        CHECK(sd == 0.0);
      } else {
        CHECK(std::abs(sd - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("apply_column_stats") {
  const FeatureMatrix m = from_columns({{1, 2, 3, 9}, {0, 5, 5, 2}, {3, 3, 3, 3}});
  const auto [norm, stats] = internal_normalize(m);
  for (double v : apply_column_stats(stats.mean, stats)) CHECK(v == 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const auto z = apply_column_stats(m.row(i), stats);
    for (std::size_t j = 0; j < m.cols; ++j) CHECK(z[j] == norm.at(i, j));
  }
  ColumnStats s{{1.0, -2.0}, {0.5, 3.0}};
  const auto two = apply_column_stats(std::vector<double>{2.0, 4.0}, s);
  CHECK(two[0] == doctest::Approx(2.0));
  CHECK(two[1] == doctest::Approx(2.0));
  CHECK(kind_of([&] { apply_column_stats(std::vector<double>{1.0}, s); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("jsd examples") {
  const std::vector<double> a{1, 0}, b{0, 1}, h{0.5, 0.5};
  CHECK(jsd_distance(a, a) == 0.0);
  CHECK(jsd_distance(a, b) == doctest::Approx(2.0 * std::numbers::ln2).epsilon(1e-14));
  CHECK(jsd_distance(h, h) == 0.0);
  CHECK(kind_of([&] { jsd_distance(a, std::vector<double>{1, 0, 0}); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("jsd properties over random histograms") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto h = testing::random_histogram(rng, 72);
    const auto g = testing::random_histogram(rng, 72);
    const double d = jsd_distance(h, g);
    CHECK(d == jsd_distance(g, h));
    CHECK(d > 0.0);
    CHECK(d <= 2.0 * std::numbers::ln2 + 1e-12);
    CHECK(jsd_distance(h, h) == 0.0);
  }
}

TEST_CASE("texture distance") {
  const std::vector<double> a{1, 2, 3, 4}, b{1, 5, 3, 4};
  CHECK(texture_distance(a, a, {0, 1, 2, 3}) == 0.0);
  CHECK(texture_distance(a, b, {0, 1, 2, 3}) == 3.0);
  CHECK(texture_distance(a, b, {0, 2}) == 0.0);
  CHECK(texture_distance(a, b, {}) == 0.0);
  CHECK(kind_of([&] { texture_distance(a, std::vector<double>{1}, {0}); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("external normalization anchors") {
  const auto d = external_normalize(std::vector<double>{0, 10});
  CHECK(d[0] == doctest::Approx(1.0 / 3.0));
  CHECK(d[1] == doctest::Approx(2.0 / 3.0));

  // mean 5, population sigma 5 over {0, 5, 10, 5, 5, 5} -> sqrt(50/6)
  const std::vector<double> raw{0, 5, 10, 5, 5, 5};
  const auto p = external_normalize_profile(raw);
  CHECK(p.mean == 5.0);
  CHECK(p.normalized[1] == 0.5);

  for (double v : external_normalize(std::vector<double>{2, 2, 2})) CHECK(v == 0.5);
  CHECK(kind_of([] { external_normalize(std::vector<double>{1}); }) == ErrorKind::TooFewCandidates);
}

TEST_CASE("external normalization is monotone and bounded") {
  std::mt19937_64 rng(4);
  std::exponential_distribution<double> e(1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> raw(2 + trial % 40);
    for (auto& v : raw) v = e(rng);
    if (trial % 5 == 0) raw[0] = 100.0;  // force clamping
    const auto n = external_normalize(raw);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      CHECK(n[i] >= 0.0);
      CHECK(n[i] <= 1.0);
      for (std::size_t j = 0; j < raw.size(); ++j)
        if (raw[i] < raw[j]) CHECK(n[i] <= n[j]);
    }
  }
}

TEST_CASE("ordering survives increasing transforms of raw distances") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> raw(20);
    for (auto& v : raw) v = u(rng);
    std::vector<double> warped(raw.size());
    std::transform(raw.begin(), raw.end(), warped.begin(), [](double v) { return std::exp(2.0 * v) + v * v * v; });
    const auto a = external_normalize_profile(raw).unclamped;
    const auto b = external_normalize_profile(warped).unclamped;
    std::vector<std::size_t> ia(raw.size()), ib(raw.size());
    std::iota(ia.begin(), ia.end(), 0);
    std::iota(ib.begin(), ib.end(), 0);
    std::stable_sort(ia.begin(), ia.end(), [&](auto x, auto y) { return a[x] < a[y]; });
    std::stable_sort(ib.begin(), ib.end(), [&](auto x, auto y) { return b[x] < b[y]; });
    CHECK(ia == ib);
  }
}

TEST_CASE("fuse") {
  CHECK(fuse(0.2, 0.8, {}) == doctest::Approx(0.5));
  CHECK(fuse(0.3, 0.9, {1.0, 0.0}) == 0.3);
  CHECK(fuse(0.0, 0.0, {}) == 0.0);
  CHECK(kind_of([] { fuse(0.1, 0.1, {0.7, 0.7}); }) == ErrorKind::InvalidWeights);
  CHECK(kind_of([] { fuse(0.1, 0.1, {-0.5, 1.5}); }) == ErrorKind::InvalidWeights);
}

TEST_CASE("rank self-retrieval and truncation") {
  std::mt19937_64 rng(31);
  const RetrievalIndex index = testing::random_index(rng, 25);
  for (std::size_t i = 0; i < index.size(); ++i) {
    ImageFeatures q;
    q.texture.assign(index.texture_row(i).begin(), index.texture_row(i).end());
    q.color.bins.assign(index.color_row(i).begin(), index.color_row(i).end());
    const auto results = rank(q, index, 5);
    REQUIRE(results.size() == 5);
    CHECK(results[0].row == i);
    CHECK(results[0].texture_raw < 1e-9);
    CHECK(results[0].color_raw < 1e-9);
    for (std::size_t r = 1; r < results.size(); ++r) CHECK(results[r - 1].fused <= results[r].fused);
  }
  const auto q = testing::random_features(rng, index.params);
  CHECK(rank(q, index, 1000).size() == 25);
  CHECK(kind_of([&] { rank(q, index, 0); }) == ErrorKind::InvalidParams);
  RetrievalIndex empty = index;
  empty.matrix = FeatureMatrix(0, index.matrix.cols);
  CHECK(kind_of([&] { rank(q, empty, 3); }) == ErrorKind::EmptyIndex);
}

TEST_CASE("self-retrieval survives clamping at zero") {
  // 37 far rows and 3 near rows: the near group sits below mean - 3 sigma in
  // both channels, so all three clamp to a fused distance of 0.
  std::mt19937_64 rng(44);
  RetrievalIndex index = testing::random_index(rng, 40);
  const std::vector<double> far(index.matrix.row(0).begin(), index.matrix.row(0).end());
  const std::vector<double> near(index.matrix.row(1).begin(), index.matrix.row(1).end());
  for (std::size_t i = 0; i < 40; ++i) {
    const auto& base = i < 37 ? far : near;
    auto row = index.matrix.row(i);
    std::copy(base.begin(), base.end(), row.begin());
    row[0] += 1e-4 * static_cast<double>(i % 7);
  }
  index.retained = {0};
  ImageFeatures q;
  q.texture.assign(index.texture_row(38).begin(), index.texture_row(38).end());
  q.color.bins.assign(index.color_row(38).begin(), index.color_row(38).end());
  const auto results = rank(q, index, 3);
  REQUIRE(results.size() == 3);
  CHECK(results[0].fused == 0.0);
  CHECK(results[1].fused == 0.0);
  CHECK(results[0].row == 38);
}

TEST_CASE("empty reduct falls back to colour-only ranking") {
  std::mt19937_64 rng(5);
  RetrievalIndex index = testing::random_index(rng, 12);
  index.retained.clear();
  const auto q = testing::random_features(rng, index.params);
  const auto fused = rank(q, index, 12, {0.5, 0.5});
  const auto color_only = rank(q, index, 12, {0.0, 1.0});
  for (std::size_t r = 0; r < fused.size(); ++r) CHECK(fused[r].row == color_only[r].row);
}

TEST_CASE("toy index matches the multiprecision oracle") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const RetrievalIndex index = testing::random_index(rng, 3);
    const auto q = testing::random_features(rng, index.params);
    const double wt = trial % 4 == 0 ? 1.0 : 0.5;
    const auto results = rank(q, index, 3, {wt, 1.0 - wt});
    const auto expected = testing::oracle_rank(testing::texture_rows(index), testing::texture_rows(index),
                                               testing::color_rows(index), index.retained, q.texture, q.color.bins,
                                               wt, 1.0 - wt);
    REQUIRE(results.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(results[r].row == expected[r].row);
      CHECK(std::abs(results[r].texture_raw - expected[r].texture_raw.convert_to<double>()) < 1e-9);
      CHECK(std::abs(results[r].color_raw - expected[r].color_raw.convert_to<double>()) < 1e-9);
      CHECK(std::abs(results[r].texture_star - expected[r].texture_star.convert_to<double>()) < 1e-9);
      CHECK(std::abs(results[r].color_star - expected[r].color_star.convert_to<double>()) < 1e-9);
      CHECK(std::abs(results[r].fused - expected[r].fused.convert_to<double>()) < 1e-9);
    }
  }
}
