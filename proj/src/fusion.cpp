#include "mfir/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mfir/error.hpp"
#include "mfir/index_store.hpp"

namespace mfir {

void FusionWeights::validate() const {
  if (!(texture >= 0.0) || !(color >= 0.0) || std::abs(texture + color - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidWeights, "weights must be non-negative and sum to 1");
  }
}

ColumnStats column_stats(const FeatureMatrix& matrix) {
  ColumnStats stats;
  stats.mean.assign(matrix.cols, 0.0);
  stats.stddev.assign(matrix.cols, 0.0);
  if (matrix.rows == 0) {
    return stats;
  }
  const auto n = static_cast<double>(matrix.rows);
  for (std::size_t j = 0; j < matrix.cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < matrix.rows; ++i) {
      sum += matrix.at(i, j);
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (std::size_t i = 0; i < matrix.rows; ++i) {
      const double d = matrix.at(i, j) - mean;
      sq += d * d;
    }
    stats.mean[j] = mean;
    stats.stddev[j] = std::sqrt(sq / n);
  }
  return stats;
}

std::pair<FeatureMatrix, ColumnStats> internal_normalize(const FeatureMatrix& matrix) {
  ColumnStats stats = column_stats(matrix);
  FeatureMatrix out = matrix;
  for (std::size_t i = 0; i < out.rows; ++i) {
    const std::vector<double> z = apply_column_stats(matrix.row(i), stats);
    std::copy(z.begin(), z.end(), out.row(i).begin());
  }
  return {std::move(out), std::move(stats)};
}

std::vector<double> apply_column_stats(std::span<const double> vector, const ColumnStats& stats) {
  if (vector.size() != stats.mean.size() || stats.mean.size() != stats.stddev.size()) {
    throw Error(ErrorKind::LengthMismatch, "feature vector length " + std::to_string(vector.size()) +
                                               " vs stats length " + std::to_string(stats.mean.size()));
  }
  std::vector<double> out(vector.size());
  for (std::size_t j = 0; j < vector.size(); ++j) {
    out[j] = stats.stddev[j] > 0.0 ? (vector[j] - stats.mean[j]) / stats.stddev[j] : 0.0;
  }
  return out;
}

double jsd_distance(std::span<const double> h, std::span<const double> h2) {
  if (h.size() != h2.size()) {
    throw Error(ErrorKind::LengthMismatch, "histograms have different bin counts");
  }
  double d = 0.0;
  for (std::size_t m = 0; m < h.size(); ++m) {
    const double p = h[m];
    const double q = h2[m];
    const double sum = p + q;
    if (sum <= 0.0) {
      continue;
    }
    const double tp = p > 0.0 ? p * std::log(2.0 * p / sum) : 0.0;
    const double tq = q > 0.0 ? q * std::log(2.0 * q / sum) : 0.0;
    d += tp + tq;  // one addition per bin keeps d(h, g) == d(g, h) bit for bit
  }
  // Rounding can leave -0 or a tiny negative on near-equal inputs.
  return std::max(d, 0.0);
}

double jsd_distance(const ColorHistogram& h, const ColorHistogram& h2) {
  return jsd_distance(std::span<const double>(h.bins), std::span<const double>(h2.bins));
}

double texture_distance(std::span<const double> a, std::span<const double> b,
                        const std::vector<std::size_t>& retained) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch, "texture vectors have different lengths");
  }
  double sq = 0.0;
  for (const std::size_t j : retained) {
    if (j >= a.size()) {
      throw Error(ErrorKind::LengthMismatch, "retained column " + std::to_string(j) + " out of range");
    }
    const double d = a[j] - b[j];
    sq += d * d;
  }
  return std::sqrt(sq);
}

ExternalNormalization external_normalize_profile(std::span<const double> raw) {
  if (raw.size() < 2) {
    throw Error(ErrorKind::TooFewCandidates, "external normalization needs at least 2 distances");
  }
  ExternalNormalization out;
  const auto n = static_cast<double>(raw.size());
  out.mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
  double sq = 0.0;
  for (const double d : raw) {
    sq += (d - out.mean) * (d - out.mean);
  }
  out.stddev = std::sqrt(sq / n);

  out.normalized.resize(raw.size());
  out.unclamped.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = out.stddev > 0.0 ? 0.5 * (1.0 + (raw[i] - out.mean) / (3.0 * out.stddev)) : 0.5;
    out.unclamped[i] = v;
    out.normalized[i] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

std::vector<double> external_normalize(std::span<const double> raw) {
  return external_normalize_profile(raw).normalized;
}

double fuse(double texture_star, double color_star, const FusionWeights& weights) {
  weights.validate();
  return weights.texture * texture_star + weights.color * color_star;
}

DistanceProfile distance_profile(const ImageFeatures& query, const RetrievalIndex& index,
                                 const FusionWeights& weights) {
  weights.validate();
  const std::size_t n = index.size();
  if (n == 0) {
    throw Error(ErrorKind::EmptyIndex, "index has no rows");
  }
  if (query.texture.size() != index.texture_columns() || query.color.bins.size() != index.color_columns()) {
    throw Error(ErrorKind::LengthMismatch, "query features do not match the index layout");
  }

  DistanceProfile profile;
  profile.texture.raw.resize(n);
  profile.color.raw.resize(n);
  const std::vector<double> q = apply_column_stats(query.texture, index.stats);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> row = apply_column_stats(index.texture_row(i), index.stats);
    profile.texture.raw[i] = texture_distance(q, row, index.retained);
    profile.color.raw[i] = jsd_distance(query.color.bins, index.color_row(i));
  }

  const auto normalize = [n](ChannelDistances& channel) {
    if (n < 2) {
      // A single candidate has no spread; it sits at the midpoint.
      channel.normalized.assign(n, 0.5);
      channel.unclamped.assign(n, 0.5);
      return;
    }
    ExternalNormalization e = external_normalize_profile(channel.raw);
    channel.mean = e.mean;
    channel.stddev = e.stddev;
    channel.normalized = std::move(e.normalized);
    channel.unclamped = std::move(e.unclamped);
  };
  normalize(profile.texture);
  normalize(profile.color);

  profile.effective_weights = index.retained.empty() ? FusionWeights{0.0, 1.0} : weights;
  profile.fused.resize(n);
  profile.fused_unclamped.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    profile.fused[i] = fuse(profile.texture.normalized[i], profile.color.normalized[i], profile.effective_weights);
    profile.fused_unclamped[i] = profile.effective_weights.texture * profile.texture.unclamped[i] +
                                 profile.effective_weights.color * profile.color.unclamped[i];
  }
  return profile;
}

std::vector<RankedResult> rank(const ImageFeatures& query, const RetrievalIndex& index, std::size_t k,
                               const FusionWeights& weights) {
  if (k == 0) {
    throw Error(ErrorKind::InvalidParams, "k must be >= 1");
  }
  const DistanceProfile profile = distance_profile(query, index, weights);
  const std::size_t n = index.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (profile.fused[a] != profile.fused[b]) {
                        return profile.fused[a] < profile.fused[b];
                      }
                      if (profile.fused_unclamped[a] != profile.fused_unclamped[b]) {
                        return profile.fused_unclamped[a] < profile.fused_unclamped[b];
                      }
                      return a < b;
                    });

  std::vector<RankedResult> results;
  results.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const std::size_t i = order[r];
    RankedResult res;
    res.row = i;
    res.path = i < index.matrix.paths.size() ? index.matrix.paths[i] : std::string{};
    res.label = i < index.matrix.labels.size() ? index.matrix.labels[i] : std::string{};
    res.texture_raw = profile.texture.raw[i];
    res.color_raw = profile.color.raw[i];
    res.texture_star = profile.texture.normalized[i];
    res.color_star = profile.color.normalized[i];
    res.fused = profile.fused[i];
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace mfir
