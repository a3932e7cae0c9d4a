#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mfir/color_histogram.hpp"
#include "mfir/feature_matrix.hpp"
#include "mfir/gabor.hpp"

namespace mfir {

struct RetrievalIndex;

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population

  friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
};

struct FusionWeights {
  double texture = 0.5;
  double color = 0.5;

  // Throws Error{InvalidWeights} unless both are >= 0 and they sum to 1.
  void validate() const;
};

// Raw features of one image, before any normalization.
struct ImageFeatures {
  TextureVector texture;
  ColorHistogram color;
};

ColumnStats column_stats(const FeatureMatrix& matrix);

// z-scores each column in place of a copy; zero-variance columns become 0.
std::pair<FeatureMatrix, ColumnStats> internal_normalize(const FeatureMatrix& matrix);

std::vector<double> apply_column_stats(std::span<const double> vector, const ColumnStats& stats);

// Jensen-Shannon style divergence with natural log:
//   sum_m H log(2H / (H + H')) + H' log(2H' / (H + H')), with 0 log(.) = 0.
double jsd_distance(std::span<const double> h, std::span<const double> h2);
double jsd_distance(const ColorHistogram& h, const ColorHistogram& h2);

// Euclidean distance over the retained columns only.
double texture_distance(std::span<const double> a, std::span<const double> b, const std::vector<std::size_t>& retained);

struct ExternalNormalization {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> normalized;    // clamped to [0, 1]
  std::vector<double> unclamped;     // 0.5 (1 + (D - mean) / (3 stddev))
};

// Maps D to 0.5 (1 + (D - mean) / (3 stddev)), clamped to [0, 1]; all 0.5
// when stddev is 0. Throws Error{TooFewCandidates} for fewer than 2 inputs.
ExternalNormalization external_normalize_profile(std::span<const double> raw);
std::vector<double> external_normalize(std::span<const double> raw);

double fuse(double texture_star, double color_star, const FusionWeights& weights);

struct ChannelDistances {
  std::vector<double> raw;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> normalized;
  std::vector<double> unclamped;
};

// Every quantity computed for one query against every indexed row.
struct DistanceProfile {
  ChannelDistances texture;
  ChannelDistances color;
  std::vector<double> fused;
  std::vector<double> fused_unclamped;
  FusionWeights effective_weights;
};

struct RankedResult {
  std::size_t row = 0;
  std::string path;
  std::string label;
  double texture_raw = 0.0;
  double color_raw = 0.0;
  double texture_star = 0.0;
  double color_star = 0.0;
  double fused = 0.0;
};

/*
  Normalizes the query texture with the index stats, measures both channels
  against every row, normalizes each channel over all candidates and fuses.
  With an empty retained set the texture channel carries no information and
  the weights fall back to colour only.
*/
DistanceProfile distance_profile(const ImageFeatures& query, const RetrievalIndex& index, const FusionWeights& weights);

/*
  Top-k rows by ascending fused distance. Ties on the fused value are broken
  by the unclamped fused value (clamping at 0 or 1 can merge distinct
  distances), then by row order. k beyond the index size returns every row.
*/
std::vector<RankedResult> rank(const ImageFeatures& query, const RetrievalIndex& index, std::size_t k,
                               const FusionWeights& weights = {});

}  // namespace mfir
