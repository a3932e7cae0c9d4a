#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mfir/color_histogram.hpp"
#include "mfir/feature_matrix.hpp"
#include "mfir/fusion.hpp"
#include "mfir/gabor.hpp"
#include "mfir/rough_set.hpp"

namespace mfir {

inline constexpr std::uint32_t kIndexVersion = 1;
inline constexpr char kIndexMagic[] = "MFIR1\n";  // 6 bytes on disk, no terminator
inline constexpr std::size_t kDefaultReductBins = 4;

/*
  Persisted corpus. The matrix stores raw (unnormalized) features: the first
  2*M*N columns are Gabor statistics, the remaining kColorBins columns the
  colour histogram. Stats cover the texture columns only; `retained` lists the
  texture columns kept by attribute reduction.
*/
struct RetrievalIndex {
  std::uint32_t version = kIndexVersion;
  GaborBankParams params;
  std::size_t analysis_side = kDefaultAnalysisSide;
  std::string histogram_scheme = kHistogramScheme;
  std::size_t reduct_bins = kDefaultReductBins;
  double gamma_full = 0.0;
  double gamma_reduct = 0.0;
  FeatureMatrix matrix;
  ColumnStats stats;
  std::vector<std::size_t> retained;

  std::size_t size() const noexcept { return matrix.rows; }
  std::size_t texture_columns() const noexcept { return params.texture_length(); }
  std::size_t color_columns() const noexcept { return kColorBins; }

  std::span<const double> texture_row(std::size_t i) const { return matrix.row(i).first(texture_columns()); }
  std::span<const double> color_row(std::size_t i) const { return matrix.row(i).subspan(texture_columns()); }

  // Throws Error{CorruptIndex} (or UnsupportedVersion) on any violated invariant.
  void validate() const;

  friend bool operator==(const RetrievalIndex&, const RetrievalIndex&) = default;
};

struct BuildSummary {
  std::size_t images = 0;
  std::size_t skipped = 0;  // files with an image extension that failed to decode
  ReductResult reduct;
};

/*
  Fits ColumnStats and the texture reduct on `training` and stores `database`
  as the searchable rows. Both matrices use the full texture + colour layout
  and must carry labels.
*/
RetrievalIndex assemble_index(const FeatureMatrix& training, const FeatureMatrix& database,
                              const GaborBankParams& params, std::size_t bins,
                              std::size_t side = kDefaultAnalysisSide, ReductResult* reduct = nullptr);

// Re-runs discretization and greedy reduction on the index rows.
ReductResult recompute_reduct(RetrievalIndex& index, std::size_t bins);

// Image files under root (recursively), sorted by relative path.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& root);

// Label = name of the immediate parent directory.
std::string label_for(const std::filesystem::path& relative_path);

RetrievalIndex build_index(const std::filesystem::path& image_root, const GaborBankParams& params,
                           std::size_t bins = kDefaultReductBins, BuildSummary* summary = nullptr,
                           std::size_t side = kDefaultAnalysisSide);

void save_index(const RetrievalIndex& index, const std::filesystem::path& path);
RetrievalIndex load_index(const std::filesystem::path& path);

std::vector<std::uint8_t> serialize_index(const RetrievalIndex& index);
RetrievalIndex deserialize_index(std::span<const std::uint8_t> bytes);

}  // namespace mfir
