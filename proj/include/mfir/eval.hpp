#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfir/fusion.hpp"
#include "mfir/gabor.hpp"
#include "mfir/index_store.hpp"

namespace mfir {

struct SyntheticCorpusOptions {
  std::size_t side = 128;
  double noise_sigma = 0.05;
};

/*
  Writes classes x per_class PNG images into out/class_NN/img_NNN.png. Class c
  is a sinusoidal grating at orientation c*pi/classes with its own frequency
  and hue; every image gets a random phase and Gaussian pixel noise. Output
  depends only on the arguments.
*/
void generate_synthetic_corpus(std::size_t classes, std::size_t per_class, std::uint64_t seed,
                               const std::filesystem::path& out, const SyntheticCorpusOptions& options = {});

// Frequency (cycles/pixel) of synthetic class c out of `classes`.
double synthetic_class_frequency(std::size_t c, std::size_t classes) noexcept;

struct LabeledQuery {
  ImageFeatures features;
  std::string label;
  std::string path;
};

// Share of the first min(k, n) results, after dropping the query's own path,
// that carry query_label.
double precision_at_k(const std::vector<RankedResult>& results, const std::string& query_label,
                      const std::string& query_path, std::size_t k);

// True when query_label strictly outnumbers every other label among the
// first k non-self results.
bool majority_vote_correct(const std::vector<RankedResult>& results, const std::string& query_label,
                           const std::string& query_path, std::size_t k);

struct AccuracySummary {
  double overall_accuracy = 0.0;
  double mean_precision_at_k = 0.0;
};

AccuracySummary evaluate_queries(const RetrievalIndex& index, const std::vector<LabeledQuery>& queries, std::size_t k,
                                 const FusionWeights& weights);

double overall_accuracy(const RetrievalIndex& index, const std::vector<LabeledQuery>& queries, std::size_t k,
                        const FusionWeights& weights);

// Every row of the index as a query against the index itself.
std::vector<LabeledQuery> queries_from_index(const RetrievalIndex& index);

struct ExperimentSpec {
  std::vector<std::size_t> training_sizes{3, 6, 12};  // per class
  std::vector<std::size_t> database_sizes{60, 90};    // total
  std::size_t k = 10;
  std::uint64_t seed = 42;
  FusionWeights weights;
  GaborBankParams params;
  std::size_t bins = kDefaultReductBins;

  void validate() const;
};

struct AccuracyRow {
  std::size_t training_size = 0;
  std::size_t database_size = 0;
  double overall_accuracy = 0.0;
  double mean_precision_at_k = 0.0;

  friend bool operator==(const AccuracyRow&, const AccuracyRow&) = default;
};

struct AccuracyReport {
  std::vector<AccuracyRow> rows;
};

/*
  One row per (training size t, database size s). For each s every class is
  shuffled once; the database takes s images spread evenly over the classes
  from the tail of each shuffle and the training set takes the first t per
  class, so training sets grow by nesting and never overlap the database.
  Training rows fit the column stats and reduct; database rows are searched,
  each one queried with itself excluded.
*/
AccuracyReport run_experiment(const ExperimentSpec& spec, const std::filesystem::path& corpus);

void write_report(const AccuracyReport& report, std::ostream& out);

}  // namespace mfir
