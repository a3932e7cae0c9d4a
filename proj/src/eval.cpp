#include "mfir/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "mfir/error.hpp"
#include "mfir/features.hpp"
#include "mfir/parallel.hpp"

namespace mfir {

namespace fs = std::filesystem;

namespace {

Rgb hsv_to_rgb(double hue_deg, double s, double v) {
  const double c = v * s;
  const double hp = std::fmod(hue_deg, 360.0) / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  Rgb rgb{0.0, 0.0, 0.0};
  if (hp < 1.0) {
    rgb = {c, x, 0.0};
  } else if (hp < 2.0) {
    rgb = {x, c, 0.0};
  } else if (hp < 3.0) {
    rgb = {0.0, c, x};
  } else if (hp < 4.0) {
    rgb = {0.0, x, c};
  } else if (hp < 5.0) {
    rgb = {x, 0.0, c};
  } else {
    rgb = {c, 0.0, x};
  }
  const double m = v - c;
  return {rgb[0] + m, rgb[1] + m, rgb[2] + m};
}

std::string zero_pad(std::size_t value, int width) {
  std::ostringstream os;
  os << std::setw(width) << std::setfill('0') << value;
  return os.str();
}

std::vector<const RankedResult*> without_self(const std::vector<RankedResult>& results, const std::string& query_path,
                                              std::size_t k) {
  std::vector<const RankedResult*> kept;
  for (const auto& r : results) {
    if (kept.size() == k) {
      break;
    }
    if (!query_path.empty() && r.path == query_path) {
      continue;
    }
    kept.push_back(&r);
  }
  return kept;
}

}  // namespace

double synthetic_class_frequency(std::size_t c, std::size_t classes) noexcept {
  if (classes < 2) {
    return 0.1;
  }
  return 0.08 + 0.16 * static_cast<double>(c) / static_cast<double>(classes - 1);
}

void generate_synthetic_corpus(std::size_t classes, std::size_t per_class, std::uint64_t seed, const fs::path& out,
                               const SyntheticCorpusOptions& options) {
  if (classes < 2 || per_class < 2) {
    throw Error(ErrorKind::InvalidParams, "synthetic corpus needs >= 2 classes and >= 2 images per class");
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    throw Error(ErrorKind::IoError, "cannot create " + out.string() + ": " + ec.message());
  }
  using std::numbers::pi;
  const std::size_t side = options.side;

  parallel_for(classes * per_class, [&](std::size_t job) {
    const std::size_t c = job / per_class;
    const std::size_t i = job % per_class;
    const double theta = static_cast<double>(c) * pi / static_cast<double>(classes);
    const double freq = synthetic_class_frequency(c, classes);
    const Rgb tint = hsv_to_rgb(360.0 * static_cast<double>(c) / static_cast<double>(classes), 0.8, 1.0);

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * pi);
    std::normal_distribution<double> noise(0.0, options.noise_sigma);
    const double phase = phase_dist(rng);

    RgbImage img(side, side);
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) {
        const double u = static_cast<double>(x) * cs + static_cast<double>(y) * sn;
        const double level = 0.5 + 0.35 * std::cos(2.0 * pi * freq * u + phase);
        Rgb& px = img.at(x, y);
        for (std::size_t ch = 0; ch < 3; ++ch) {
          px[ch] = std::clamp(level * tint[ch] + noise(rng), 0.0, 1.0);
        }
      }
    }
    const fs::path dir = out / ("class_" + zero_pad(c, 2));
    std::error_code dir_ec;
    fs::create_directories(dir, dir_ec);
    if (dir_ec) {
      throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + dir_ec.message());
    }
    save_png(img, dir / ("img_" + zero_pad(i, 3) + ".png"));
  });
}

double precision_at_k(const std::vector<RankedResult>& results, const std::string& query_label,
                      const std::string& query_path, std::size_t k) {
  if (k == 0) {
    throw Error(ErrorKind::InvalidParams, "k must be >= 1");
  }
  const auto kept = without_self(results, query_path, k);
  if (kept.empty()) {
    return 0.0;
  }
  const auto hits = std::count_if(kept.begin(), kept.end(), [&](const RankedResult* r) { return r->label == query_label; });
  return static_cast<double>(hits) / static_cast<double>(kept.size());
}

bool majority_vote_correct(const std::vector<RankedResult>& results, const std::string& query_label,
                           const std::string& query_path, std::size_t k) {
  std::map<std::string, std::size_t> votes;
  for (const RankedResult* r : without_self(results, query_path, k)) {
    ++votes[r->label];
  }
  const std::size_t own = votes.contains(query_label) ? votes[query_label] : 0;
  if (own == 0) {
    return false;
  }
  return std::all_of(votes.begin(), votes.end(),
                     [&](const auto& kv) { return kv.first == query_label || kv.second < own; });
}

AccuracySummary evaluate_queries(const RetrievalIndex& index, const std::vector<LabeledQuery>& queries, std::size_t k,
                                 const FusionWeights& weights) {
  if (index.size() == 0) {
    throw Error(ErrorKind::EmptyIndex, "index has no rows");
  }
  if (queries.empty()) {
    throw Error(ErrorKind::InvalidParams, "no queries");
  }
  std::vector<char> correct(queries.size(), 0);
  std::vector<double> precision(queries.size(), 0.0);
  parallel_for(queries.size(), [&](std::size_t q) {
    const LabeledQuery& query = queries[q];
    // One extra slot so dropping the self match still leaves k results.
    const auto results = rank(query.features, index, k + 1, weights);
    correct[q] = majority_vote_correct(results, query.label, query.path, k) ? 1 : 0;
    precision[q] = precision_at_k(results, query.label, query.path, k);
  });
  AccuracySummary summary;
  const auto n = static_cast<double>(queries.size());
  summary.overall_accuracy = static_cast<double>(std::count(correct.begin(), correct.end(), 1)) / n;
  double total = 0.0;
  for (const double p : precision) {
    total += p;
  }
  summary.mean_precision_at_k = total / n;
  return summary;
}

double overall_accuracy(const RetrievalIndex& index, const std::vector<LabeledQuery>& queries, std::size_t k,
                        const FusionWeights& weights) {
  return evaluate_queries(index, queries, k, weights).overall_accuracy;
}

std::vector<LabeledQuery> queries_from_index(const RetrievalIndex& index) {
  std::vector<LabeledQuery> queries;
  queries.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    LabeledQuery q;
    const auto tex = index.texture_row(i);
    const auto col = index.color_row(i);
    q.features.texture.assign(tex.begin(), tex.end());
    q.features.color.bins.assign(col.begin(), col.end());
    q.label = index.matrix.labels[i];
    q.path = index.matrix.paths[i];
    queries.push_back(std::move(q));
  }
  return queries;
}

void ExperimentSpec::validate() const {
  if (training_sizes.empty() || database_sizes.empty()) {
    throw Error(ErrorKind::InvalidParams, "experiment needs at least one training and one database size");
  }
  const auto positive = [](std::size_t v) { return v >= 1; };
  if (!std::all_of(training_sizes.begin(), training_sizes.end(), positive) ||
      !std::all_of(database_sizes.begin(), database_sizes.end(), positive)) {
    throw Error(ErrorKind::InvalidParams, "experiment sizes must be >= 1");
  }
  if (k < 1) {
    throw Error(ErrorKind::InvalidParams, "k must be >= 1");
  }
  weights.validate();
  params.validate();
}

AccuracyReport run_experiment(const ExperimentSpec& spec, const fs::path& corpus) {
  spec.validate();
  const std::vector<fs::path> files = list_images(corpus);
  if (files.empty()) {
    throw Error(ErrorKind::InsufficientCorpus, "no images under " + corpus.string());
  }

  const FeatureExtractor extractor(spec.params);
  const fs::path root_abs = fs::absolute(corpus).lexically_normal();
  std::vector<std::vector<double>> rows(files.size());
  parallel_for(files.size(), [&](std::size_t i) { rows[i] = feature_row(extractor.extract(corpus / files[i])); });

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < files.size(); ++i) {
    by_class[label_for((root_abs / files[i]).lexically_normal())].push_back(i);
  }
  const std::size_t classes = by_class.size();
  const std::size_t max_t = *std::max_element(spec.training_sizes.begin(), spec.training_sizes.end());

  const auto quota = [classes](std::size_t s, std::size_t c) { return s / classes + (c < s % classes ? 1 : 0); };
  for (const std::size_t s : spec.database_sizes) {
    std::size_t c = 0;
    for (const auto& [label, members] : by_class) {
      if (members.size() < max_t + quota(s, c)) {
        throw Error(ErrorKind::InsufficientCorpus,
                    "class " + label + " has " + std::to_string(members.size()) + " images; need " +
                        std::to_string(max_t + quota(s, c)));
      }
      ++c;
    }
  }

  const std::size_t cols = spec.params.texture_length() + kColorBins;
  const auto gather = [&](const std::vector<std::size_t>& ids) {
    FeatureMatrix m(0, cols);
    for (const std::size_t id : ids) {
      m.values.insert(m.values.end(), rows[id].begin(), rows[id].end());
      m.labels.push_back(label_for((root_abs / files[id]).lexically_normal()));
      m.paths.push_back(files[id].generic_string());
      ++m.rows;
    }
    return m;
  };

  std::map<std::pair<std::size_t, std::size_t>, AccuracyRow> cells;
  for (const std::size_t s : spec.database_sizes) {
    std::vector<std::vector<std::size_t>> shuffled;
    std::size_t c = 0;
    for (const auto& [label, members] : by_class) {
      std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                        static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(c)};
      std::mt19937_64 rng(seq);
      std::vector<std::size_t> order = members;
      std::shuffle(order.begin(), order.end(), rng);
      shuffled.push_back(std::move(order));
      ++c;
    }

    std::vector<std::size_t> db_ids;
    for (std::size_t k = 0; k < shuffled.size(); ++k) {
      const auto& order = shuffled[k];
      db_ids.insert(db_ids.end(), order.end() - static_cast<std::ptrdiff_t>(quota(s, k)), order.end());
    }
    const FeatureMatrix database = gather(db_ids);

    for (const std::size_t t : spec.training_sizes) {
      std::vector<std::size_t> train_ids;
      for (const auto& order : shuffled) {
        train_ids.insert(train_ids.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t));
      }
      const RetrievalIndex index =
          assemble_index(gather(train_ids), database, spec.params, spec.bins, extractor.side());
      const AccuracySummary summary = evaluate_queries(index, queries_from_index(index), spec.k, spec.weights);
      cells[{t, s}] = AccuracyRow{t, s, summary.overall_accuracy, summary.mean_precision_at_k};
    }
  }

  AccuracyReport report;
  for (const std::size_t t : spec.training_sizes) {
    for (const std::size_t s : spec.database_sizes) {
      report.rows.push_back(cells.at({t, s}));
    }
  }
  return report;
}

void write_report(const AccuracyReport& report, std::ostream& out) {
  out << "training_size\tdb_size\toverall_accuracy\tmean_precision_at_k\n";
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::fixed << std::setprecision(6);
  for (const auto& row : report.rows) {
    out << row.training_size << '\t' << row.database_size << '\t' << row.overall_accuracy << '\t'
        << row.mean_precision_at_k << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace mfir
