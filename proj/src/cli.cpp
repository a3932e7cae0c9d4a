#include "mfir/cli.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfir/error.hpp"
#include "mfir/eval.hpp"
#include "mfir/features.hpp"
#include "mfir/index_store.hpp"

namespace mfir {

namespace fs = std::filesystem;

namespace {

struct CliConfig {
  std::string index_path;
  std::string root;
  std::string query;
  std::string out;
  std::size_t k = 10;
  std::string weights = "0.5,0.5";
  GaborBankParams params;
  std::size_t bins = kDefaultReductBins;
  std::uint64_t seed = 42;
  std::size_t classes = 5;
  std::size_t per_class = 20;
  std::string train_sizes = "3,6,12";
  std::string db_sizes = "60,90";
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    parts.push_back(item);
  }
  return parts;
}

FusionWeights parse_weights(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) {
    throw Error(ErrorKind::InvalidWeights, "--weights expects two comma-separated numbers, got '" + text + "'");
  }
  FusionWeights w;
  try {
    std::size_t used = 0;
    w.texture = std::stod(parts[0], &used);
    if (used != parts[0].size()) {
      throw std::invalid_argument(parts[0]);
    }
    w.color = std::stod(parts[1], &used);
    if (used != parts[1].size()) {
      throw std::invalid_argument(parts[1]);
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidWeights, "cannot parse --weights '" + text + "'");
  }
  w.validate();
  return w;
}

std::vector<std::size_t> parse_sizes(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> sizes;
  for (const auto& part : split(text, ',')) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size() || v == 0) {
      throw Error(ErrorKind::InvalidParams, flag + " expects positive comma-separated integers, got '" + text + "'");
    }
    sizes.push_back(v);
  }
  if (sizes.empty()) {
    throw Error(ErrorKind::InvalidParams, flag + " is empty");
  }
  return sizes;
}

void print_retained(std::ostream& out, const std::vector<std::size_t>& retained) {
  out << "retained";
  for (const std::size_t r : retained) {
    out << '\t' << r;
  }
  out << '\n';
}

int cmd_index(const CliConfig& cfg, std::ostream& out) {
  if (cfg.bins < 2) {
    throw Error(ErrorKind::InvalidParams, "--bins must be >= 2");
  }
  BuildSummary summary;
  const RetrievalIndex index = build_index(cfg.root, cfg.params, cfg.bins, &summary);
  save_index(index, cfg.out);
  out << std::fixed << std::setprecision(6);
  out << "rows\t" << index.size() << '\n';
  out << "columns\t" << index.matrix.cols << '\n';
  out << "texture_columns\t" << index.texture_columns() << '\n';
  out << "color_columns\t" << index.color_columns() << '\n';
  out << "skipped\t" << summary.skipped << '\n';
  out << "gamma_full\t" << index.gamma_full << '\n';
  out << "gamma_reduct\t" << index.gamma_reduct << '\n';
  print_retained(out, index.retained);
  return 0;
}

int cmd_query(const CliConfig& cfg, std::ostream& out) {
  const FusionWeights weights = parse_weights(cfg.weights);
  if (cfg.k < 1) {
    throw Error(ErrorKind::InvalidParams, "--k must be >= 1");
  }
  const RetrievalIndex index = load_index(cfg.index_path);
  const FeatureExtractor extractor(index.params, index.analysis_side);
  const ImageFeatures query = extractor.extract(fs::path(cfg.query));
  const auto results = rank(query, index, cfg.k, weights);
  out << std::fixed << std::setprecision(6);
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& res = results[r];
    out << (r + 1) << '\t' << res.fused << '\t' << res.texture_star << '\t' << res.color_star << '\t' << res.label
        << '\t' << res.path << '\n';
  }
  return 0;
}

int cmd_reduce(const CliConfig& cfg, std::ostream& out) {
  if (cfg.bins < 2) {
    throw Error(ErrorKind::InvalidParams, "--bins must be >= 2");
  }
  RetrievalIndex index = load_index(cfg.index_path);
  const ReductResult reduct = recompute_reduct(index, cfg.bins);
  save_index(index, cfg.index_path);
  out << std::fixed << std::setprecision(6);
  out << "gamma_full\t" << reduct.gamma_full << '\n';
  out << "gamma_reduct\t" << reduct.gamma_reduct << '\n';
  print_retained(out, reduct.retained);
  return 0;
}

int cmd_evaluate(const CliConfig& cfg, std::ostream& out) {
  ExperimentSpec spec;
  spec.training_sizes = parse_sizes(cfg.train_sizes, "--train-sizes");
  spec.database_sizes = parse_sizes(cfg.db_sizes, "--db-sizes");
  spec.k = cfg.k;
  spec.seed = cfg.seed;
  spec.weights = parse_weights(cfg.weights);
  spec.params = cfg.params;
  spec.bins = cfg.bins;
  const AccuracyReport report = run_experiment(spec, cfg.root);
  if (!cfg.out.empty()) {
    std::ofstream file(cfg.out);
    if (!file) {
      throw Error(ErrorKind::IoError, "cannot write " + cfg.out);
    }
    write_report(report, file);
    if (!file) {
      throw Error(ErrorKind::IoError, "write failed for " + cfg.out);
    }
  }
  write_report(report, out);
  return 0;
}

int cmd_synth(const CliConfig& cfg, std::ostream& out) {
  generate_synthetic_corpus(cfg.classes, cfg.per_class, cfg.seed, cfg.out);
  out << "images\t" << cfg.classes * cfg.per_class << '\n';
  out << "classes\t" << cfg.classes << '\n';
  out << "out\t" << cfg.out << '\n';
  return 0;
}

void add_gabor_flags(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--scales", cfg.params.scales, "Gabor scales M")->capture_default_str();
  cmd->add_option("--orientations", cfg.params.orientations, "Gabor orientations N")->capture_default_str();
  cmd->add_option("--ulow", cfg.params.u_low, "Lowest centre frequency (cycles/pixel)")->capture_default_str();
  cmd->add_option("--uhigh", cfg.params.u_high, "Highest centre frequency (cycles/pixel)")->capture_default_str();
  cmd->add_option("--radius", cfg.params.kernel_radius, "Kernel radius in pixels")->capture_default_str();
  cmd->add_option("--bins", cfg.bins, "Discretization bins for attribute reduction")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Texture + colour fusion image retrieval with rough-set feature reduction", "mfir"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto* index_cmd = app.add_subcommand("index", "Build an index from a directory of labelled images");
  index_cmd->add_option("--root", cfg.root, "Image root; class label = parent directory")->required();
  index_cmd->add_option("--out", cfg.out, "Index file to write")->required();
  add_gabor_flags(index_cmd, cfg);

  auto* query_cmd = app.add_subcommand("query", "Rank indexed images against a query image");
  query_cmd->add_option("--index", cfg.index_path, "Index file")->required();
  query_cmd->add_option("--query", cfg.query, "Query image")->required();
  query_cmd->add_option("--k", cfg.k, "Results to print")->capture_default_str();
  query_cmd->add_option("--weights", cfg.weights, "Texture,colour fusion weights")->capture_default_str();

  auto* reduce_cmd = app.add_subcommand("reduce", "Recompute the attribute reduct stored in an index");
  reduce_cmd->add_option("--index", cfg.index_path, "Index file (rewritten in place)")->required();
  reduce_cmd->add_option("--bins", cfg.bins, "Discretization bins")->capture_default_str();

  auto* eval_cmd = app.add_subcommand("evaluate", "Accuracy sweep over training and database sizes");
  eval_cmd->add_option("--root", cfg.root, "Labelled corpus directory")->required();
  eval_cmd->add_option("--train-sizes", cfg.train_sizes, "Training images per class")->capture_default_str();
  eval_cmd->add_option("--db-sizes", cfg.db_sizes, "Database sizes (total images)")->capture_default_str();
  eval_cmd->add_option("--k", cfg.k, "Retrieval depth")->capture_default_str();
  eval_cmd->add_option("--seed", cfg.seed, "Sampling seed")->capture_default_str();
  eval_cmd->add_option("--weights", cfg.weights, "Texture,colour fusion weights")->capture_default_str();
  eval_cmd->add_option("--out", cfg.out, "Also write the TSV report here");
  add_gabor_flags(eval_cmd, cfg);

  auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic grating corpus");
  synth_cmd->add_option("--classes", cfg.classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--per-class", cfg.per_class, "Images per class")->capture_default_str();
  synth_cmd->add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--out", cfg.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (index_cmd->parsed()) {
      return cmd_index(cfg, out);
    }
    if (query_cmd->parsed()) {
      return cmd_query(cfg, out);
    }
    if (reduce_cmd->parsed()) {
      return cmd_reduce(cfg, out);
    }
    if (eval_cmd->parsed()) {
      return cmd_evaluate(cfg, out);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(cfg, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("mfir");
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mfir
