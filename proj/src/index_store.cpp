#include "mfir/index_store.hpp"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <optional>

#include <fcntl.h>
#include <unistd.h>

#include <json.hpp>

#include "mfir/error.hpp"
#include "mfir/features.hpp"
#include "mfir/parallel.hpp"

namespace mfir {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kMagicSize = sizeof(kIndexMagic) - 1;

void corrupt_unless(bool ok, const std::string& what) {
  if (!ok) {
    throw Error(ErrorKind::CorruptIndex, what);
  }
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
}

std::uint32_t get_u32(std::span<const std::uint8_t> in) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) {
    v = (v << 8) | in[static_cast<std::size_t>(i)];
  }
  return v;
}

double get_f64(std::span<const std::uint8_t> in) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) {
    bits = (bits << 8) | in[static_cast<std::size_t>(i)];
  }
  return std::bit_cast<double>(bits);
}

FeatureMatrix select_columns(const FeatureMatrix& m, std::size_t first, std::size_t count) {
  FeatureMatrix out(m.rows, count);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      out.at(i, j) = m.at(i, first + j);
    }
  }
  out.labels = m.labels;
  out.paths = m.paths;
  return out;
}

ReductResult fit_reduct(const FeatureMatrix& texture, std::size_t bins) {
  return greedy_reduct(discretize(texture, bins));
}

}  // namespace

void RetrievalIndex::validate() const {
  if (version != kIndexVersion) {
    throw Error(ErrorKind::UnsupportedVersion, "index version " + std::to_string(version));
  }
  try {
    params.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::CorruptIndex, e.what());
  }
  corrupt_unless(analysis_side > 0, "analysis side must be positive");
  corrupt_unless(histogram_scheme == kHistogramScheme, "unknown histogram scheme " + histogram_scheme);
  corrupt_unless(reduct_bins >= 2, "reduct bins must be >= 2");
  corrupt_unless(gamma_full >= 0.0 && gamma_full <= 1.0 && gamma_reduct >= 0.0 && gamma_reduct <= 1.0,
                 "dependency degrees must lie in [0, 1]");

  const std::size_t t = texture_columns();
  corrupt_unless(matrix.rows >= 1, "index has no rows");
  corrupt_unless(matrix.cols == t + color_columns(), "column count does not match the feature layout");
  corrupt_unless(matrix.values.size() == matrix.rows * matrix.cols, "matrix payload size mismatch");
  corrupt_unless(matrix.labels.size() == matrix.rows, "one label per row required");
  corrupt_unless(matrix.paths.size() == matrix.rows, "one path per row required");
  corrupt_unless(std::all_of(matrix.values.begin(), matrix.values.end(), [](double v) { return std::isfinite(v); }),
                 "non-finite feature value");
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    const auto color = color_row(i);
    corrupt_unless(std::all_of(color.begin(), color.end(), [](double v) { return v >= 0.0; }),
                   "negative histogram bin in row " + std::to_string(i));
    const double sum = std::accumulate(color.begin(), color.end(), 0.0);
    corrupt_unless(std::abs(sum - 1.0) <= 1e-9, "histogram in row " + std::to_string(i) + " does not sum to 1");
  }

  corrupt_unless(stats.mean.size() == t && stats.stddev.size() == t, "stats length mismatch");
  corrupt_unless(std::all_of(stats.mean.begin(), stats.mean.end(), [](double v) { return std::isfinite(v); }),
                 "non-finite column mean");
  corrupt_unless(
      std::all_of(stats.stddev.begin(), stats.stddev.end(), [](double v) { return std::isfinite(v) && v >= 0.0; }),
      "invalid column deviation");
  corrupt_unless(std::is_sorted(retained.begin(), retained.end()) &&
                     std::adjacent_find(retained.begin(), retained.end()) == retained.end(),
                 "retained set must be sorted and unique");
  corrupt_unless(retained.empty() || retained.back() < t, "retained column outside texture columns");
}

RetrievalIndex assemble_index(const FeatureMatrix& training, const FeatureMatrix& database,
                              const GaborBankParams& params, std::size_t bins, std::size_t side,
                              ReductResult* reduct) {
  params.validate();
  const std::size_t t = params.texture_length();
  if (training.cols != t + kColorBins || database.cols != t + kColorBins) {
    throw Error(ErrorKind::LengthMismatch, "feature matrices do not match the texture + colour layout");
  }
  if (training.rows == 0 || database.rows == 0) {
    throw Error(ErrorKind::EmptyIndex, "training and database sets must be non-empty");
  }

  const FeatureMatrix texture = select_columns(training, 0, t);
  ReductResult fitted = fit_reduct(texture, bins);

  RetrievalIndex index;
  index.params = params;
  index.analysis_side = side;
  index.reduct_bins = bins;
  index.stats = column_stats(texture);
  index.retained = fitted.retained;
  index.gamma_full = fitted.gamma_full;
  index.gamma_reduct = fitted.gamma_reduct;
  index.matrix = database;
  if (index.matrix.paths.size() != index.matrix.rows) {
    index.matrix.paths.resize(index.matrix.rows);
  }
  if (reduct != nullptr) {
    *reduct = std::move(fitted);
  }
  return index;
}

ReductResult recompute_reduct(RetrievalIndex& index, std::size_t bins) {
  ReductResult fitted = fit_reduct(select_columns(index.matrix, 0, index.texture_columns()), bins);
  index.reduct_bins = bins;
  index.retained = fitted.retained;
  index.gamma_full = fitted.gamma_full;
  index.gamma_reduct = fitted.gamma_reduct;
  return fitted;
}

std::vector<fs::path> list_images(const fs::path& root) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    return out;
  }
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      break;
    }
    if (it->is_regular_file(ec) && is_supported_image_file(it->path())) {
      out.push_back(fs::relative(it->path(), root));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
  return out;
}

std::string label_for(const fs::path& path) {
  return path.parent_path().filename().string();
}

RetrievalIndex build_index(const fs::path& image_root, const GaborBankParams& params, std::size_t bins,
                           BuildSummary* summary, std::size_t side) {
  const std::vector<fs::path> files = list_images(image_root);
  if (files.empty()) {
    throw Error(ErrorKind::NoImagesFound, "no PNG or JPEG images under " + image_root.string());
  }
  const FeatureExtractor extractor(params, side);
  const fs::path root_abs = fs::absolute(image_root).lexically_normal();

  std::vector<std::optional<ImageFeatures>> extracted(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    try {
      extracted[i] = extractor.extract(image_root / files[i]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnreadableFile && e.kind() != ErrorKind::UnsupportedFormat) {
        throw;
      }
    }
  });

  FeatureMatrix matrix;
  matrix.cols = params.texture_length() + kColorBins;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!extracted[i]) {
      ++skipped;
      continue;
    }
    const std::vector<double> row = feature_row(*extracted[i]);
    matrix.values.insert(matrix.values.end(), row.begin(), row.end());
    matrix.paths.push_back(files[i].generic_string());
    // Images directly under the root take the root's own directory name.
    matrix.labels.push_back(label_for((root_abs / files[i]).lexically_normal()));
    ++matrix.rows;
  }
  if (matrix.rows == 0) {
    throw Error(ErrorKind::NoImagesFound, "no decodable images under " + image_root.string());
  }

  ReductResult reduct;
  RetrievalIndex index = assemble_index(matrix, matrix, params, bins, side, &reduct);
  if (summary != nullptr) {
    summary->images = matrix.rows;
    summary->skipped = skipped;
    summary->reduct = std::move(reduct);
  }
  return index;
}

std::vector<std::uint8_t> serialize_index(const RetrievalIndex& index) {
  index.validate();
  json header;
  header["version"] = index.version;
  header["gabor"] = {
      {"scales", index.params.scales},
      {"orientations", index.params.orientations},
      {"u_low", index.params.u_low},
      {"u_high", index.params.u_high},
      {"kernel_radius", index.params.kernel_radius},
  };
  header["analysis_side"] = index.analysis_side;
  header["histogram_scheme"] = index.histogram_scheme;
  header["layout"] = {
      {"rows", index.matrix.rows},
      {"texture_columns", index.texture_columns()},
      {"color_columns", index.color_columns()},
  };
  header["labels"] = index.matrix.labels;
  header["paths"] = index.matrix.paths;
  header["stats"] = {{"mean", index.stats.mean}, {"stddev", index.stats.stddev}};
  header["reduct"] = {
      {"bins", index.reduct_bins},
      {"gamma_full", index.gamma_full},
      {"gamma_reduct", index.gamma_reduct},
      {"retained", index.retained},
  };
  const std::string text = header.dump();

  std::vector<std::uint8_t> out;
  out.reserve(kMagicSize + 4 + text.size() + 8 * index.matrix.values.size());
  out.insert(out.end(), kIndexMagic, kIndexMagic + kMagicSize);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const double v : index.matrix.values) {
    put_f64(out, v);
  }
  return out;
}

RetrievalIndex deserialize_index(std::span<const std::uint8_t> bytes) {
  corrupt_unless(bytes.size() >= kMagicSize + 4, "file too short");
  corrupt_unless(std::equal(kIndexMagic, kIndexMagic + kMagicSize, bytes.begin()), "bad magic");
  const std::uint32_t header_len = get_u32(bytes.subspan(kMagicSize, 4));
  const std::size_t payload_start = kMagicSize + 4 + static_cast<std::size_t>(header_len);
  corrupt_unless(payload_start <= bytes.size(), "truncated header");

  const auto header_bytes = bytes.subspan(kMagicSize + 4, header_len);
  json header = json::parse(header_bytes.begin(), header_bytes.end(), nullptr, false);
  corrupt_unless(!header.is_discarded() && header.is_object(), "header is not a JSON object");

  RetrievalIndex index;
  try {
    index.version = header.at("version").get<std::uint32_t>();
    if (index.version != kIndexVersion) {
      throw Error(ErrorKind::UnsupportedVersion, "index version " + std::to_string(index.version));
    }
    const json& g = header.at("gabor");
    index.params.scales = g.at("scales").get<std::size_t>();
    index.params.orientations = g.at("orientations").get<std::size_t>();
    index.params.u_low = g.at("u_low").get<double>();
    index.params.u_high = g.at("u_high").get<double>();
    index.params.kernel_radius = g.at("kernel_radius").get<std::size_t>();
    index.analysis_side = header.at("analysis_side").get<std::size_t>();
    index.histogram_scheme = header.at("histogram_scheme").get<std::string>();

    const json& layout = header.at("layout");
    const auto rows = layout.at("rows").get<std::size_t>();
    const auto tcols = layout.at("texture_columns").get<std::size_t>();
    const auto ccols = layout.at("color_columns").get<std::size_t>();
    corrupt_unless(tcols == index.params.texture_length() && ccols == kColorBins, "layout does not match params");
    index.matrix.rows = rows;
    index.matrix.cols = tcols + ccols;
    index.matrix.labels = header.at("labels").get<std::vector<std::string>>();
    index.matrix.paths = header.at("paths").get<std::vector<std::string>>();
    index.stats.mean = header.at("stats").at("mean").get<std::vector<double>>();
    index.stats.stddev = header.at("stats").at("stddev").get<std::vector<double>>();
    const json& reduct = header.at("reduct");
    index.reduct_bins = reduct.at("bins").get<std::size_t>();
    index.gamma_full = reduct.at("gamma_full").get<double>();
    index.gamma_reduct = reduct.at("gamma_reduct").get<double>();
    index.retained = reduct.at("retained").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptIndex, std::string("malformed header: ") + e.what());
  }

  const std::size_t count = index.matrix.rows * index.matrix.cols;
  corrupt_unless(index.matrix.cols == 0 || count / index.matrix.cols == index.matrix.rows, "layout overflow");
  corrupt_unless(bytes.size() - payload_start == 8 * count, "payload size does not match layout (truncated?)");
  index.matrix.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    index.matrix.values[i] = get_f64(bytes.subspan(payload_start + 8 * i, 8));
  }
  index.validate();
  return index;
}

void save_index(const RetrievalIndex& index, const fs::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_index(index);
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorKind::IoError, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      const int err = errno;
      ::close(fd);
      throw Error(ErrorKind::IoError, "write failed for " + path.string() + ": " + std::strerror(err));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int err = errno;
    ::close(fd);
    throw Error(ErrorKind::IoError, "fsync failed for " + path.string() + ": " + std::strerror(err));
  }
  if (::close(fd) != 0) {
    throw Error(ErrorKind::IoError, "close failed for " + path.string() + ": " + std::strerror(errno));
  }
}

RetrievalIndex load_index(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open " + path.string());
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::IoError, "read failed for " + path.string());
  }
  return deserialize_index(bytes);
}

}  // namespace mfir
