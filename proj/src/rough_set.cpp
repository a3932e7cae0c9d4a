#include "mfir/rough_set.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>

#include "mfir/error.hpp"

namespace mfir {

namespace {

// Block id per object for the partition induced by `attributes`, numbered by
// first appearance in object order.
std::vector<std::size_t> block_ids(const InformationSystem& sys, const AttributeSet& attributes) {
  const std::size_t n = sys.object_count();
  std::vector<std::size_t> ids(n, 0);
  for (const std::size_t a : attributes) {
    std::map<std::pair<std::size_t, int>, std::size_t> refine;
    for (std::size_t o = 0; o < n; ++o) {
      const auto key = std::make_pair(ids[o], sys.value(o, a));
      const auto [it, inserted] = refine.try_emplace(key, refine.size());
      ids[o] = it->second;
    }
  }
  // Renumber by first appearance so the result does not depend on map order.
  std::unordered_map<std::size_t, std::size_t> renumber;
  for (auto& id : ids) {
    const auto [it, inserted] = renumber.try_emplace(id, renumber.size());
    id = it->second;
  }
  return ids;
}

Partition partition_from_ids(const std::vector<std::size_t>& ids) {
  Partition p;
  p.universe_size = ids.size();
  for (std::size_t o = 0; o < ids.size(); ++o) {
    if (ids[o] >= p.blocks.size()) {
      p.blocks.resize(ids[o] + 1);
    }
    p.blocks[ids[o]].push_back(o);
  }
  return p;
}

// Objects whose condition block carries a single decision value.
std::size_t pure_object_count(const InformationSystem& sys, const std::vector<std::size_t>& ids) {
  constexpr int kUnset = -1;
  constexpr int kMixed = -2;
  std::vector<int> block_decision;
  std::vector<std::size_t> block_size;
  for (std::size_t o = 0; o < ids.size(); ++o) {
    const std::size_t b = ids[o];
    if (b >= block_decision.size()) {
      block_decision.resize(b + 1, kUnset);
      block_size.resize(b + 1, 0);
    }
    ++block_size[b];
    const int d = sys.decision(o);
    if (block_decision[b] == kUnset) {
      block_decision[b] = d;
    } else if (block_decision[b] != d) {
      block_decision[b] = kMixed;
    }
  }
  std::size_t pure = 0;
  for (std::size_t b = 0; b < block_decision.size(); ++b) {
    if (block_decision[b] != kMixed) {
      pure += block_size[b];
    }
  }
  return pure;
}

void check_attributes(const InformationSystem& sys, const AttributeSet& attributes) {
  for (const std::size_t a : attributes) {
    if (a >= sys.attribute_count()) {
      throw Error(ErrorKind::UnknownAttribute, "attribute " + std::to_string(a) + " not in system");
    }
  }
}

}  // namespace

InformationSystem::InformationSystem(std::size_t objects, std::size_t attributes, std::vector<int> codes,
                                     std::vector<int> decision)
    : objects_(objects), attributes_(attributes), codes_(std::move(codes)), decision_(std::move(decision)) {
  if (objects_ == 0) {
    throw Error(ErrorKind::InvalidParams, "information system needs a non-empty universe");
  }
  if (codes_.size() != objects_ * attributes_) {
    throw Error(ErrorKind::LengthMismatch, "value table does not match objects x attributes");
  }
  if (decision_.size() != objects_) {
    throw Error(ErrorKind::MissingLabels, "decision attribute must cover every object");
  }
}

AttributeSet InformationSystem::all_attributes() const {
  AttributeSet all(attributes_);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

std::vector<int> equal_frequency_codes(const std::vector<double>& column, std::size_t bins) {
  if (bins < 2) {
    throw Error(ErrorKind::InvalidParams, "discretization needs at least 2 bins");
  }
  const std::size_t n = column.size();
  std::vector<double> sorted = column;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> codes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto first = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), column[i]) -
                                                sorted.begin());
    codes[i] = static_cast<int>(first * bins / n);
  }
  return codes;
}

InformationSystem discretize(const FeatureMatrix& matrix, std::size_t bins, const std::vector<std::size_t>& columns) {
  if (matrix.rows == 0) {
    throw Error(ErrorKind::InvalidParams, "discretize: matrix has no rows");
  }
  if (matrix.labels.size() != matrix.rows) {
    throw Error(ErrorKind::MissingLabels, "discretize: every row needs a class label");
  }
  std::vector<std::size_t> cols = columns;
  if (cols.empty()) {
    cols.resize(matrix.cols);
    std::iota(cols.begin(), cols.end(), std::size_t{0});
  }
  for (const std::size_t c : cols) {
    if (c >= matrix.cols) {
      throw Error(ErrorKind::UnknownAttribute, "discretize: column " + std::to_string(c) + " out of range");
    }
  }

  std::vector<int> codes(matrix.rows * cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::vector<int> col_codes = equal_frequency_codes(matrix.column(cols[k]), bins);
    for (std::size_t i = 0; i < matrix.rows; ++i) {
      codes[i * cols.size() + k] = col_codes[i];
    }
  }

  std::map<std::string, int> label_ids;
  std::vector<int> decision(matrix.rows);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    const auto [it, inserted] = label_ids.try_emplace(matrix.labels[i], static_cast<int>(label_ids.size()));
    decision[i] = it->second;
  }
  return InformationSystem(matrix.rows, cols.size(), std::move(codes), std::move(decision));
}

Partition indiscernibility_partition(const InformationSystem& sys, const AttributeSet& attributes) {
  check_attributes(sys, attributes);
  return partition_from_ids(block_ids(sys, attributes));
}

Partition decision_partition(const InformationSystem& sys) {
  std::vector<std::size_t> ids(sys.object_count());
  std::unordered_map<int, std::size_t> seen;
  for (std::size_t o = 0; o < ids.size(); ++o) {
    const auto [it, inserted] = seen.try_emplace(sys.decision(o), seen.size());
    ids[o] = it->second;
  }
  return partition_from_ids(ids);
}

ObjectSet lower_approximation(const Partition& part, const ObjectSet& target) {
  ObjectSet out;
  for (const auto& block : part.blocks) {
    if (std::includes(target.begin(), target.end(), block.begin(), block.end())) {
      out.insert(out.end(), block.begin(), block.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ObjectSet positive_region(const Partition& condition, const Partition& decision) {
  ObjectSet out;
  for (const auto& target : decision.blocks) {
    const ObjectSet lower = lower_approximation(condition, target);
    out.insert(out.end(), lower.begin(), lower.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t positive_region_size(const InformationSystem& sys, const AttributeSet& attributes) {
  check_attributes(sys, attributes);
  return pure_object_count(sys, block_ids(sys, attributes));
}

double dependency(const InformationSystem& sys, const AttributeSet& attributes) {
  return static_cast<double>(positive_region_size(sys, attributes)) / static_cast<double>(sys.object_count());
}

ReductResult greedy_reduct(const InformationSystem& sys) {
  const std::size_t target = positive_region_size(sys, sys.all_attributes());

  std::vector<std::size_t> order;  // insertion order
  std::vector<bool> used(sys.attribute_count(), false);
  std::size_t current = positive_region_size(sys, {});
  while (current < target) {
    std::size_t best_attr = sys.attribute_count();
    std::size_t best_size = 0;
    AttributeSet trial = order;
    for (std::size_t a = 0; a < sys.attribute_count(); ++a) {
      if (used[a]) {
        continue;
      }
      trial.push_back(a);
      const std::size_t size = positive_region_size(sys, trial);
      trial.pop_back();
      if (best_attr == sys.attribute_count() || size > best_size) {
        best_attr = a;
        best_size = size;
      }
    }
    used[best_attr] = true;
    order.push_back(best_attr);
    current = best_size;
  }

  for (std::size_t i = order.size(); i-- > 0;) {
    AttributeSet without = order;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    if (positive_region_size(sys, without) == target) {
      order = std::move(without);
    }
  }

  ReductResult result;
  result.retained = order;
  std::sort(result.retained.begin(), result.retained.end());
  const auto n = static_cast<double>(sys.object_count());
  result.gamma_full = static_cast<double>(target) / n;
  result.gamma_reduct = static_cast<double>(positive_region_size(sys, result.retained)) / n;
  return result;
}

AttributeSet exhaustive_reduct(const InformationSystem& sys) {
  const std::size_t m = sys.attribute_count();
  if (m > kMaxExhaustiveAttributes) {
    throw Error(ErrorKind::TooManyAttributes,
                std::to_string(m) + " attributes exceeds the exhaustive limit of " +
                    std::to_string(kMaxExhaustiveAttributes));
  }
  const std::size_t target = positive_region_size(sys, sys.all_attributes());
  for (std::size_t size = 0; size <= m; ++size) {
    // Lexicographic enumeration of size-combinations of 0..m-1.
    AttributeSet combo(size);
    std::iota(combo.begin(), combo.end(), std::size_t{0});
    while (true) {
      if (positive_region_size(sys, combo) == target) {
        return combo;
      }
      std::size_t i = size;
      while (i > 0 && combo[i - 1] == m - size + i - 1) {
        --i;
      }
      if (i == 0) {
        break;
      }
      ++combo[i - 1];
      for (std::size_t j = i; j < size; ++j) {
        combo[j] = combo[j - 1] + 1;
      }
    }
  }
  return sys.all_attributes();
}

}  // namespace mfir
