#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfir/feature_matrix.hpp"

namespace mfir {



using ObjectSet = std::vector<std::size_t>;     // sorted object ids
using AttributeSet = std::vector<std::size_t>;  // sorted attribute ids

/*
  Discrete attribute-value system S = (U, A, V, f) with a decision attribute.
  Objects are 0..object_count-1 and attributes 0..attribute_count-1; codes are
  stored row-major (one row per object).
*/
class InformationSystem {
 public:
  InformationSystem(std::size_t objects, std::size_t attributes, std::vector<int> codes,
                    std::vector<int> decision);

  std::size_t object_count() const noexcept { return objects_; }
  std::size_t attribute_count() const noexcept { return attributes_; }
  int value(std::size_t object, std::size_t attribute) const { return codes_[object * attributes_ + attribute]; }
  int decision(std::size_t object) const { return decision_[object]; }
  const std::vector<int>& decisions() const noexcept { return decision_; }

  AttributeSet all_attributes() const;

 private:
  std::size_t objects_;
  std::size_t attributes_;
  std::vector<int> codes_;
  std::vector<int> decision_;
};

/*
  Equivalence classes of U. Blocks are sorted internally and ordered by their
  smallest member.
*/
struct Partition {
  std::vector<ObjectSet> blocks;
  std::size_t universe_size = 0;
};

struct ReductResult {
  AttributeSet retained;
  double gamma_full = 0.0;
  double gamma_reduct = 0.0;
};

/*
  Equal-frequency discretization of each column of `matrix` (restricted to
  `columns` when non-empty) into codes 0..bins-1. A value's code is
  floor(rank * bins / rows), where rank is the position of the first
  occurrence of that value in the sorted column, so equal values share a
  code. Labels become the decision attribute, mapped to integers in order of
  first appearance of each distinct label.
*/
InformationSystem discretize(const FeatureMatrix& matrix, std::size_t bins,
                             const std::vector<std::size_t>& columns = {});

// Codes for a single column under the rule above.
std::vector<int> equal_frequency_codes(const std::vector<double>& column, std::size_t bins);

Partition indiscernibility_partition(const InformationSystem& sys, const AttributeSet& attributes);

// Partition of U by the decision attribute.
Partition decision_partition(const InformationSystem& sys);

ObjectSet lower_approximation(const Partition& part, const ObjectSet& target);

ObjectSet positive_region(const Partition& condition, const Partition& decision);

// |pos_P(D)| / |U|.
double dependency(const InformationSystem& sys, const AttributeSet& attributes);

// |pos_P(D)|; the exact quantity behind dependency().
std::size_t positive_region_size(const InformationSystem& sys, const AttributeSet& attributes);

/*
  Forward selection by largest dependency gain (ties to the lower attribute
  id) until the dependency of the full attribute set is reached, then one
  backward pass in reverse insertion order dropping attributes whose removal
  keeps the dependency unchanged.
*/
ReductResult greedy_reduct(const InformationSystem& sys);

// Minimum-cardinality subset with full dependency, first in
// (size, lexicographic) order. Throws Error{TooManyAttributes} for |A| > 16.
AttributeSet exhaustive_reduct(const InformationSystem& sys);

inline constexpr std::size_t kMaxExhaustiveAttributes = 16;

}  // namespace mfir
