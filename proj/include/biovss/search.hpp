#pragma once

// Query pipelines: the linear binary-code scan and the two-stage
// inverted-index + sketch cascade, both finished by an exact rerank.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "biovss/core.hpp"
#include "biovss/filter_index.hpp"
#include "biovss/hashing.hpp"

namespace biovss {

struct SearchParams {
  std::size_t k = 3;
  std::size_t access = 3;        // A: inverted lists visited
  std::uint32_t min_count = 1;   // M: minimum stored count to admit a set
  std::size_t candidates = 50000;  // c: sets surviving to the exact rerank
  std::size_t active_bits = 64;  // L_wta
  std::size_t code_length = 1024;  // b
  SetMetric metric = SetMetric::kHausdorff;
  // Set removed from the candidate pool, e.g. an in-corpus query's own entry.
  std::optional<SetId> exclude;

  /// Checks 1 <= A <= b, 1 <= k <= c, 1 <= L <= b.
  void validate() const;
};

struct Hit {
  SetId id;
  double distance;
  friend bool operator==(const Hit&, const Hit&) = default;
};

struct SearchResult {
  std::vector<Hit> hits;  // ascending distance, ties by ascending id
  std::size_t stage1_survivors = 0;
  std::size_t stage2_survivors = 0;
  std::size_t exact_evaluations = 0;
  bool truncated = false;  // fewer than k hits were available

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

/// Hausdorff aggregation with Hamming distance between codes as the element metric.
std::size_t hamming_hausdorff(std::span<const SparseBinaryCode> query, std::span<const SparseBinaryCode> target);

/// Exact metric over the given database ordinals; returns the best k.
SearchResult rerank_exact(const VectorSet& query, const Database& db, std::span<const std::size_t> ordinals,
                          SetMetric metric, std::size_t k);

/// Linear scan: Hamming-Hausdorff against every set, keep the c closest, rerank.
SearchResult biovss_search(const VectorSet& query, const SearchParams& params, const Database& db,
                           const EncodedDatabase& encoded, const ProjectionMatrix& projection);

/// Cascade search over prebuilt filters. `sketches` and `index` must be built
/// from `db` with the same projection and active-bit count.
SearchResult biovss_pp_search(const VectorSet& query, const SearchParams& params, const Database& db,
                              const InvertedIndex& index, std::span<const BinarySketch> sketches,
                              const ProjectionMatrix& projection);

}  // namespace biovss
