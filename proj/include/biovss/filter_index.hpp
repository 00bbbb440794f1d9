#pragma once

// Per-set count Bloom filters, binary sketches, the inverted index over
// counter positions, and sparse storage layouts for the filter matrix.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "biovss/bits.hpp"
#include "biovss/hashing.hpp"

namespace biovss {

/// counters[i] = number of member codes with bit i set.
struct CountBloomFilter {
  std::vector<std::uint32_t> counters;

  std::size_t length() const noexcept { return counters.size(); }
  std::uint64_t total() const noexcept;

  friend bool operator==(const CountBloomFilter&, const CountBloomFilter&) = default;
};

/// OR of a set's member codes.
using BinarySketch = BitVector;

CountBloomFilter build_count_filter(std::span<const SparseBinaryCode> codes, std::size_t length);
BinarySketch build_sketch(std::span<const SparseBinaryCode> codes, std::size_t length);

std::vector<CountBloomFilter> build_count_filters(const EncodedDatabase& encoded, std::size_t length);
std::vector<BinarySketch> build_sketches(const EncodedDatabase& encoded, std::size_t length);

inline std::size_t sketch_hamming(const BinarySketch& a, const BinarySketch& b) { return hamming(a, b); }

/// Per-position posting lists. Entries reference sets by database ordinal,
/// hold count >= 1, and are ordered by count descending then ordinal ascending.
class InvertedIndex {
 public:
  struct Entry {
    std::uint32_t set;
    std::uint32_t count;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  InvertedIndex() = default;
  /// Validates ordering and bounds; used by the builder and by deserialization.
  InvertedIndex(std::size_t num_sets, std::vector<std::vector<Entry>> lists);

  std::size_t length() const noexcept { return lists_.size(); }
  std::size_t num_sets() const noexcept { return num_sets_; }
  std::span<const Entry> list(std::size_t position) const { return lists_.at(position); }
  const std::vector<std::vector<Entry>>& lists() const noexcept { return lists_; }
  std::size_t total_entries() const noexcept;

  friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

 private:
  std::size_t num_sets_ = 0;
  std::vector<std::vector<Entry>> lists_;
};

InvertedIndex build_inverted_index(std::span<const CountBloomFilter> filters);

enum class StoreLayout : std::uint8_t { kDense = 0, kCoo = 1, kCsr = 2 };

StoreLayout parse_store_layout(std::string_view name);
std::string_view to_string(StoreLayout layout);

/// The n x b counter matrix in one of three layouts. Only the arrays of the
/// active layout are populated.
struct SparseStore {
  StoreLayout layout = StoreLayout::kDense;
  std::uint64_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint32_t> dense;         // DENSE: rows * cols
  std::vector<std::uint32_t> coo_rows;      // COO
  std::vector<std::uint32_t> coo_cols;      // COO, CSR column indices live in csr_cols
  std::vector<std::uint64_t> csr_row_ptr;   // CSR: rows + 1
  std::vector<std::uint32_t> csr_cols;      // CSR
  std::vector<std::uint32_t> values;        // COO and CSR nonzero values

  /// Raw array bytes of the active layout (no headers).
  std::size_t byte_size() const noexcept;
  std::size_t nonzeros() const noexcept;

  std::vector<std::uint8_t> serialize() const;
  /// Throws an integrity error on malformed input.
  static SparseStore deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const SparseStore&, const SparseStore&) = default;
};

SparseStore encode_store(std::span<const CountBloomFilter> filters, StoreLayout layout);
/// Throws an integrity error when the store is internally inconsistent.
std::vector<CountBloomFilter> decode_store(const SparseStore& store);

}  // namespace biovss
