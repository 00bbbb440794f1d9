#pragma once

// Dataset files, synthetic corpora, and persisted index bundles.
//
// Dataset (little-endian): "BVSS", u32 version, u32 dim, u64 set count, then
// per set: u64 id, u32 m, m * dim float32.
//
// Index (little-endian): "BVIX", u32 version, u32 section count, then
// sections of: 4-byte tag, u64 payload length, payload, u32 CRC-32 of payload.
// Sections in order: PARM, PROJ, CBFS (CSR counter matrix), SKCH, INVX, IDS_.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "biovss/core.hpp"
#include "biovss/filter_index.hpp"
#include "biovss/hashing.hpp"

namespace biovss {

inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr std::uint32_t kIndexVersion = 1;

std::vector<std::uint8_t> serialize_dataset(const Database& db);
/// Throws kIntegrity with the failing byte offset on malformed input.
Database deserialize_dataset(std::span<const std::uint8_t> bytes);

/// Reads the binary format, or JSON lines ({"id": n, "vectors": [[...], ...]})
/// when the file does not start with the dataset magic.
Database read_dataset(const std::filesystem::path& path);
void write_dataset(const Database& db, const std::filesystem::path& path);

struct SyntheticOptions {
  std::size_t num_sets = 1000;
  std::size_t min_cardinality = 2;
  std::size_t max_cardinality = 8;
  std::size_t dim = 64;
  std::size_t num_clusters = 20;
  double spread = 0.1;  // per-component noise std-dev before renormalization
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  Database db;
  std::vector<std::uint32_t> cluster;  // per set, by ordinal
};

/// Clustered corpus: centers uniform on the unit sphere; each set draws one
/// center and its vectors are normalize(center + spread * N(0, I)). Set ids
/// equal ordinals.
SyntheticCorpus generate_synthetic(const SyntheticOptions& options);

struct IndexParams {
  std::uint32_t code_length = 1024;
  std::uint32_t active_bits = 64;
  std::uint64_t seed = 0;
  Provenance provenance = Provenance::kRandomSparse;
  std::uint32_t dim = 0;

  friend bool operator==(const IndexParams&, const IndexParams&) = default;
};

struct IndexBundle {
  IndexParams params;
  ProjectionMatrix projection;
  std::vector<CountBloomFilter> filters;
  std::vector<BinarySketch> sketches;
  InvertedIndex index;
  std::vector<SetId> ids;  // database ids by ordinal

  friend bool operator==(const IndexBundle&, const IndexBundle&) = default;
};

struct BuildOptions {
  std::size_t code_length = 1024;
  std::size_t active_bits = 64;
  std::uint64_t seed = 0;
  double density = kDefaultProjectionDensity;
  bool train = false;
  TrainingOptions training;  // used when train is set; its seed is overridden by `seed`
};

struct BuildTimings {
  double training_s = 0;
  double hashing_s = 0;
  double count_filters_s = 0;
  double sketches_s = 0;
  double inverted_index_s = 0;
};

IndexBundle build_index(const Database& db, const BuildOptions& options, BuildTimings* timings = nullptr);

/// Throws kInvalidArgument naming the first mismatch between bundle and database.
void check_compatible(const IndexBundle& bundle, const Database& db);

std::vector<std::uint8_t> serialize_index(const IndexBundle& bundle);
IndexBundle deserialize_index(std::span<const std::uint8_t> bytes);
void save_index(const IndexBundle& bundle, const std::filesystem::path& path);
IndexBundle load_index(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace biovss
