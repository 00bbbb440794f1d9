#pragma once

// Exact ground truth, recall scoring, the benchmark driver, and the
// statistical validation suites.
//
// Ground-truth CSV: header "query_id,rank,set_id,distance"; rank is 1-based.
// Bench CSV: one row per configuration, columns
//   mode,bloom_size,wta,access,min_count,candidates,queries,
//   mean_query_ms,brute_query_ms,speedup,
//   mean_stage1,mean_stage2,mean_exact_evals,max_exact_evals,brute_exact_evals,
//   recall_at_<k>... (one per requested k)

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biovss/core.hpp"
#include "biovss/dataio.hpp"
#include "biovss/search.hpp"

namespace biovss {

struct GroundTruthRow {
  SetId query_id = 0;
  std::vector<Hit> hits;  // exact top-k, ascending distance then id

  friend bool operator==(const GroundTruthRow&, const GroundTruthRow&) = default;
};

using GroundTruth = std::vector<GroundTruthRow>;

/// Exhaustive exact top-k. Sets `truncated` when fewer than k sets exist.
SearchResult brute_force_topk(const VectorSet& query, const Database& db, SetMetric metric, std::size_t k,
                              std::optional<SetId> exclude = std::nullopt);

/// |first k of result ∩ first k of truth| / |first k of truth|.
/// Rejects k larger than the truth row's depth.
double recall_at_k(std::span<const Hit> result, const GroundTruthRow& truth, std::size_t k);

/// Query sets plus whether each query's own id is excluded from its candidates.
struct QueryBatch {
  std::vector<VectorSet> sets;
  bool in_corpus = false;
};

/// `count` distinct sets drawn uniformly from the corpus, in ascending ordinal order.
QueryBatch in_corpus_queries(const Database& db, std::size_t count, std::uint64_t seed);
QueryBatch external_queries(const Database& queries);

GroundTruth compute_ground_truth(const Database& db, const QueryBatch& queries, SetMetric metric, std::size_t k);

void write_ground_truth_csv(const GroundTruth& truth, std::ostream& out);
GroundTruth read_ground_truth_csv(std::istream& in);

enum class SearchMode { kExact, kBioVss, kBioVssPlusPlus };
SearchMode parse_search_mode(std::string_view name);
std::string_view to_string(SearchMode mode);

struct BenchGrid {
  std::vector<SearchMode> modes{SearchMode::kBioVssPlusPlus};
  std::vector<std::size_t> code_lengths{1024};
  std::vector<std::size_t> active_bits{64};
  std::vector<std::size_t> access{3};
  std::vector<std::uint32_t> min_counts{1};
  std::vector<std::size_t> candidates{50000};
  std::vector<std::size_t> ks{3, 5};
  SetMetric metric = SetMetric::kHausdorff;
  BuildOptions build;  // code_length and active_bits are taken from the grid
};

struct BenchRow {
  SearchMode mode = SearchMode::kBioVssPlusPlus;
  std::size_t code_length = 0;
  std::size_t active_bits = 0;
  std::size_t access = 0;
  std::uint32_t min_count = 0;
  std::size_t candidates = 0;
  std::size_t queries = 0;
  double mean_query_ms = 0;
  double brute_query_ms = 0;
  double speedup = 0;
  double mean_stage1 = 0;
  double mean_stage2 = 0;
  double mean_exact_evals = 0;
  std::size_t max_exact_evals = 0;
  std::size_t brute_exact_evals = 0;
  std::vector<double> recall;  // aligned with BenchReport::ks
};

struct BenchReport {
  std::vector<std::size_t> ks;
  std::vector<BenchRow> rows;
};

/// Runs every grid configuration over the queries, sequentially. Rejects
/// ground truth that does not cover the queries to depth max(ks).
BenchReport run_benchmark(const Database& db, const QueryBatch& queries, const GroundTruth& truth,
                          const BenchGrid& grid);

void write_bench_csv(const BenchReport& report, std::ostream& out);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Spearman between cosine similarity and code overlap |h(a) & h(b)| over
/// `pairs` unit-vector pairs whose cosine is drawn uniformly from [0, 1].
double lsh_monotonicity(const ProjectionMatrix& projection, std::size_t active_bits, std::size_t pairs,
                        std::uint64_t seed);

/// Spearman between sketch AND-popcount and connectivity for one fixed query
/// set against `pairs` distinct other sets.
double connectivity_collision_correlation(const Database& db, const ProjectionMatrix& projection,
                                          std::size_t active_bits, std::size_t query_ordinal,
                                          std::size_t pairs, std::uint64_t seed);

struct SuiteCheck {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

struct SuiteOptions {
  std::uint64_t seed = 7;
  std::size_t code_length = 1024;
  std::size_t active_bits = 64;
  std::size_t lsh_pairs = 2000;
  std::size_t connectivity_pairs = 500;
  std::size_t tail_trials = 100000;
  std::vector<double> tail_s{0.3, 0.5, 0.7};
  std::vector<std::size_t> tail_hashes{16, 64};
  SyntheticOptions corpus{.num_sets = 2000};
  TrainingOptions training{.epochs = 5};
};

/// LSH monotonicity (random and trained projections), tail bounds, and
/// collision-connectivity correlation, with pass/fail per check.
std::vector<SuiteCheck> statistical_suites(const SuiteOptions& options);

}  // namespace biovss
