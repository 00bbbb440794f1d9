#include "biovss/search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

namespace biovss {

void SearchParams::validate() const {
  require(code_length >= 1, "search: bloom size must be >= 1");
  require(access >= 1 && access <= code_length,
          "search: access (A) must lie in [1, " + std::to_string(code_length) + "]");
  require(active_bits >= 1 && active_bits <= code_length,
          "search: wta (L) must lie in [1, " + std::to_string(code_length) + "]");
  require(k >= 1, "search: topk must be >= 1");
  require(k <= candidates, "search: topk (" + std::to_string(k) + ") exceeds candidates (" +
                               std::to_string(candidates) + ")");
}

namespace {

std::size_t code_hamming(const SparseBinaryCode& a, const SparseBinaryCode& b) {
  require(a.length() == b.length(), "hamming: code length mismatch");
  const auto& pa = a.positions();
  const auto& pb = b.positions();
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < pa.size() && j < pb.size();) {
    if (pa[i] == pb[j]) {
      ++common, ++i, ++j;
    } else if (pa[i] < pb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return pa.size() + pb.size() - 2 * common;
}

// Keeps the `capacity` smallest (score, id) pairs; returns their ordinals.
class BoundedMaxHeap {
 public:
  using Key = std::pair<std::size_t, SetId>;
  explicit BoundedMaxHeap(std::size_t capacity) : capacity_(capacity) {}

  void offer(Key key, std::size_t ordinal) {
    if (capacity_ == 0) return;
    if (heap_.size() < capacity_) {
      heap_.emplace(key, ordinal);
    } else if (key < heap_.top().first) {
      heap_.pop();
      heap_.emplace(key, ordinal);
    }
  }

  std::vector<std::size_t> drain_ordinals() {
    std::vector<std::size_t> out;
    out.reserve(heap_.size());
    for (; !heap_.empty(); heap_.pop()) out.push_back(heap_.top().second);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t capacity_;
  std::priority_queue<std::pair<Key, std::size_t>> heap_;
};

void check_query(const VectorSet& query, const Database& db) {
  require(query.dim() == db.dim(), "search: query dimension " + std::to_string(query.dim()) +
                                       " does not match database dimension " + std::to_string(db.dim()));
}

std::size_t excluded_ordinal(const SearchParams& params, const Database& db) {
  return params.exclude ? db.find(*params.exclude) : db.size();
}

}  // namespace

std::size_t hamming_hausdorff(std::span<const SparseBinaryCode> query, std::span<const SparseBinaryCode> target) {
  require(!query.empty() && !target.empty(), "hamming_hausdorff: empty code set");
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> row_min(query.size(), kMax), col_min(target.size(), kMax);
  for (std::size_t i = 0; i < query.size(); ++i)
    for (std::size_t j = 0; j < target.size(); ++j) {
      const auto h = code_hamming(query[i], target[j]);
      row_min[i] = std::min(row_min[i], h);
      col_min[j] = std::min(col_min[j], h);
    }
  return std::max(*std::max_element(row_min.begin(), row_min.end()),
                  *std::max_element(col_min.begin(), col_min.end()));
}

SearchResult rerank_exact(const VectorSet& query, const Database& db, std::span<const std::size_t> ordinals,
                          SetMetric metric, std::size_t k) {
  check_query(query, db);
  SearchResult r;
  r.hits.reserve(ordinals.size());
  for (auto o : ordinals) r.hits.push_back({db[o].id(), set_distance(metric, query, db[o])});
  r.exact_evaluations = ordinals.size();
  auto by_distance = [](const Hit& a, const Hit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  };
  if (r.hits.size() > k) {
    std::partial_sort(r.hits.begin(), r.hits.begin() + static_cast<std::ptrdiff_t>(k), r.hits.end(), by_distance);
    r.hits.resize(k);
  } else {
    std::sort(r.hits.begin(), r.hits.end(), by_distance);
  }
  r.truncated = r.hits.size() < k;
  return r;
}

SearchResult biovss_search(const VectorSet& query, const SearchParams& params, const Database& db,
                           const EncodedDatabase& encoded, const ProjectionMatrix& projection) {
  params.validate();
  check_query(query, db);
  require(encoded.sets.size() == db.size(), "biovss: encoded database does not match database");
  require(encoded.code_length == params.code_length && projection.rows() == params.code_length,
          "biovss: bloom size does not match the encoded database");
  require(encoded.active_bits == params.active_bits, "biovss: wta does not match the encoded database");

  const auto query_codes = encode_set(projection, query, params.active_bits);
  const auto skip = excluded_ordinal(params, db);
  const std::size_t budget = std::min(params.candidates, db.size());

  BoundedMaxHeap heap(budget);
  std::size_t scanned = 0;
  for (std::size_t o = 0; o < db.size(); ++o) {
    if (o == skip) continue;
    ++scanned;
    heap.offer({hamming_hausdorff(query_codes, encoded.sets[o]), db[o].id()}, o);
  }
  const auto survivors = heap.drain_ordinals();
  auto r = rerank_exact(query, db, survivors, params.metric, params.k);
  r.stage1_survivors = scanned;
  r.stage2_survivors = survivors.size();
  return r;
}

SearchResult biovss_pp_search(const VectorSet& query, const SearchParams& params, const Database& db,
                              const InvertedIndex& index, std::span<const BinarySketch> sketches,
                              const ProjectionMatrix& projection) {
  params.validate();
  check_query(query, db);
  require(index.length() == params.code_length && projection.rows() == params.code_length,
          "biovss++: bloom size does not match the index");
  require(index.num_sets() == db.size() && sketches.size() == db.size(),
          "biovss++: index does not match database");

  const auto query_codes = encode_set(projection, query, params.active_bits);
  const auto query_counts = build_count_filter(query_codes, params.code_length);
  const auto query_sketch = build_sketch(query_codes, params.code_length);
  const auto skip = excluded_ordinal(params, db);

  // Stage 1: union of the A most populated query positions' posting lists.
  std::vector<char> admitted(db.size(), 0);
  if (params.min_count == 0) {
    // Every set has an implicit count >= 0 at every position.
    std::fill(admitted.begin(), admitted.end(), 1);
  } else {
    std::vector<std::uint32_t> positions(params.code_length);
    std::iota(positions.begin(), positions.end(), 0u);
    const auto& qc = query_counts.counters;
    std::partial_sort(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(params.access),
                      positions.end(), [&](std::uint32_t a, std::uint32_t b) {
                        return qc[a] != qc[b] ? qc[a] > qc[b] : a < b;
                      });
    for (std::size_t i = 0; i < params.access; ++i)
      for (const auto& e : index.list(positions[i])) {
        if (e.count < params.min_count) break;  // lists are count-descending
        admitted[e.set] = 1;
      }
  }
  if (skip < db.size()) admitted[skip] = 0;

  // Stage 2: keep the c sketches nearest the query sketch.
  BoundedMaxHeap heap(std::min(params.candidates, db.size()));
  std::size_t stage1 = 0;
  for (std::size_t o = 0; o < db.size(); ++o) {
    if (!admitted[o]) continue;
    ++stage1;
    heap.offer({sketch_hamming(query_sketch, sketches[o]), db[o].id()}, o);
  }
  const auto survivors = heap.drain_ordinals();

  // Stage 3: exact rerank.
  auto r = rerank_exact(query, db, survivors, params.metric, params.k);
  r.stage1_survivors = stage1;
  r.stage2_survivors = survivors.size();
  return r;
}

}  // namespace biovss
