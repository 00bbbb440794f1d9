#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "biovss/dataio.hpp"
#include "biovss/error.hpp"
#include "biovss/eval.hpp"
#include "biovss/filter_index.hpp"
#include "biovss/search.hpp"
#include "support.hpp"

using namespace biovss;

namespace {

struct Fixture {
  Database db;
  ProjectionMatrix w;
  EncodedDatabase encoded;
  std::vector<CountBloomFilter> filters;
  std::vector<BinarySketch> sketches;
  InvertedIndex index;
  std::size_t b, l;

  Fixture(Database d, std::size_t b_, std::size_t l_, std::uint64_t seed)
      : db(std::move(d)), w(random_projection(seed, b_, db.dim())), b(b_), l(l_) {
    encoded = encode_database(db, w, l);
    filters = build_count_filters(encoded, b);
    sketches = build_sketches(encoded, b);
    index = build_inverted_index(filters);
  }

  SearchParams params(std::size_t k, std::size_t a, std::uint32_t m, std::size_t c) const {
    SearchParams p;
    p.k = k;
    p.access = a;
    p.min_count = m;
    p.candidates = c;
    p.code_length = b;
    p.active_bits = l;
    return p;
  }

  SearchResult pp(const VectorSet& q, const SearchParams& p) const {
    return biovss_pp_search(q, p, db, index, sketches, w);
  }
  SearchResult linear(const VectorSet& q, const SearchParams& p) const {
    return biovss_search(q, p, db, encoded, w);
  }
};

Database clustered(std::size_t n, std::uint64_t seed, double spread) {
  SyntheticOptions o;
  o.num_sets = n;
  o.seed = seed;
  o.spread = spread;
  return generate_synthetic(o).db;
}

std::vector<SetId> ids(const SearchResult& r) {
  std::vector<SetId> v;
  for (const auto& h : r.hits) v.push_back(h.id);
  return v;
}

std::vector<SetId> ids(const std::vector<std::pair<double, SetId>>& r) {
  std::vector<SetId> v;
  for (const auto& h : r) v.push_back(h.second);
  return v;
}

}  // namespace

TEST(HammingHausdorff, Basics) {
  std::vector<SparseBinaryCode> a{SparseBinaryCode(16, {1, 2, 3}), SparseBinaryCode(16, {4, 5, 6})};
  EXPECT_EQ(hamming_hausdorff(a, a), 0u);
  std::vector<SparseBinaryCode> x{SparseBinaryCode(16, {1, 2, 3})}, y{SparseBinaryCode(16, {2, 3, 9})};
  EXPECT_EQ(hamming_hausdorff(x, y), 2u);
  std::vector<SparseBinaryCode> z{SparseBinaryCode(8, {1})};
  EXPECT_THROW(hamming_hausdorff(x, z), Error);
}

TEST(HammingHausdorff, MatchesTripleLoop) {
  std::mt19937_64 rng(2);
  const auto w = random_projection(2, 128, 8);
  for (int t = 0; t < 200; ++t) {
    const auto q = encode_set(w, biovss::testing::random_set(rng, 0, 1 + t % 6, 8), 10);
    const auto v = encode_set(w, biovss::testing::random_set(rng, 1, 1 + t % 4, 8), 10);
    const double ref = biovss::testing::naive_hausdorff(q.size(), v.size(), [&](std::size_t i, std::size_t j) {
      return static_cast<double>(biovss::testing::naive_bit_hamming(q[i], v[j]));
    });
    ASSERT_EQ(static_cast<double>(hamming_hausdorff(q, v)), ref);
  }
}

TEST(SearchParams, Validation) {
  SearchParams p;
  p.candidates = 10;
  EXPECT_NO_THROW(p.validate());
  auto bad = p;
  bad.access = 0;
  EXPECT_THROW(bad.validate(), Error);
  bad = p;
  bad.access = p.code_length + 1;
  EXPECT_THROW(bad.validate(), Error);
  bad = p;
  bad.k = 11;
  EXPECT_THROW(bad.validate(), Error);
  bad = p;
  bad.k = 0;
  EXPECT_THROW(bad.validate(), Error);
  bad = p;
  bad.active_bits = p.code_length + 1;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Search, OpenPipelinesEqualBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    Fixture f(biovss::testing::random_database(rng, 150, 8, 12), 128, 8, seed);
    for (int qi = 0; qi < 5; ++qi) {
      const auto q = biovss::testing::random_set(rng, 99, 1 + qi, 12);
      for (std::size_t k : {1, 3, 5}) {
        const auto truth = ids(biovss::testing::naive_topk(q, f.db, k));
        const auto p = f.params(k, f.b, 0, f.db.size());
        EXPECT_EQ(ids(f.pp(q, p)), truth);
        EXPECT_EQ(ids(f.linear(q, p)), truth);
      }
    }
  }
}

TEST(Search, FullRankingWhenKEqualsN) {
  std::mt19937_64 rng(3);
  Fixture f(biovss::testing::random_database(rng, 40, 5, 8), 64, 8, 3);
  const auto q = biovss::testing::random_set(rng, 5, 3, 8);
  const auto p = f.params(40, 64, 0, 40);
  const auto r = f.linear(q, p);
  EXPECT_EQ(ids(r), ids(biovss::testing::naive_topk(q, f.db, 40)));
  EXPECT_EQ(r.exact_evaluations, 40u);
  EXPECT_FALSE(r.truncated);
}

TEST(Search, OverFilteringYieldsEmptyResult) {
  std::mt19937_64 rng(4);
  Fixture f(biovss::testing::random_database(rng, 60, 5, 8), 64, 8, 4);
  const auto q = biovss::testing::random_set(rng, 5, 3, 8);
  const auto p = f.params(3, 64, static_cast<std::uint32_t>(f.db.max_cardinality() + 1), 60);
  const auto r = f.pp(q, p);
  EXPECT_TRUE(r.hits.empty());
  EXPECT_EQ(r.stage1_survivors, 0u);
  EXPECT_TRUE(r.truncated);
}

TEST(Search, BudgetInvariants) {
  const Fixture f(clustered(800, 5, 0.2), 512, 32, 5);
  std::mt19937_64 rng(5);
  for (std::size_t c : {1, 10, 50, 200}) {
    for (int t = 0; t < 10; ++t) {
      const auto& q = f.db[rng() % f.db.size()];
      const auto p = f.params(1, 3, 1, c);
      const auto r = f.pp(q, p);
      EXPECT_LE(r.exact_evaluations, c);
      EXPECT_LE(r.stage2_survivors, c);
      EXPECT_LE(r.stage2_survivors, r.stage1_survivors);
      EXPECT_EQ(r.exact_evaluations, r.stage2_survivors);
      const auto l = f.linear(q, p);
      EXPECT_LE(l.exact_evaluations, c);
      EXPECT_TRUE(std::is_sorted(r.hits.begin(), r.hits.end(),
                                 [](const Hit& a, const Hit& b) { return a.distance < b.distance; }));
    }
  }
}

TEST(Search, CandidateSetsNestInBudget) {
  const Fixture f(clustered(600, 6, 0.2), 512, 32, 6);
  for (std::size_t qi = 0; qi < 20; ++qi) {
    const auto& q = f.db[qi * 29];
    std::set<SetId> prev;
    for (std::size_t c : {5, 20, 80, 320}) {
      // With k = c the rerank returns the whole candidate set.
      const auto r = f.pp(q, f.params(c, 4, 1, c));
      std::set<SetId> cur;
      for (const auto& h : r.hits) cur.insert(h.id);
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST(Search, LinearScanRecallOnClusteredCorpus) {
  const Fixture f(clustered(1000, 8, 0.2), 1024, 64, 8);
  const auto queries = in_corpus_queries(f.db, 100, 8);
  double total = 0;
  for (const auto& q : queries.sets) {
    auto p = f.params(5, 3, 1, 100);
    p.exclude = q.id();
    const auto r = f.linear(q, p);
    const auto truth = brute_force_topk(q, f.db, SetMetric::kHausdorff, 5, q.id());
    total += recall_at_k(r.hits, GroundTruthRow{q.id(), truth.hits}, 5);
  }
  EXPECT_GE(total / queries.sets.size(), 0.95);
}

TEST(Search, ExcludeRemovesQuerySet) {
  std::mt19937_64 rng(9);
  Fixture f(biovss::testing::random_database(rng, 50, 4, 8), 64, 8, 9);
  const auto& q = f.db[7];
  auto p = f.params(3, 64, 0, 50);
  EXPECT_EQ(f.pp(q, p).hits.front().id, q.id());
  EXPECT_EQ(f.pp(q, p).hits.front().distance, 0.0);
  p.exclude = q.id();
  for (const auto& r : {f.pp(q, p), f.linear(q, p)})
    for (const auto& h : r.hits) EXPECT_NE(h.id, q.id());
}

TEST(Search, DeterministicAndMetricRouted) {
  std::mt19937_64 rng(10);
  Fixture f(biovss::testing::random_database(rng, 100, 6, 8), 128, 16, 10);
  const auto q = biovss::testing::random_set(rng, 1, 4, 8);
  auto p = f.params(5, 128, 0, 100);
  EXPECT_EQ(f.pp(q, p), f.pp(q, p));
  p.metric = SetMetric::kMeanMin;
  const auto r = f.pp(q, p);
  EXPECT_EQ(ids(r), ids(biovss::testing::naive_topk(q, f.db, 5, SetMetric::kMeanMin)));
  for (const auto& h : r.hits) EXPECT_EQ(h.distance, mean_min(q, f.db[f.db.find(h.id)]));
}

TEST(Search, RejectsMismatchedInputs) {
  std::mt19937_64 rng(11);
  Fixture f(biovss::testing::random_database(rng, 20, 4, 8), 64, 8, 11);
  const auto wrong_dim = biovss::testing::random_set(rng, 1, 2, 9);
  EXPECT_THROW(f.pp(wrong_dim, f.params(3, 3, 1, 20)), Error);
  EXPECT_THROW(f.linear(wrong_dim, f.params(3, 3, 1, 20)), Error);
  const auto q = biovss::testing::random_set(rng, 1, 2, 8);
  auto p = f.params(3, 3, 1, 20);
  p.active_bits = 9;
  EXPECT_THROW(f.linear(q, p), Error);
  p.active_bits = 8;
  p.code_length = 128;
  EXPECT_THROW(f.pp(q, p), Error);
}

TEST(Search, BudgetLargerThanCorpusIsClamped) {
  std::mt19937_64 rng(12);
  Fixture f(biovss::testing::random_database(rng, 20, 4, 8), 64, 8, 12);
  const auto q = biovss::testing::random_set(rng, 1, 2, 8);
  const auto r = f.linear(q, f.params(30, 3, 1, 50000));
  EXPECT_EQ(r.hits.size(), 20u);
  EXPECT_TRUE(r.truncated);
}
