// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "biovss/dataio.hpp"
#include "biovss/eval.hpp"
#include "biovss/filter_index.hpp"
#include "biovss/search.hpp"
#include "biovss/theory.hpp"
#include "support.hpp"

using namespace biovss;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Worked metric values on the small distance matrices (rows = query).
Outcome worked_values() {
  const DistanceMatrix qa(2, 2, {1, 6, 5, 3});
  const DistanceMatrix qb(2, 2, {1, 4, 5, 1});
  const DistanceMatrix sym(2, 3, {1, 4, 7, 4, 1, 3});
  const DistanceMatrix sym_t(3, 2, {1, 4, 4, 1, 7, 3});
  const std::vector<std::tuple<const char*, double, double>> checks{
      {"hausdorff(Q,A)", aggregate_hausdorff(qa), 3.0},  {"meanmin(Q,A)", aggregate_mean_min(qa), 2.0},
      {"meanmin(Q,B)", aggregate_mean_min(qb), 1.0},     {"min(Q,A)", aggregate_min(qa), 1.0},
      {"min(Q,B)", aggregate_min(qb), 1.0},              {"hausdorff(Q,A) sym", aggregate_hausdorff(sym), 3.0},
      {"hausdorff(A,Q) sym", aggregate_hausdorff(sym_t), 3.0}, {"meanmin(Q,A) sym", aggregate_mean_min(sym), 1.0},
      {"meanmin(A,Q) sym", aggregate_mean_min(sym_t), 5.0 / 3.0}};
  for (const auto& [name, got, want] : checks)
    if (got != want) return {false, std::string(name) + " = " + fmt("%.17g", got)};
  return {true, std::to_string(checks.size()) + " values exact"};
}

// 2. Fully open cascade equals brute force on 50 seeded corpora.
Outcome open_cascade_equivalence() {
  std::size_t comparisons = 0, mismatches = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 100 + (seed * 397) % 1901;
    const std::size_t dim = 4 + seed % 29;
    const auto db = biovss::testing::random_database(rng, n, 8, dim);
    const auto bundle = build_index(db, {.code_length = 256, .active_bits = 16, .seed = seed});
    for (int qi = 0; qi < 4; ++qi) {
      const auto q = biovss::testing::random_set(rng, 7, 1 + rng() % 8, dim);
      for (std::size_t k : {1, 3, 5}) {
        SearchParams p;
        p.k = k;
        p.code_length = 256;
        p.active_bits = 16;
        p.access = 256;
        p.min_count = 0;
        p.candidates = n;
        const auto got = biovss_pp_search(q, p, db, bundle.index, bundle.sketches, bundle.projection);
        const auto want = brute_force_topk(q, db, SetMetric::kHausdorff, k);
        ++comparisons;
        if (got.hits != want.hits) ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in " + std::to_string(comparisons) +
                               " top-k comparisons"};
}

struct RecallRun {
  double recall3 = 0, recall5 = 0;
  std::size_t max_evals = 0, n = 0, c = 0;
  double pipeline_ms = 0, brute_ms = 0;
};

RecallRun desk_scale_run() {
  const auto db = generate_synthetic({.num_sets = 10000, .min_cardinality = 2, .max_cardinality = 8, .dim = 64,
                                      .num_clusters = 20, .spread = 0.2, .seed = 1})
                      .db;
  const auto bundle = build_index(db, {.code_length = 1024, .active_bits = 64, .seed = 1});
  const auto queries = in_corpus_queries(db, 500, 1);
  RecallRun out;
  out.n = db.size();
  out.c = 1000;
  using Clock = std::chrono::steady_clock;
  for (const auto& q : queries.sets) {
    SearchParams p;
    p.k = 5;
    p.candidates = out.c;
    p.exclude = q.id();
    auto t = Clock::now();
    const auto r = biovss_pp_search(q, p, db, bundle.index, bundle.sketches, bundle.projection);
    out.pipeline_ms += std::chrono::duration<double, std::milli>(Clock::now() - t).count();
    t = Clock::now();
    const auto truth = brute_force_topk(q, db, SetMetric::kHausdorff, 5, q.id());
    out.brute_ms += std::chrono::duration<double, std::milli>(Clock::now() - t).count();
    const GroundTruthRow row{q.id(), truth.hits};
    out.recall3 += recall_at_k(r.hits, row, 3);
    out.recall5 += recall_at_k(r.hits, row, 5);
    out.max_evals = std::max(out.max_evals, r.exact_evaluations);
  }
  out.recall3 /= queries.sets.size();
  out.recall5 /= queries.sets.size();
  return out;
}

// 3. Default parameters on the calibrated clustered corpus.
Outcome desk_scale_recall(const RecallRun& r) {
  return {r.recall3 >= 0.90 && r.recall5 >= 0.85,
          "recall@3 = " + fmt("%.4f", r.recall3) + " (>= 0.90), recall@5 = " + fmt("%.4f", r.recall5) +
              " (>= 0.85) over 500 queries"};
}

// 4. Exact evaluations stay within the candidate budget, itself <= n / 10.
Outcome work_reduction(const RecallRun& r) {
  const double ratio = static_cast<double>(r.c) / r.n;
  return {r.max_evals <= r.c && ratio <= 0.1,
          "max exact evaluations " + std::to_string(r.max_evals) + " <= c = " + std::to_string(r.c) +
              ", c/n = " + fmt("%.3f", ratio) + "; wall-clock speedup " + fmt("%.1fx", r.brute_ms / r.pipeline_ms) +
              " (reported only)"};
}

// 5. Code, filter, index and storage invariants.
Outcome structure_invariants() {
  std::mt19937_64 rng(5);
  const auto w = random_projection(5, 1024, 64);
  std::size_t bad_popcount = 0;
  for (std::size_t l : {16, 32, 48, 64})
    for (int i = 0; i < 250; ++i)
      if (wta_encode(w, biovss::testing::random_vector(rng, 64), l).to_bits().popcount() != l) ++bad_popcount;
  if (bad_popcount) return {false, std::to_string(bad_popcount) + " codes with wrong popcount"};

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto db = generate_synthetic({.num_sets = 1000, .dim = 64, .spread = 0.2, .seed = seed}).db;
    const auto bundle = build_index(db, {.code_length = 1024, .active_bits = 16, .seed = seed});
    const auto& f = bundle.filters;
    for (std::size_t j = 0; j < f.size(); ++j)
      for (std::size_t i = 0; i < 1024; ++i)
        if (bundle.sketches[j].test(i) != (f[j].counters[i] > 0)) return {false, "sketch/count mismatch"};
    std::multiset<std::tuple<std::size_t, std::size_t, std::uint32_t>> a, b;
    for (std::size_t p = 0; p < bundle.index.length(); ++p)
      for (const auto& e : bundle.index.list(p)) a.emplace(p, e.set, e.count);
    for (std::size_t j = 0; j < f.size(); ++j)
      for (std::size_t p = 0; p < 1024; ++p)
        if (f[j].counters[p]) b.emplace(p, j, f[j].counters[p]);
    if (a != b) return {false, "inverted index does not reconstruct the filters"};
    std::size_t bytes[3];
    for (auto layout : {StoreLayout::kDense, StoreLayout::kCoo, StoreLayout::kCsr}) {
      const auto s = encode_store(f, layout);
      if (decode_store(s) != f || SparseStore::deserialize(s.serialize()) != s)
        return {false, std::string(to_string(layout)) + " round trip differs"};
      bytes[static_cast<int>(layout)] = s.byte_size();
    }
    if (!(bytes[2] <= bytes[1] && bytes[1] <= bytes[0])) return {false, "storage ordering violated"};
    if (seed == 4)
      return {true, "1000 codes exact popcount; 5 corpora consistent; bytes dense/coo/csr = " +
                        std::to_string(bytes[0]) + "/" + std::to_string(bytes[1]) + "/" + std::to_string(bytes[2])};
  }
  return {false, "unreachable"};
}

// 6. Analytical quantities.
Outcome theory_suite() {
  using namespace biovss::theory;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t r = 1 + t % 6, c = 1 + (t / 6) % 6;
    std::vector<double> e(r * c);
    for (auto& x : e) x = u(rng);
    const double s = sigma(SimilarityMatrix(r, c, e));
    if (s < *std::min_element(e.begin(), e.end()) || s > *std::max_element(e.begin(), e.end()))
      return {false, "sigma outside [min, max]"};
  }
  for (int i = 1; i <= 8; ++i)
    for (int j = 1; j < 100; ++j) {
      const double s = 0.1 * i;
      const double g = gamma_coefficient(s, s + (1 - s) * j / 100.0);
      const double x = xi_coefficient(s, s * j / 100.0);
      if (!(g > 0 && g < 1 && x > 0 && x < 1)) return {false, "coefficient outside (0, 1)"};
    }
  double worst = -std::numeric_limits<double>::infinity();
  for (double s : {0.3, 0.5, 0.7})
    for (std::size_t l : {16, 64}) {
      const auto sim = tail_bound_simulation(s, l, 100000, {s - 0.2, s - 0.1, s + 0.1, s + 0.2}, 6);
      for (const auto& rows : {sim.upper, sim.lower})
        for (const auto& row : rows) worst = std::max(worst, row.frequency - row.bound - 3 * row.standard_error);
    }
  if (worst > 0) return {false, "tail frequency exceeds bound + 3 SE by " + fmt("%.3g", worst)};
  BoundParams p{.n = 100000, .k = 10, .query_size = 8, .target_size = 8};
  std::uint64_t prev = std::numeric_limits<std::uint64_t>::max();
  for (double d : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    p.delta = d;
    if (required_hash_count(p) > prev) return {false, "hash count increased with delta"};
    prev = required_hash_count(p);
  }
  p.delta = 0.05;
  prev = 0;
  for (std::uint64_t n : {100, 1000, 100000, 10000000}) {
    p.n = n;
    if (required_hash_count(p) < prev) return {false, "hash count decreased with n"};
    prev = required_hash_count(p);
  }
  return {true, "sandwich on 200 matrices; coefficient sweeps in (0,1); worst tail margin " + fmt("%.3g", worst) +
                    "; hash count monotone in delta and n"};
}

// 7. Seeded statistical checks.
Outcome statistical() {
  SuiteOptions o;
  o.corpus.spread = 0.2;
  std::string detail;
  bool pass = true;
  for (const auto& c : statistical_suites(o)) {
    pass = pass && c.pass;
    if (c.name.rfind("tail_bound", 0) == 0) continue;
    if (!detail.empty()) detail += ", ";
    detail += c.name + " = " + fmt("%.3f", c.value) + (c.pass ? "" : " [below threshold]");
  }
  return {pass, detail};
}

// 8. Same seed, same bytes; save/load keeps query results.
Outcome determinism() {
  const auto db = generate_synthetic({.num_sets = 2000, .dim = 32, .spread = 0.2, .seed = 8}).db;
  for (bool train : {false, true}) {
    BuildOptions o{.code_length = 512, .active_bits = 32, .seed = 8, .train = train};
    o.training.batch_size = 1000;
    const auto a = serialize_index(build_index(db, o));
    const auto b = serialize_index(build_index(db, o));
    if (a != b) return {false, std::string(train ? "trained" : "random") + " index bytes differ"};
    const auto before = build_index(db, o);
    const auto after = deserialize_index(a);
    if (!(before == after)) return {false, "load(save(x)) != x"};
    const auto enc_before = encode_database(db, before.projection, 32);
    const auto enc_after = encode_database(db, after.projection, 32);
    SearchParams p;
    p.code_length = 512;
    p.active_bits = 32;
    p.candidates = 100;
    for (std::size_t j = 0; j < 50; ++j) {
      const auto& q = db[j * 37];
      if (biovss_pp_search(q, p, db, before.index, before.sketches, before.projection) !=
              biovss_pp_search(q, p, db, after.index, after.sketches, after.projection) ||
          biovss_search(q, p, db, enc_before, before.projection) != biovss_search(q, p, db, enc_after, after.projection))
        return {false, "search result changed after reload"};
    }
  }
  return {true, "random and trained indexes byte-identical; 200 reloaded queries identical"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %d  %-28s %s  [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
    std::fflush(stdout);
    failures += !o.pass;
  };
  report(1, "worked metric values", worked_values);
  report(2, "open cascade == brute force", open_cascade_equivalence);
  RecallRun run;
  bool ran = false;
  auto get_run = [&]() -> const RecallRun& {
    if (!ran) run = desk_scale_run();
    ran = true;
    return run;
  };
  report(3, "desk-scale recall", [&] { return desk_scale_recall(get_run()); });
  report(4, "work reduction", [&] { return work_reduction(get_run()); });
  report(5, "structure invariants", structure_invariants);
  report(6, "theory suite", theory_suite);
  report(7, "statistical suites", statistical);
  report(8, "determinism & persistence", determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
