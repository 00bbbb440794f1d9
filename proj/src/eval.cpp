#include "biovss/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "biovss/theory.hpp"

namespace biovss {

SearchResult brute_force_topk(const VectorSet& query, const Database& db, SetMetric metric, std::size_t k,
                              std::optional<SetId> exclude) {
  require(k >= 1, "brute force: k must be >= 1");
  require(query.dim() == db.dim(), "brute force: dimension mismatch");
  SearchResult r;
  r.hits.reserve(db.size());
  for (const auto& s : db.sets()) {
    if (exclude && s.id() == *exclude) continue;
    r.hits.push_back({s.id(), set_distance(metric, query, s)});
  }
  r.exact_evaluations = r.stage1_survivors = r.stage2_survivors = r.hits.size();
  std::sort(r.hits.begin(), r.hits.end(), [](const Hit& a, const Hit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  });
  r.truncated = r.hits.size() < k;
  if (r.hits.size() > k) r.hits.resize(k);
  return r;
}

double recall_at_k(std::span<const Hit> result, const GroundTruthRow& truth, std::size_t k) {
  require(k >= 1, "recall: k must be >= 1");
  require(k <= truth.hits.size(), "recall: k (" + std::to_string(k) + ") exceeds ground-truth depth (" +
                                      std::to_string(truth.hits.size()) + ")");
  std::vector<SetId> want;
  for (std::size_t i = 0; i < k; ++i) want.push_back(truth.hits[i].id);
  std::sort(want.begin(), want.end());
  std::size_t found = 0;
  for (std::size_t i = 0; i < std::min(k, result.size()); ++i)
    found += std::binary_search(want.begin(), want.end(), result[i].id) ? 1 : 0;
  return static_cast<double>(found) / static_cast<double>(want.size());
}

QueryBatch in_corpus_queries(const Database& db, std::size_t count, std::uint64_t seed) {
  require(count >= 1, "queries: count must be >= 1");
  std::vector<std::size_t> ordinals(db.size());
  std::iota(ordinals.begin(), ordinals.end(), std::size_t{0});
  if (count < db.size()) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> picked;
    std::sample(ordinals.begin(), ordinals.end(), std::back_inserter(picked), count, rng);
    ordinals = std::move(picked);
  }
  QueryBatch q{{}, true};
  for (auto o : ordinals) q.sets.push_back(db[o]);
  return q;
}

QueryBatch external_queries(const Database& queries) { return {queries.sets(), false}; }

GroundTruth compute_ground_truth(const Database& db, const QueryBatch& queries, SetMetric metric, std::size_t k) {
  GroundTruth gt;
  gt.reserve(queries.sets.size());
  for (const auto& q : queries.sets) {
    auto exclude = queries.in_corpus ? std::optional<SetId>(q.id()) : std::nullopt;
    gt.push_back({q.id(), brute_force_topk(q, db, metric, k, exclude).hits});
  }
  return gt;
}

void write_ground_truth_csv(const GroundTruth& truth, std::ostream& out) {
  out << "query_id,rank,set_id,distance\n";
  char buf[64];
  for (const auto& row : truth)
    for (std::size_t i = 0; i < row.hits.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row.hits[i].distance);
      out << row.query_id << ',' << (i + 1) << ',' << row.hits[i].id << ',' << buf << '\n';
    }
}

GroundTruth read_ground_truth_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("query_id,rank,set_id,distance", 0) != 0)
    fail(ErrorKind::kIntegrity, "ground truth: missing header 'query_id,rank,set_id,distance'");
  GroundTruth gt;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    SetId qid = 0, sid = 0;
    std::size_t rank = 0;
    double dist = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(fields >> qid >> c1 >> rank >> c2 >> sid >> c3 >> dist) || c1 != ',' || c2 != ',' || c3 != ',')
      fail(ErrorKind::kIntegrity, "ground truth: malformed line " + std::to_string(line_no));
    if (gt.empty() || gt.back().query_id != qid || rank == 1) {
      if (rank != 1) fail(ErrorKind::kIntegrity, "ground truth: line " + std::to_string(line_no) + " does not start at rank 1");
      gt.push_back({qid, {}});
    }
    if (rank != gt.back().hits.size() + 1)
      fail(ErrorKind::kIntegrity, "ground truth: non-consecutive rank at line " + std::to_string(line_no));
    gt.back().hits.push_back({sid, dist});
  }
  return gt;
}

SearchMode parse_search_mode(std::string_view name) {
  if (name == "exact") return SearchMode::kExact;
  if (name == "biovss") return SearchMode::kBioVss;
  if (name == "biovss++") return SearchMode::kBioVssPlusPlus;
  fail(ErrorKind::kInvalidArgument, "unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(SearchMode mode) {
  switch (mode) {
    case SearchMode::kExact: return "exact";
    case SearchMode::kBioVss: return "biovss";
    case SearchMode::kBioVssPlusPlus: return "biovss++";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

void check_truth_covers(const QueryBatch& queries, const GroundTruth& truth, std::size_t depth) {
  require(truth.size() == queries.sets.size(), "bench: ground truth has " + std::to_string(truth.size()) +
                                                   " queries, expected " + std::to_string(queries.sets.size()));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i].query_id == queries.sets[i].id(),
            "bench: ground truth missing query " + std::to_string(queries.sets[i].id()));
    require(truth[i].hits.size() >= depth, "bench: ground truth for query " + std::to_string(truth[i].query_id) +
                                               " is shallower than k=" + std::to_string(depth));
  }
}

}  // namespace

BenchReport run_benchmark(const Database& db, const QueryBatch& queries, const GroundTruth& truth,
                          const BenchGrid& grid) {
  require(!queries.sets.empty(), "bench: no queries");
  require(!grid.ks.empty(), "bench: no k values");
  const std::size_t depth = *std::max_element(grid.ks.begin(), grid.ks.end());
  check_truth_covers(queries, truth, depth);

  auto exclude_for = [&](const VectorSet& q) {
    return queries.in_corpus ? std::optional<SetId>(q.id()) : std::nullopt;
  };

  // Brute-force reference timing.
  auto t = Clock::now();
  std::size_t brute_evals = 0;
  for (const auto& q : queries.sets)
    brute_evals = std::max(brute_evals, brute_force_topk(q, db, grid.metric, depth, exclude_for(q)).exact_evaluations);
  const double brute_ms = ms_since(t) / static_cast<double>(queries.sets.size());

  BenchReport report;
  report.ks = grid.ks;

  auto score = [&](BenchRow& row, const std::vector<SearchResult>& results, double total_ms) {
    const double nq = static_cast<double>(results.size());
    row.queries = results.size();
    row.mean_query_ms = total_ms / nq;
    row.brute_query_ms = brute_ms;
    row.speedup = row.mean_query_ms > 0 ? brute_ms / row.mean_query_ms : 0.0;
    row.brute_exact_evals = brute_evals;
    row.recall.assign(grid.ks.size(), 0.0);
    double stage1 = 0, stage2 = 0, evals = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      stage1 += static_cast<double>(r.stage1_survivors);
      stage2 += static_cast<double>(r.stage2_survivors);
      evals += static_cast<double>(r.exact_evaluations);
      row.max_exact_evals = std::max(row.max_exact_evals, r.exact_evaluations);
      for (std::size_t j = 0; j < grid.ks.size(); ++j) row.recall[j] += recall_at_k(r.hits, truth[i], grid.ks[j]);
    }
    row.mean_stage1 = stage1 / nq;
    row.mean_stage2 = stage2 / nq;
    row.mean_exact_evals = evals / nq;
    for (auto& rec : row.recall) rec /= nq;
  };

  if (std::find(grid.modes.begin(), grid.modes.end(), SearchMode::kExact) != grid.modes.end()) {
    BenchRow row;
    row.mode = SearchMode::kExact;
    row.candidates = db.size();
    std::vector<SearchResult> results;
    t = Clock::now();
    for (const auto& q : queries.sets) results.push_back(brute_force_topk(q, db, grid.metric, depth, exclude_for(q)));
    score(row, results, ms_since(t));
    report.rows.push_back(std::move(row));
  }

  for (auto b : grid.code_lengths)
    for (auto L : grid.active_bits) {
      auto build = grid.build;
      build.code_length = b;
      build.active_bits = L;
      const auto bundle = build_index(db, build);
      std::optional<EncodedDatabase> encoded;
      for (auto mode : grid.modes) {
        if (mode == SearchMode::kExact) continue;
        if (mode == SearchMode::kBioVss && !encoded) encoded = encode_database(db, bundle.projection, L);
        for (auto A : grid.access)
          for (auto M : grid.min_counts)
            for (auto c : grid.candidates) {
              // The linear scan has no inverted-list stage.
              if (mode == SearchMode::kBioVss && (A != grid.access.front() || M != grid.min_counts.front())) continue;
              SearchParams p{depth, A, M, c, L, b, grid.metric, std::nullopt};
              BenchRow row{mode, b, L, A, M, c};
              std::vector<SearchResult> results;
              results.reserve(queries.sets.size());
              t = Clock::now();
              for (const auto& q : queries.sets) {
                p.exclude = exclude_for(q);
                results.push_back(mode == SearchMode::kBioVss
                                      ? biovss_search(q, p, db, *encoded, bundle.projection)
                                      : biovss_pp_search(q, p, db, bundle.index, bundle.sketches, bundle.projection));
              }
              score(row, results, ms_since(t));
              report.rows.push_back(std::move(row));
            }
      }
    }
  return report;
}

void write_bench_csv(const BenchReport& report, std::ostream& out) {
  out << "mode,bloom_size,wta,access,min_count,candidates,queries,mean_query_ms,brute_query_ms,speedup,"
         "mean_stage1,mean_stage2,mean_exact_evals,max_exact_evals,brute_exact_evals";
  for (auto k : report.ks) out << ",recall_at_" << k;
  out << '\n';
  char buf[512];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%u,%zu,%zu,%.6f,%.6f,%.3f,%.3f,%.3f,%.3f,%zu,%zu",
                  std::string(to_string(r.mode)).c_str(), r.code_length, r.active_bits, r.access, r.min_count,
                  r.candidates, r.queries, r.mean_query_ms, r.brute_query_ms, r.speedup, r.mean_stage1,
                  r.mean_stage2, r.mean_exact_evals, r.max_exact_evals, r.brute_exact_evals);
    out << buf;
    for (double rec : r.recall) {
      std::snprintf(buf, sizeof buf, ",%.6f", rec);
      out << buf;
    }
    out << '\n';
  }
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> unit_gaussian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(d);
  double n = 0;
  for (double& x : v) {
    x = g(rng);
    n += x * x;
  }
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

}  // namespace

// A constant sample has no ranking; it scores 0 so threshold checks fail closed.
double spearman(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "spearman: need two equal-length samples of size >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mean = (static_cast<double>(x.size()) + 1.0) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double lsh_monotonicity(const ProjectionMatrix& projection, std::size_t active_bits, std::size_t pairs,
                        std::uint64_t seed) {
  require(pairs >= 2, "lsh monotonicity: need at least two pairs");
  const std::size_t d = projection.cols();
  require(d >= 2, "lsh monotonicity: dimension must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cosine_dist(0.0, 1.0);
  std::vector<double> cosines, overlaps;
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto a = unit_gaussian(d, rng);
    auto u = unit_gaussian(d, rng);
    // Gram-Schmidt u against a, then mix to the target cosine.
    double dot = 0;
    for (std::size_t i = 0; i < d; ++i) dot += a[i] * u[i];
    double n = 0;
    for (std::size_t i = 0; i < d; ++i) {
      u[i] -= dot * a[i];
      n += u[i] * u[i];
    }
    n = std::sqrt(n);
    const double c = cosine_dist(rng);
    const double s = std::sqrt(1.0 - c * c);
    std::vector<float> fa(d), fb(d);
    double actual = 0;
    for (std::size_t i = 0; i < d; ++i) {
      fa[i] = static_cast<float>(a[i]);
      fb[i] = static_cast<float>(c * a[i] + s * u[i] / n);
      actual += static_cast<double>(fa[i]) * fb[i];
    }
    const auto ha = wta_encode(projection, fa, active_bits).to_bits();
    const auto hb = wta_encode(projection, fb, active_bits).to_bits();
    cosines.push_back(actual);
    overlaps.push_back(static_cast<double>(and_popcount(ha, hb)));
  }
  return spearman(cosines, overlaps);
}

double connectivity_collision_correlation(const Database& db, const ProjectionMatrix& projection,
                                          std::size_t active_bits, std::size_t query_ordinal, std::size_t pairs,
                                          std::uint64_t seed) {
  require(query_ordinal < db.size(), "connectivity suite: query ordinal out of range");
  require(pairs >= 2 && pairs < db.size(), "connectivity suite: pairs must lie in [2, n)");
  const auto& query = db[query_ordinal];
  const auto query_sketch = build_sketch(encode_set(projection, query, active_bits), projection.rows());

  std::vector<std::size_t> others;
  for (std::size_t o = 0; o < db.size(); ++o)
    if (o != query_ordinal) others.push_back(o);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picked;
  std::sample(others.begin(), others.end(), std::back_inserter(picked), pairs, rng);

  std::vector<double> collisions, conn;
  for (auto o : picked) {
    const auto sketch = build_sketch(encode_set(projection, db[o], active_bits), projection.rows());
    collisions.push_back(static_cast<double>(and_popcount(query_sketch, sketch)));
    conn.push_back(theory::connectivity(query, db[o]));
  }
  return spearman(collisions, conn);
}

std::vector<SuiteCheck> statistical_suites(const SuiteOptions& o) {
  std::vector<SuiteCheck> checks;
  auto add = [&](std::string name, double value, double threshold, bool pass) {
    checks.push_back({std::move(name), value, threshold, pass});
  };

  // Training corpus of uniformly random directions for the learned projection.
  SyntheticOptions uniform{.num_sets = 20000, .min_cardinality = 1, .max_cardinality = 1, .dim = o.corpus.dim,
                           .num_clusters = 20000, .spread = 0.0, .seed = o.seed + 1};
  const auto training_db = generate_synthetic(uniform).db;
  auto training = o.training;
  training.seed = o.seed;
  const auto trained = train_projection(training_db, o.code_length, training);
  const auto random = random_projection(o.seed, o.code_length, o.corpus.dim);

  const double rho_random = lsh_monotonicity(random, o.active_bits, o.lsh_pairs, o.seed + 2);
  const double rho_trained = lsh_monotonicity(trained.projection, o.active_bits, o.lsh_pairs, o.seed + 2);
  add("lsh_spearman_random", rho_random, 0.5, rho_random >= 0.5);
  add("lsh_spearman_trained", rho_trained, 0.8, rho_trained >= 0.8);

  const auto& mt = trained.log.update_magnitudes;
  if (mt.size() >= 4) {
    const std::size_t q = mt.size() / 4;
    const double first = std::accumulate(mt.begin(), mt.begin() + static_cast<std::ptrdiff_t>(q), 0.0) / static_cast<double>(q);
    const double last = std::accumulate(mt.end() - static_cast<std::ptrdiff_t>(q), mt.end(), 0.0) / static_cast<double>(q);
    add("training_update_magnitude_decay", last, first, last < first);
  } else {
    add("training_update_magnitude_decay", 0.0, 0.0, false);
  }

  for (double s : o.tail_s)
    for (auto L : o.tail_hashes) {
      std::vector<double> taus;
      for (double delta : {0.1, 0.2}) {
        if (s + delta < 1.0) taus.push_back(s + delta);
        if (s - delta > 0.0) taus.push_back(s - delta);
      }
      const auto sim = theory::tail_bound_simulation(s, L, o.tail_trials, taus, o.seed + L);
      double worst = -1.0;
      for (const auto* rows : {&sim.upper, &sim.lower})
        for (const auto& r : *rows) worst = std::max(worst, r.frequency - (r.bound + 3.0 * r.standard_error));
      char name[64];
      std::snprintf(name, sizeof name, "tail_bound_s%.1f_L%zu", s, L);
      add(name, worst, 0.0, worst <= 0.0);
    }

  auto corpus = o.corpus;
  corpus.seed = o.seed + 3;
  const auto clustered = generate_synthetic(corpus).db;
  const auto projection = random_projection(o.seed, o.code_length, corpus.dim);
  const std::size_t pairs = std::min(o.connectivity_pairs, clustered.size() - 1);
  const double rho_conn = connectivity_collision_correlation(clustered, projection, o.active_bits, 0, pairs, o.seed + 4);
  add("connectivity_collision_spearman", rho_conn, 0.5, rho_conn >= 0.5);
  return checks;
}

}  // namespace biovss
