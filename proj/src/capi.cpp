#include "biovss/biovss.h"

#include <fstream>
#include <mutex>
#include <new>
#include <optional>
#include <string>

#include "biovss/dataio.hpp"
#include "biovss/eval.hpp"
#include "biovss/search.hpp"

struct bvss_database {
  biovss::Database db;
};

struct bvss_index {
  biovss::IndexBundle bundle;
  // Per-vector codes for the linear-scan mode, built on first use.
  mutable std::mutex encoded_mutex;
  mutable const biovss::Database* encoded_for = nullptr;
  mutable std::optional<biovss::EncodedDatabase> encoded;
};

struct bvss_result {
  biovss::SearchResult result;
};

struct bvss_ground_truth {
  biovss::GroundTruth truth;
};

namespace {

thread_local std::string g_last_error;

bvss_status set_error(bvss_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

template <typename F>
bvss_status guarded(F&& body) {
  try {
    body();
    return BVSS_OK;
  } catch (const biovss::Error& e) {
    switch (e.kind()) {
      case biovss::ErrorKind::kInvalidArgument: return set_error(BVSS_ERR_INVALID_ARGUMENT, e.what());
      case biovss::ErrorKind::kIo: return set_error(BVSS_ERR_IO, e.what());
      case biovss::ErrorKind::kIntegrity: return set_error(BVSS_ERR_INTEGRITY, e.what());
    }
    return set_error(BVSS_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(BVSS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(BVSS_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) biovss::fail(biovss::ErrorKind::kInvalidArgument, std::string(what) + " is NULL");
}

biovss::SetMetric to_metric(bvss_metric m) {
  switch (m) {
    case BVSS_METRIC_HAUSDORFF: return biovss::SetMetric::kHausdorff;
    case BVSS_METRIC_MEANMIN: return biovss::SetMetric::kMeanMin;
    case BVSS_METRIC_MIN: return biovss::SetMetric::kMin;
  }
  biovss::fail(biovss::ErrorKind::kInvalidArgument, "unknown metric value " + std::to_string(m));
}

biovss::SearchMode to_mode(bvss_mode m) {
  switch (m) {
    case BVSS_MODE_EXACT: return biovss::SearchMode::kExact;
    case BVSS_MODE_BIOVSS: return biovss::SearchMode::kBioVss;
    case BVSS_MODE_BIOVSS_PP: return biovss::SearchMode::kBioVssPlusPlus;
  }
  biovss::fail(biovss::ErrorKind::kInvalidArgument, "unknown mode value " + std::to_string(m));
}

biovss::BuildOptions to_build(const bvss_build_params& p) {
  biovss::BuildOptions o;
  o.code_length = p.bloom_size;
  o.active_bits = p.wta;
  o.seed = p.seed;
  o.density = p.density;
  o.train = p.train != 0;
  o.training.epochs = p.epochs;
  o.training.batch_size = p.batch_size;
  return o;
}

template <typename T>
std::vector<T> span_of(const T* data, std::size_t n, const char* what) {
  if (n == 0) biovss::fail(biovss::ErrorKind::kInvalidArgument, std::string("bench grid: no ") + what);
  need(data, what);
  return std::vector<T>(data, data + n);
}

biovss::QueryBatch queries_from_truth(const biovss::Database& db, const biovss::GroundTruth& truth) {
  biovss::QueryBatch q{{}, true};
  for (const auto& row : truth) {
    const auto o = db.find(row.query_id);
    if (o == db.size())
      biovss::fail(biovss::ErrorKind::kInvalidArgument,
                   "ground truth query " + std::to_string(row.query_id) + " is not in the dataset");
    q.sets.push_back(db[o]);
  }
  return q;
}

}  // namespace

extern "C" {

const char* bvss_last_error(void) { return g_last_error.c_str(); }
const char* bvss_version(void) { return "0.1.0"; }

bvss_status bvss_parse_mode(const char* name, bvss_mode* out) {
  return guarded([&] {
    need(name, "mode name");
    need(out, "output");
    switch (biovss::parse_search_mode(name)) {
      case biovss::SearchMode::kExact: *out = BVSS_MODE_EXACT; break;
      case biovss::SearchMode::kBioVss: *out = BVSS_MODE_BIOVSS; break;
      case biovss::SearchMode::kBioVssPlusPlus: *out = BVSS_MODE_BIOVSS_PP; break;
    }
  });
}

bvss_status bvss_parse_metric(const char* name, bvss_metric* out) {
  return guarded([&] {
    need(name, "metric name");
    need(out, "output");
    switch (biovss::parse_set_metric(name)) {
      case biovss::SetMetric::kHausdorff: *out = BVSS_METRIC_HAUSDORFF; break;
      case biovss::SetMetric::kMeanMin: *out = BVSS_METRIC_MEANMIN; break;
      case biovss::SetMetric::kMin: *out = BVSS_METRIC_MIN; break;
    }
  });
}

void bvss_synthetic_defaults(bvss_synthetic_params* p) {
  if (!p) return;
  const biovss::SyntheticOptions d;
  *p = {d.num_sets, d.min_cardinality, d.max_cardinality, d.dim, d.num_clusters, d.spread, d.seed};
}

bvss_status bvss_database_read(const char* path, bvss_database** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output");
    *out = new bvss_database{biovss::read_dataset(path)};
  });
}

bvss_status bvss_database_write(const bvss_database* db, const char* path) {
  return guarded([&] {
    need(db, "database");
    need(path, "path");
    biovss::write_dataset(db->db, path);
  });
}

bvss_status bvss_database_synthetic(const bvss_synthetic_params* p, bvss_database** out) {
  return guarded([&] {
    need(p, "params");
    need(out, "output");
    biovss::SyntheticOptions o{p->num_sets, p->min_cardinality, p->max_cardinality, p->dim,
                               p->num_clusters, p->spread, p->seed};
    *out = new bvss_database{biovss::generate_synthetic(o).db};
  });
}

size_t bvss_database_size(const bvss_database* db) { return db ? db->db.size() : 0; }
size_t bvss_database_dim(const bvss_database* db) { return db ? db->db.dim() : 0; }
size_t bvss_database_max_cardinality(const bvss_database* db) { return db ? db->db.max_cardinality() : 0; }
uint64_t bvss_database_set_id(const bvss_database* db, size_t ordinal) {
  return db && ordinal < db->db.size() ? db->db[ordinal].id() : 0;
}
void bvss_database_free(bvss_database* db) { delete db; }

void bvss_build_defaults(bvss_build_params* p) {
  if (!p) return;
  const biovss::BuildOptions d;
  *p = {d.code_length, d.active_bits, d.seed, d.density, 0, d.training.epochs, d.training.batch_size};
}

bvss_status bvss_index_build(const bvss_database* db, const bvss_build_params* p, bvss_index** out,
                             bvss_build_timings* timings) {
  return guarded([&] {
    need(db, "database");
    need(p, "params");
    need(out, "output");
    biovss::BuildTimings t;
    auto index = std::make_unique<bvss_index>();
    index->bundle = biovss::build_index(db->db, to_build(*p), &t);
    if (timings) *timings = {t.training_s, t.hashing_s, t.count_filters_s, t.sketches_s, t.inverted_index_s};
    *out = index.release();
  });
}

bvss_status bvss_index_save(const bvss_index* index, const char* path) {
  return guarded([&] {
    need(index, "index");
    need(path, "path");
    biovss::save_index(index->bundle, path);
  });
}

bvss_status bvss_index_load(const char* path, bvss_index** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output");
    auto index = std::make_unique<bvss_index>();
    index->bundle = biovss::load_index(path);
    *out = index.release();
  });
}

bvss_status bvss_index_check(const bvss_index* index, const bvss_database* db) {
  return guarded([&] {
    need(index, "index");
    need(db, "database");
    biovss::check_compatible(index->bundle, db->db);
  });
}

size_t bvss_index_bloom_size(const bvss_index* index) { return index ? index->bundle.params.code_length : 0; }
size_t bvss_index_wta(const bvss_index* index) { return index ? index->bundle.params.active_bits : 0; }
uint64_t bvss_index_seed(const bvss_index* index) { return index ? index->bundle.params.seed : 0; }
int bvss_index_trained(const bvss_index* index) {
  return index && index->bundle.params.provenance == biovss::Provenance::kTrained;
}

bvss_status bvss_index_storage_bytes(const bvss_index* index, bvss_storage_bytes* out) {
  return guarded([&] {
    need(index, "index");
    need(out, "output");
    const auto& f = index->bundle.filters;
    *out = {biovss::encode_store(f, biovss::StoreLayout::kDense).byte_size(),
            biovss::encode_store(f, biovss::StoreLayout::kCoo).byte_size(),
            biovss::encode_store(f, biovss::StoreLayout::kCsr).byte_size()};
  });
}

void bvss_index_free(bvss_index* index) { delete index; }

void bvss_search_defaults(bvss_search_params* p) {
  if (!p) return;
  const biovss::SearchParams d;
  *p = {BVSS_MODE_BIOVSS_PP, BVSS_METRIC_HAUSDORFF, d.k, d.access, d.min_count, d.candidates, 0, 0, 0};
}

bvss_status bvss_search(const bvss_index* index, const bvss_database* db, const bvss_database* queries,
                        size_t query_ordinal, const bvss_search_params* p, bvss_result** out) {
  return guarded([&] {
    need(db, "database");
    need(queries, "queries");
    need(p, "params");
    need(out, "output");
    if (query_ordinal >= queries->db.size())
      biovss::fail(biovss::ErrorKind::kInvalidArgument, "query ordinal out of range");
    const auto& query = queries->db[query_ordinal];
    const auto mode = to_mode(p->mode);
    const auto metric = to_metric(p->metric);
    const std::optional<biovss::SetId> exclude =
        p->exclude_self ? std::optional<biovss::SetId>(query.id()) : std::nullopt;

    auto result = std::make_unique<bvss_result>();
    if (mode == biovss::SearchMode::kExact) {
      result->result = biovss::brute_force_topk(query, db->db, metric, p->k, exclude);
      *out = result.release();
      return;
    }

    need(index, "index");
    const auto& bundle = index->bundle;
    biovss::check_compatible(bundle, db->db);
    if (p->bloom_size != 0 && p->bloom_size != bundle.params.code_length)
      biovss::fail(biovss::ErrorKind::kInvalidArgument,
                   "parameter/index mismatch: bloom-size (requested " + std::to_string(p->bloom_size) +
                       ", index " + std::to_string(bundle.params.code_length) + ")");
    if (p->wta != 0 && p->wta != bundle.params.active_bits)
      biovss::fail(biovss::ErrorKind::kInvalidArgument, "parameter/index mismatch: wta (requested " +
                                                             std::to_string(p->wta) + ", index " +
                                                             std::to_string(bundle.params.active_bits) + ")");
    biovss::SearchParams sp{p->k, p->access, p->min_count, p->candidates, bundle.params.active_bits,
                            bundle.params.code_length, metric, exclude};
    if (mode == biovss::SearchMode::kBioVss) {
      const biovss::EncodedDatabase* encoded = nullptr;
      {
        std::lock_guard lock(index->encoded_mutex);
        if (!index->encoded || index->encoded_for != &db->db) {
          index->encoded = biovss::encode_database(db->db, bundle.projection, bundle.params.active_bits);
          index->encoded_for = &db->db;
        }
        encoded = &*index->encoded;
      }
      result->result = biovss::biovss_search(query, sp, db->db, *encoded, bundle.projection);
    } else {
      result->result =
          biovss::biovss_pp_search(query, sp, db->db, bundle.index, bundle.sketches, bundle.projection);
    }
    *out = result.release();
  });
}

size_t bvss_result_size(const bvss_result* r) { return r ? r->result.hits.size() : 0; }

bvss_status bvss_result_hit(const bvss_result* r, size_t rank, uint64_t* id, double* distance) {
  return guarded([&] {
    need(r, "result");
    if (rank >= r->result.hits.size()) biovss::fail(biovss::ErrorKind::kInvalidArgument, "rank out of range");
    if (id) *id = r->result.hits[rank].id;
    if (distance) *distance = r->result.hits[rank].distance;
  });
}

void bvss_result_diagnostics(const bvss_result* r, bvss_diagnostics* out) {
  if (!r || !out) return;
  *out = {r->result.stage1_survivors, r->result.stage2_survivors, r->result.exact_evaluations,
          r->result.truncated ? 1 : 0};
}

void bvss_result_free(bvss_result* r) { delete r; }

bvss_status bvss_ground_truth_compute(const bvss_database* db, const bvss_database* queries, size_t num_queries,
                                      uint64_t seed, bvss_metric metric, size_t k, bvss_ground_truth** out) {
  return guarded([&] {
    need(db, "database");
    need(out, "output");
    const auto batch = queries ? biovss::external_queries(queries->db)
                               : biovss::in_corpus_queries(db->db, num_queries, seed);
    *out = new bvss_ground_truth{biovss::compute_ground_truth(db->db, batch, to_metric(metric), k)};
  });
}

bvss_status bvss_ground_truth_write_csv(const bvss_ground_truth* truth, const char* path) {
  return guarded([&] {
    need(truth, "ground truth");
    need(path, "path");
    std::ofstream f(path);
    if (!f) biovss::fail(biovss::ErrorKind::kIo, std::string("cannot open '") + path + "' for writing");
    biovss::write_ground_truth_csv(truth->truth, f);
    if (!f) biovss::fail(biovss::ErrorKind::kIo, std::string("error while writing '") + path + "'");
  });
}

bvss_status bvss_ground_truth_read_csv(const char* path, bvss_ground_truth** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output");
    std::ifstream f(path);
    if (!f) biovss::fail(biovss::ErrorKind::kIo, std::string("cannot open '") + path + "' for reading");
    *out = new bvss_ground_truth{biovss::read_ground_truth_csv(f)};
  });
}

size_t bvss_ground_truth_queries(const bvss_ground_truth* truth) { return truth ? truth->truth.size() : 0; }
void bvss_ground_truth_free(bvss_ground_truth* truth) { delete truth; }

bvss_status bvss_bench_run(const bvss_database* db, const bvss_database* queries, const bvss_ground_truth* truth,
                           const bvss_bench_grid* g, const char* csv_path) {
  return guarded([&] {
    need(db, "database");
    need(truth, "ground truth");
    need(g, "grid");
    need(csv_path, "path");
    biovss::BenchGrid grid;
    grid.modes.clear();
    for (auto m : span_of(g->modes, g->num_modes, "modes")) grid.modes.push_back(to_mode(m));
    grid.code_lengths = span_of(g->bloom_sizes, g->num_bloom_sizes, "bloom sizes");
    grid.active_bits = span_of(g->wtas, g->num_wtas, "wta values");
    grid.access = span_of(g->access, g->num_access, "access values");
    grid.min_counts = span_of(g->min_counts, g->num_min_counts, "min counts");
    grid.candidates = span_of(g->candidates, g->num_candidates, "candidate budgets");
    grid.ks = span_of(g->ks, g->num_ks, "k values");
    grid.metric = to_metric(g->metric);
    grid.build = to_build(g->build);

    const auto batch = queries ? biovss::external_queries(queries->db) : queries_from_truth(db->db, truth->truth);
    const auto report = biovss::run_benchmark(db->db, batch, truth->truth, grid);
    std::ofstream f(csv_path);
    if (!f) biovss::fail(biovss::ErrorKind::kIo, std::string("cannot open '") + csv_path + "' for writing");
    biovss::write_bench_csv(report, f);
    if (!f) biovss::fail(biovss::ErrorKind::kIo, std::string("error while writing '") + csv_path + "'");
  });
}

}  // extern "C"
