// biovss: build, query and benchmark vector-set indexes from the command line.
//
// Exit codes: 0 success, 2 usage, 3 validation, 4 I/O, 5 integrity, 6 internal.

#include <cinttypes>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biovss/biovss.h"

namespace {

enum Exit { kOk = 0, kUsage = 2, kValidation = 3, kIo = 4, kIntegrity = 5, kInternal = 6 };

int exit_for(bvss_status s) {
  switch (s) {
    case BVSS_OK: return kOk;
    case BVSS_ERR_INVALID_ARGUMENT: return kValidation;
    case BVSS_ERR_IO: return kIo;
    case BVSS_ERR_INTEGRITY: return kIntegrity;
    case BVSS_ERR_INTERNAL: return kInternal;
  }
  return kInternal;
}

struct Failure {
  int code;
};

void check(bvss_status s) {
  if (s != BVSS_OK) {
    std::fprintf(stderr, "error: %s\n", bvss_last_error());
    throw Failure{exit_for(s)};
  }
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::fprintf(stderr, "usage error: %s\n", msg.c_str());
  throw Failure{kUsage};
}

struct DbDeleter {
  void operator()(bvss_database* p) const { bvss_database_free(p); }
};
struct IndexDeleter {
  void operator()(bvss_index* p) const { bvss_index_free(p); }
};
struct ResultDeleter {
  void operator()(bvss_result* p) const { bvss_result_free(p); }
};
struct TruthDeleter {
  void operator()(bvss_ground_truth* p) const { bvss_ground_truth_free(p); }
};
using DbPtr = std::unique_ptr<bvss_database, DbDeleter>;
using IndexPtr = std::unique_ptr<bvss_index, IndexDeleter>;
using ResultPtr = std::unique_ptr<bvss_result, ResultDeleter>;
using TruthPtr = std::unique_ptr<bvss_ground_truth, TruthDeleter>;

DbPtr read_db(const std::string& path) {
  bvss_database* db = nullptr;
  check(bvss_database_read(path.c_str(), &db));
  return DbPtr(db);
}

bvss_metric metric_of(const std::string& name) {
  bvss_metric m;
  if (bvss_parse_metric(name.c_str(), &m) != BVSS_OK) usage_error(bvss_last_error());
  return m;
}

bvss_mode mode_of(const std::string& name) {
  bvss_mode m;
  if (bvss_parse_mode(name.c_str(), &m) != BVSS_OK) usage_error(bvss_last_error());
  return m;
}

struct Options {
  std::string dataset, index, out, queries, gt, format = "csv";
  std::vector<std::size_t> bloom_size{1024}, wta{64}, access{3}, candidates{50000}, topk{3, 5};
  std::vector<std::uint32_t> min_count{1};
  std::vector<std::string> mode{"biovss++"};
  std::string metric = "hausdorff";
  std::uint64_t seed = 0;
  std::size_t epochs = 1, batch_size = 10000, num_queries = 500;
  double density = 0.1;
  bool train = false, exclude_self = false;
  // synth
  std::size_t sets = 10000, min_m = 2, max_m = 8, dim = 64, clusters = 20;
  double spread = 0.2;
};

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

int cmd_synth(const Options& o) {
  bvss_synthetic_params p{o.sets, o.min_m, o.max_m, o.dim, o.clusters, o.spread, o.seed};
  std::fprintf(stderr, "# synth sets=%zu m=[%zu,%zu] dim=%zu clusters=%zu spread=%g seed=%" PRIu64 " out=%s\n",
               o.sets, o.min_m, o.max_m, o.dim, o.clusters, o.spread, o.seed, o.out.c_str());
  bvss_database* raw = nullptr;
  check(bvss_database_synthetic(&p, &raw));
  DbPtr db(raw);
  check(bvss_database_write(db.get(), o.out.c_str()));
  return kOk;
}

int cmd_build(const Options& o) {
  if (o.bloom_size.size() != 1 || o.wta.size() != 1) usage_error("build takes a single --bloom-size and --wta");
  bvss_build_params p;
  bvss_build_defaults(&p);
  p.bloom_size = o.bloom_size[0];
  p.wta = o.wta[0];
  p.seed = o.seed;
  p.density = o.density;
  p.train = o.train ? 1 : 0;
  p.epochs = o.epochs;
  p.batch_size = o.batch_size;
  std::fprintf(stderr,
               "# build dataset=%s out=%s bloom-size=%zu wta=%zu seed=%" PRIu64
               " projection=%s density=%g epochs=%zu batch-size=%zu\n",
               o.dataset.c_str(), o.out.c_str(), p.bloom_size, p.wta, p.seed, o.train ? "trained" : "random",
               p.density, p.epochs, p.batch_size);
  auto db = read_db(o.dataset);
  bvss_index* raw = nullptr;
  bvss_build_timings t{};
  check(bvss_index_build(db.get(), &p, &raw, &t));
  IndexPtr index(raw);
  check(bvss_index_save(index.get(), o.out.c_str()));
  bvss_storage_bytes bytes{};
  check(bvss_index_storage_bytes(index.get(), &bytes));
  std::printf("stage,seconds\n");
  if (o.train) std::printf("training,%.6f\n", t.training_s);
  std::printf("hashing,%.6f\ncount_bloom,%.6f\nsingle_bloom,%.6f\ninverted_index,%.6f\n", t.hashing_s,
              t.count_filters_s, t.sketches_s, t.inverted_index_s);
  std::printf("# count-filter storage bytes: dense=%zu coo=%zu csr=%zu\n", bytes.dense, bytes.coo, bytes.csr);
  return kOk;
}

int cmd_query(const Options& o) {
  if (o.topk.size() != 1 || o.access.size() != 1 || o.min_count.size() != 1 || o.candidates.size() != 1 ||
      o.mode.size() != 1)
    usage_error("query takes single values for --topk, --access, --min-count, --candidates and --mode");
  if (o.format != "csv" && o.format != "text") usage_error("--format must be csv or text");
  bvss_search_params p;
  bvss_search_defaults(&p);
  p.mode = mode_of(o.mode[0]);
  p.metric = metric_of(o.metric);
  p.k = o.topk[0];
  p.access = o.access[0];
  p.min_count = o.min_count[0];
  p.candidates = o.candidates[0];
  p.bloom_size = o.bloom_size.empty() ? 0 : o.bloom_size[0];
  p.wta = o.wta.empty() ? 0 : o.wta[0];
  p.exclude_self = o.exclude_self ? 1 : 0;
  if (p.mode != BVSS_MODE_EXACT && o.index.empty()) usage_error("--index is required unless --mode exact");

  auto db = read_db(o.dataset);
  auto queries = read_db(o.queries);
  IndexPtr index;
  if (!o.index.empty()) {
    bvss_index* raw = nullptr;
    check(bvss_index_load(o.index.c_str(), &raw));
    index.reset(raw);
    check(bvss_index_check(index.get(), db.get()));
  }
  std::fprintf(stderr,
               "# query dataset=%s index=%s queries=%s mode=%s metric=%s topk=%zu access=%zu min-count=%u "
               "candidates=%zu bloom-size=%zu wta=%zu\n",
               o.dataset.c_str(), o.index.c_str(), o.queries.c_str(), o.mode[0].c_str(), o.metric.c_str(), p.k,
               p.access, p.min_count, p.candidates, index ? bvss_index_bloom_size(index.get()) : 0,
               index ? bvss_index_wta(index.get()) : 0);

  std::FILE* out = stdout;
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(nullptr, &std::fclose);
  if (!o.out.empty()) {
    file.reset(std::fopen(o.out.c_str(), "w"));
    if (!file) {
      std::fprintf(stderr, "error: cannot open '%s' for writing\n", o.out.c_str());
      return kIo;
    }
    out = file.get();
  }
  if (o.format == "csv") std::fprintf(out, "query_id,rank,set_id,distance\n");
  for (std::size_t q = 0; q < bvss_database_size(queries.get()); ++q) {
    bvss_result* raw = nullptr;
    check(bvss_search(index.get(), db.get(), queries.get(), q, &p, &raw));
    ResultPtr r(raw);
    const auto qid = bvss_database_set_id(queries.get(), q);
    bvss_diagnostics diag{};
    bvss_result_diagnostics(r.get(), &diag);
    if (o.format == "text")
      std::fprintf(out, "query %" PRIu64 ": stage1=%zu stage2=%zu exact_evals=%zu%s\n", qid,
                   diag.stage1_survivors, diag.stage2_survivors, diag.exact_evaluations,
                   diag.truncated ? " (fewer than k results)" : "");
    for (std::size_t i = 0; i < bvss_result_size(r.get()); ++i) {
      std::uint64_t id = 0;
      double dist = 0;
      check(bvss_result_hit(r.get(), i, &id, &dist));
      if (o.format == "csv")
        std::fprintf(out, "%" PRIu64 ",%zu,%" PRIu64 ",%.17g\n", qid, i + 1, id, dist);
      else
        std::fprintf(out, "  %2zu. set %" PRIu64 "  distance %.6f\n", i + 1, id, dist);
    }
  }
  return kOk;
}

int cmd_gt(const Options& o) {
  std::size_t k = 0;
  for (auto v : o.topk) k = std::max(k, v);
  std::fprintf(stderr, "# gt dataset=%s queries=%s num-queries=%zu seed=%" PRIu64 " metric=%s topk=%zu out=%s\n",
               o.dataset.c_str(), o.queries.empty() ? "(in-corpus)" : o.queries.c_str(), o.num_queries, o.seed,
               o.metric.c_str(), k, o.out.c_str());
  const auto metric = metric_of(o.metric);
  auto db = read_db(o.dataset);
  DbPtr queries;
  if (!o.queries.empty()) queries = read_db(o.queries);
  bvss_ground_truth* raw = nullptr;
  check(bvss_ground_truth_compute(db.get(), queries.get(), o.num_queries, o.seed, metric, k, &raw));
  TruthPtr truth(raw);
  check(bvss_ground_truth_write_csv(truth.get(), o.out.c_str()));
  return kOk;
}

int cmd_bench(const Options& o) {
  std::fprintf(stderr,
               "# bench dataset=%s gt=%s queries=%s mode=%s metric=%s bloom-size=%s wta=%s access=%s "
               "min-count=%s candidates=%s topk=%s seed=%" PRIu64 " out=%s\n",
               o.dataset.c_str(), o.gt.c_str(), o.queries.empty() ? "(in-corpus)" : o.queries.c_str(),
               join(o.mode).c_str(), o.metric.c_str(), join(o.bloom_size).c_str(), join(o.wta).c_str(),
               join(o.access).c_str(), join(o.min_count).c_str(), join(o.candidates).c_str(),
               join(o.topk).c_str(), o.seed, o.out.c_str());
  std::vector<bvss_mode> modes;
  for (const auto& m : o.mode) modes.push_back(mode_of(m));
  const auto metric = metric_of(o.metric);
  auto db = read_db(o.dataset);
  DbPtr queries;
  if (!o.queries.empty()) queries = read_db(o.queries);
  bvss_ground_truth* raw = nullptr;
  check(bvss_ground_truth_read_csv(o.gt.c_str(), &raw));
  TruthPtr truth(raw);

  bvss_bench_grid g{};
  g.modes = modes.data();
  g.num_modes = modes.size();
  g.bloom_sizes = o.bloom_size.data();
  g.num_bloom_sizes = o.bloom_size.size();
  g.wtas = o.wta.data();
  g.num_wtas = o.wta.size();
  g.access = o.access.data();
  g.num_access = o.access.size();
  g.min_counts = o.min_count.data();
  g.num_min_counts = o.min_count.size();
  g.candidates = o.candidates.data();
  g.num_candidates = o.candidates.size();
  g.ks = o.topk.data();
  g.num_ks = o.topk.size();
  g.metric = metric;
  bvss_build_defaults(&g.build);
  g.build.seed = o.seed;
  g.build.density = o.density;
  g.build.train = o.train ? 1 : 0;
  g.build.epochs = o.epochs;
  g.build.batch_size = o.batch_size;
  check(bvss_bench_run(db.get(), queries.get(), truth.get(), &g, o.out.c_str()));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate top-k vector set search under the Hausdorff distance"};
  app.require_subcommand(1);
  Options o;

  auto search_flags = [&](CLI::App* c, bool sweep) {
    c->add_option("--access", o.access, "inverted lists visited (A)")->delimiter(',')->capture_default_str();
    c->add_option("--min-count", o.min_count, "minimum stored count (M)")->delimiter(',')->capture_default_str();
    c->add_option("--candidates", o.candidates, "candidate budget (c)")->delimiter(',')->capture_default_str();
    c->add_option("--metric", o.metric, "hausdorff | meanmin | min")->capture_default_str();
    c->add_option("--mode", o.mode, "exact | biovss | biovss++")->delimiter(',')->capture_default_str();
    if (sweep) c->add_option("--topk", o.topk, "k values")->delimiter(',')->capture_default_str();
  };

  auto* synth = app.add_subcommand("synth", "write a clustered synthetic dataset");
  synth->add_option("--out", o.out, "output dataset")->required();
  synth->add_option("--sets", o.sets)->capture_default_str();
  synth->add_option("--min-m", o.min_m)->capture_default_str();
  synth->add_option("--max-m", o.max_m)->capture_default_str();
  synth->add_option("--dim", o.dim)->capture_default_str();
  synth->add_option("--clusters", o.clusters)->capture_default_str();
  synth->add_option("--spread", o.spread)->capture_default_str();
  synth->add_option("--seed", o.seed)->capture_default_str();

  auto* build = app.add_subcommand("build", "hash a dataset and write an index");
  build->add_option("--dataset", o.dataset)->required();
  build->add_option("--out", o.out, "output index")->required();
  build->add_option("--bloom-size", o.bloom_size, "filter length (b)")->capture_default_str();
  build->add_option("--wta", o.wta, "active bits per code (L_wta)")->capture_default_str();
  build->add_option("--seed", o.seed)->capture_default_str();
  build->add_option("--density", o.density, "random projection density")->capture_default_str();
  build->add_flag("--train", o.train, "learn the projection instead of sampling it");
  build->add_option("--epochs", o.epochs)->capture_default_str();
  build->add_option("--batch-size", o.batch_size)->capture_default_str();

  auto* query = app.add_subcommand("query", "search an index with query sets");
  query->add_option("--dataset", o.dataset)->required();
  query->add_option("--index", o.index);
  query->add_option("--queries", o.queries, "query sets (dataset file)")->required();
  query->add_option("--out", o.out, "write results here instead of stdout");
  query->add_option("--format", o.format, "csv | text")->capture_default_str();
  query->add_flag("--exclude-self", o.exclude_self, "drop the set whose id equals the query id");
  auto* q_bloom = query->add_option("--bloom-size", o.bloom_size, "must match the index when given");
  auto* q_wta = query->add_option("--wta", o.wta, "must match the index when given");
  query->add_option("--topk", o.topk, "k")->capture_default_str();
  search_flags(query, false);

  auto* gt = app.add_subcommand("gt", "exact ground truth as CSV");
  gt->add_option("--dataset", o.dataset)->required();
  gt->add_option("--out", o.out)->required();
  gt->add_option("--queries", o.queries, "held-out query sets; default samples from the dataset");
  gt->add_option("--num-queries", o.num_queries)->capture_default_str();
  gt->add_option("--seed", o.seed)->capture_default_str();
  gt->add_option("--metric", o.metric)->capture_default_str();
  gt->add_option("--topk", o.topk, "depth is the largest value")->delimiter(',')->capture_default_str();

  auto* bench = app.add_subcommand("bench", "recall and latency over a parameter grid");
  bench->add_option("--dataset", o.dataset)->required();
  bench->add_option("--gt", o.gt, "ground truth from 'gt'")->required();
  bench->add_option("--out", o.out, "bench CSV")->required();
  bench->add_option("--queries", o.queries, "held-out query sets used for the ground truth");
  bench->add_option("--bloom-size", o.bloom_size)->delimiter(',')->capture_default_str();
  bench->add_option("--wta", o.wta)->delimiter(',')->capture_default_str();
  bench->add_option("--seed", o.seed)->capture_default_str();
  bench->add_option("--density", o.density)->capture_default_str();
  bench->add_flag("--train", o.train);
  bench->add_option("--epochs", o.epochs)->capture_default_str();
  bench->add_option("--batch-size", o.batch_size)->capture_default_str();
  search_flags(bench, true);

  o.topk = {3, 5};
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(o);
    if (*build) return cmd_build(o);
    if (*query) {
      if (q_bloom->count() == 0) o.bloom_size.clear();
      if (q_wta->count() == 0) o.wta.clear();
      if (query->get_option("--topk")->count() == 0) o.topk = {3};
      return cmd_query(o);
    }
    if (*gt) return cmd_gt(o);
    if (*bench) return cmd_bench(o);
  } catch (const Failure& f) {
    return f.code;
  }
  return kUsage;
}
