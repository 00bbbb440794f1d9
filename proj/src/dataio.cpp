#include "biovss/dataio.hpp"

#include <zlib.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "byteio.hpp"

namespace biovss {

using detail::ByteReader;
using detail::ByteWriter;

namespace {

constexpr std::array<char, 4> kDatasetMagic{'B', 'V', 'S', 'S'};
constexpr std::array<char, 4> kIndexMagic{'B', 'V', 'I', 'X'};

bool has_magic(std::span<const std::uint8_t> bytes, const std::array<char, 4>& magic) {
  return bytes.size() >= 4 && std::memcmp(bytes.data(), magic.data(), 4) == 0;
}

void put_magic(ByteWriter& w, const std::array<char, 4>& magic) {
  for (char c : magic) w.put<char>(c);
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::kIo, "error while reading '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "error while writing '" + path.string() + "'");
}

// ---- dataset ---------------------------------------------------------------

std::vector<std::uint8_t> serialize_dataset(const Database& db) {
  ByteWriter w;
  put_magic(w, kDatasetMagic);
  w.put<std::uint32_t>(kDatasetVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(db.dim()));
  w.put<std::uint64_t>(db.size());
  for (const auto& s : db.sets()) {
    w.put<std::uint64_t>(s.id());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    w.put_array<float>(s.data());
  }
  return std::move(w.bytes());
}

Database deserialize_dataset(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "dataset");
  if (bytes.empty()) r.corrupt("empty file");
  if (!has_magic(bytes, kDatasetMagic)) r.corrupt("bad magic (expected \"BVSS\")");
  r.get_bytes(4, "magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kDatasetVersion) r.corrupt("unsupported version " + std::to_string(version));
  const auto dim = r.get<std::uint32_t>("dim");
  if (dim == 0) r.corrupt("dimension is zero");
  const auto n = r.get<std::uint64_t>("set count");
  if (n == 0) r.corrupt("set count is zero");

  std::vector<VectorSet> sets;
  // Each set needs at least 12 header bytes, which bounds n before reserving.
  if (n > r.remaining() / 12) r.corrupt("declared set count " + std::to_string(n) + " exceeds payload");
  sets.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto id = r.get<std::uint64_t>("set id");
    const auto m = r.get<std::uint32_t>("set cardinality");
    if (m == 0) r.corrupt("set " + std::to_string(id) + " is empty");
    const auto start = r.offset();
    auto data = r.get_array<float>(static_cast<std::size_t>(m) * dim, "vector components");
    for (std::size_t c = 0; c < data.size(); ++c)
      if (!std::isfinite(data[c]))
        fail(ErrorKind::kIntegrity, "dataset: non-finite component in set " + std::to_string(id) +
                                        " at byte offset " + std::to_string(start + 4 * c));
    sets.emplace_back(id, dim, std::move(data));
  }
  if (!r.done())
    r.corrupt("declared set count " + std::to_string(n) + " but " + std::to_string(r.remaining()) +
              " payload bytes remain");
  try {
    return Database(dim, std::move(sets));
  } catch (const Error& e) {
    fail(ErrorKind::kIntegrity, std::string("dataset: ") + e.what());
  }
}

namespace {

Database parse_json_lines(const std::string& text, const std::string& name) {
  std::istringstream lines(text);
  std::string line;
  std::vector<VectorSet> sets;
  std::size_t dim = 0, line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = name + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      auto vectors = j.at("vectors").get<std::vector<std::vector<float>>>();
      VectorSet s(j.at("id").get<SetId>(), vectors);
      if (dim == 0) dim = s.dim();
      sets.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kIntegrity, where + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorKind::kIntegrity, where + ": " + e.what());
    }
  }
  if (sets.empty()) fail(ErrorKind::kIntegrity, name + ": no vector sets");
  try {
    return Database(dim, std::move(sets));
  } catch (const Error& e) {
    fail(ErrorKind::kIntegrity, name + ": " + e.what());
  }
}

}  // namespace

Database read_dataset(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.empty() || has_magic(bytes, kDatasetMagic) || path.extension() != ".jsonl")
    return deserialize_dataset(bytes);
  return parse_json_lines(std::string(bytes.begin(), bytes.end()), path.string());
}

void write_dataset(const Database& db, const std::filesystem::path& path) {
  write_file(path, serialize_dataset(db));
}

// ---- synthetic corpora -----------------------------------------------------

SyntheticCorpus generate_synthetic(const SyntheticOptions& o) {
  require(o.num_sets >= 1, "synthetic: number of sets must be >= 1");
  require(o.dim >= 1, "synthetic: dimension must be >= 1");
  require(o.num_clusters >= 1, "synthetic: number of clusters must be >= 1");
  require(o.min_cardinality >= 1 && o.min_cardinality <= o.max_cardinality && o.max_cardinality <= 4096,
          "synthetic: cardinality range must satisfy 1 <= min <= max <= 4096");
  require(o.spread >= 0.0 && std::isfinite(o.spread), "synthetic: spread must be finite and >= 0");

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto unit = [&](std::vector<double> v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n == 0.0) {
      v.assign(v.size(), 0.0);
      v[0] = 1.0;
      return v;
    }
    for (double& x : v) x /= n;
    return v;
  };

  std::vector<std::vector<double>> centers(o.num_clusters);
  for (auto& c : centers) {
    std::vector<double> v(o.dim);
    for (double& x : v) x = gauss(rng);
    c = unit(std::move(v));
  }

  std::uniform_int_distribution<std::size_t> pick_cluster(0, o.num_clusters - 1);
  std::uniform_int_distribution<std::size_t> pick_size(o.min_cardinality, o.max_cardinality);
  SyntheticCorpus out;
  std::vector<VectorSet> sets;
  sets.reserve(o.num_sets);
  out.cluster.reserve(o.num_sets);
  for (std::size_t i = 0; i < o.num_sets; ++i) {
    const auto c = pick_cluster(rng);
    const auto m = pick_size(rng);
    std::vector<float> data;
    data.reserve(m * o.dim);
    for (std::size_t v = 0; v < m; ++v) {
      std::vector<double> x(centers[c]);
      if (o.spread > 0.0)
        for (double& xi : x) xi += o.spread * gauss(rng);
      for (double xi : unit(std::move(x))) data.push_back(static_cast<float>(xi));
    }
    sets.emplace_back(static_cast<SetId>(i), o.dim, std::move(data));
    out.cluster.push_back(static_cast<std::uint32_t>(c));
  }
  out.db = Database(o.dim, std::move(sets));
  return out;
}

// ---- index bundles ---------------------------------------------------------

IndexBundle build_index(const Database& db, const BuildOptions& o, BuildTimings* timings) {
  require(o.code_length >= 1, "build: bloom size must be >= 1");
  require(o.active_bits >= 1 && o.active_bits <= o.code_length,
          "build: wta (" + std::to_string(o.active_bits) + ") must lie in [1, bloom size (" +
              std::to_string(o.code_length) + ")]");
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
  };
  BuildTimings local;

  IndexBundle b;
  auto t = Clock::now();
  if (o.train) {
    auto training = o.training;
    training.seed = o.seed;
    b.projection = train_projection(db, o.code_length, training).projection;
  } else {
    b.projection = random_projection(o.seed, o.code_length, db.dim(), o.density);
  }
  local.training_s = seconds_since(t);

  t = Clock::now();
  const auto encoded = encode_database(db, b.projection, o.active_bits);
  local.hashing_s = seconds_since(t);

  t = Clock::now();
  b.filters = build_count_filters(encoded, o.code_length);
  local.count_filters_s = seconds_since(t);

  t = Clock::now();
  b.sketches = build_sketches(encoded, o.code_length);
  local.sketches_s = seconds_since(t);

  t = Clock::now();
  b.index = build_inverted_index(b.filters);
  local.inverted_index_s = seconds_since(t);

  b.params = {static_cast<std::uint32_t>(o.code_length), static_cast<std::uint32_t>(o.active_bits), o.seed,
              b.projection.provenance(), static_cast<std::uint32_t>(db.dim())};
  b.ids.reserve(db.size());
  for (const auto& s : db.sets()) b.ids.push_back(s.id());
  if (timings) *timings = local;
  return b;
}

void check_compatible(const IndexBundle& bundle, const Database& db) {
  require(bundle.params.dim == db.dim(), "index/dataset mismatch: dim (index " + std::to_string(bundle.params.dim) +
                                             ", dataset " + std::to_string(db.dim()) + ")");
  require(bundle.ids.size() == db.size(), "index/dataset mismatch: set count (index " +
                                              std::to_string(bundle.ids.size()) + ", dataset " +
                                              std::to_string(db.size()) + ")");
  for (std::size_t i = 0; i < db.size(); ++i)
    require(bundle.ids[i] == db[i].id(), "index/dataset mismatch: set id at ordinal " + std::to_string(i));
}

namespace {

using Tag = std::array<char, 4>;
constexpr Tag kParams{'P', 'A', 'R', 'M'};
constexpr Tag kProjection{'P', 'R', 'O', 'J'};
constexpr Tag kFilters{'C', 'B', 'F', 'S'};
constexpr Tag kSketches{'S', 'K', 'C', 'H'};
constexpr Tag kInverted{'I', 'N', 'V', 'X'};
constexpr Tag kIds{'I', 'D', 'S', '_'};
constexpr std::array<Tag, 6> kSectionOrder{kParams, kProjection, kFilters, kSketches, kInverted, kIds};

std::uint32_t crc(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(::crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

void put_section(ByteWriter& w, const Tag& tag, std::span<const std::uint8_t> payload) {
  for (char c : tag) w.put<char>(c);
  w.put<std::uint64_t>(payload.size());
  w.put_bytes(payload);
  w.put<std::uint32_t>(crc(payload));
}

std::string tag_name(const Tag& t) { return std::string(t.begin(), t.end()); }

}  // namespace

std::vector<std::uint8_t> serialize_index(const IndexBundle& b) {
  ByteWriter out;
  put_magic(out, kIndexMagic);
  out.put<std::uint32_t>(kIndexVersion);
  out.put<std::uint32_t>(static_cast<std::uint32_t>(kSectionOrder.size()));

  {
    ByteWriter w;
    w.put<std::uint32_t>(b.params.code_length);
    w.put<std::uint32_t>(b.params.active_bits);
    w.put<std::uint64_t>(b.params.seed);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(b.params.provenance));
    w.put<std::uint32_t>(b.params.dim);
    put_section(out, kParams, w.bytes());
  }
  {
    ByteWriter w;
    w.put<std::uint32_t>(static_cast<std::uint32_t>(b.projection.rows()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(b.projection.cols()));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(b.projection.provenance()));
    w.put<std::uint64_t>(b.projection.seed());
    w.put_array<float>(b.projection.weights());
    put_section(out, kProjection, w.bytes());
  }
  put_section(out, kFilters, encode_store(b.filters, StoreLayout::kCsr).serialize());
  {
    ByteWriter w;
    w.put<std::uint64_t>(b.sketches.size());
    w.put<std::uint32_t>(b.params.code_length);
    for (const auto& s : b.sketches) w.put_array<std::uint64_t>(s.words());
    put_section(out, kSketches, w.bytes());
  }
  {
    ByteWriter w;
    w.put<std::uint64_t>(b.index.num_sets());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(b.index.length()));
    for (const auto& list : b.index.lists()) {
      w.put<std::uint64_t>(list.size());
      for (const auto& e : list) {
        w.put<std::uint32_t>(e.set);
        w.put<std::uint32_t>(e.count);
      }
    }
    put_section(out, kInverted, w.bytes());
  }
  {
    ByteWriter w;
    w.put<std::uint64_t>(b.ids.size());
    w.put_array<std::uint64_t>(b.ids);
    put_section(out, kIds, w.bytes());
  }
  return std::move(out.bytes());
}

IndexBundle deserialize_index(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "index");
  if (bytes.empty()) r.corrupt("empty file");
  if (!has_magic(bytes, kIndexMagic)) r.corrupt("bad magic (expected \"BVIX\")");
  r.get_bytes(4, "magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kIndexVersion)
    r.corrupt("version mismatch: file has " + std::to_string(version) + ", reader supports " +
              std::to_string(kIndexVersion));
  const auto count = r.get<std::uint32_t>("section count");
  if (count != kSectionOrder.size()) r.corrupt("expected " + std::to_string(kSectionOrder.size()) + " sections");

  IndexBundle b;
  for (const auto& expected : kSectionOrder) {
    Tag tag;
    for (char& c : tag) c = r.get<char>("section tag");
    if (tag != expected) r.corrupt("expected section " + tag_name(expected) + ", found '" + tag_name(tag) + "'");
    const auto length = r.get<std::uint64_t>("section length");
    const auto payload_offset = r.offset();
    const auto payload = r.get_bytes(length, "section payload");
    const auto stored = r.get<std::uint32_t>("section checksum");
    if (stored != crc(payload)) r.corrupt("checksum failure in section " + tag_name(tag));

    ByteReader s(payload, "index section " + tag_name(tag), payload_offset);
    try {
      if (tag == kParams) {
        b.params.code_length = s.get<std::uint32_t>("bloom size");
        b.params.active_bits = s.get<std::uint32_t>("wta");
        b.params.seed = s.get<std::uint64_t>("seed");
        const auto prov = s.get<std::uint8_t>("provenance");
        if (prov > 1) s.corrupt("unknown projection provenance");
        b.params.provenance = static_cast<Provenance>(prov);
        b.params.dim = s.get<std::uint32_t>("dim");
      } else if (tag == kProjection) {
        const auto rows = s.get<std::uint32_t>("rows");
        const auto cols = s.get<std::uint32_t>("cols");
        const auto prov = s.get<std::uint8_t>("provenance");
        if (prov > 1) s.corrupt("unknown projection provenance");
        const auto seed = s.get<std::uint64_t>("seed");
        auto w = s.get_array<float>(static_cast<std::size_t>(rows) * cols, "weights");
        b.projection = ProjectionMatrix(rows, cols, std::move(w), static_cast<Provenance>(prov), seed);
      } else if (tag == kFilters) {
        b.filters = decode_store(SparseStore::deserialize(payload));
      } else if (tag == kSketches) {
        const auto n = s.get<std::uint64_t>("sketch count");
        const auto nbits = s.get<std::uint32_t>("sketch length");
        const std::size_t words = (nbits + 63) / 64;
        if (words != 0 && n > s.remaining() / 8 / words) s.corrupt("sketch count exceeds payload");
        b.sketches.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
          BinarySketch sk(nbits);
          sk.mutable_words() = s.get_array<std::uint64_t>(words, "sketch words");
          if (nbits % 64 != 0 && (sk.words().back() >> (nbits % 64)) != 0) s.corrupt("sketch padding bits set");
          b.sketches.push_back(std::move(sk));
        }
      } else if (tag == kInverted) {
        const auto n = s.get<std::uint64_t>("set count");
        const auto length = s.get<std::uint32_t>("list count");
        std::vector<std::vector<InvertedIndex::Entry>> lists(length);
        for (auto& list : lists) {
          const auto len = s.get<std::uint64_t>("list length");
          if (len > s.remaining() / 8) s.corrupt("list length exceeds payload");
          list.reserve(len);
          for (std::uint64_t i = 0; i < len; ++i) {
            const auto set = s.get<std::uint32_t>("entry set");
            const auto cnt = s.get<std::uint32_t>("entry count");
            list.push_back({set, cnt});
          }
        }
        b.index = InvertedIndex(n, std::move(lists));
      } else if (tag == kIds) {
        const auto n = s.get<std::uint64_t>("id count");
        b.ids = s.get_array<std::uint64_t>(n, "ids");
      }
      if (tag != kFilters && !s.done()) s.corrupt("trailing bytes in section");
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kIntegrity) throw;
      fail(ErrorKind::kIntegrity, "index section " + tag_name(tag) + ": " + e.what());
    }
  }
  if (!r.done()) r.corrupt("trailing bytes after last section");

  // Cross-section consistency.
  const auto n = b.ids.size();
  const auto& p = b.params;
  auto consistent = p.code_length >= 1 && p.active_bits >= 1 && p.active_bits <= p.code_length &&
                    b.projection.rows() == p.code_length && b.projection.cols() == p.dim &&
                    b.projection.provenance() == p.provenance && b.filters.size() == n &&
                    b.sketches.size() == n && b.index.num_sets() == n && b.index.length() == p.code_length;
  for (const auto& f : b.filters) consistent = consistent && f.length() == p.code_length;
  for (const auto& s : b.sketches) consistent = consistent && s.size() == p.code_length;
  if (!consistent) fail(ErrorKind::kIntegrity, "index: sections are mutually inconsistent");
  return b;
}

void save_index(const IndexBundle& bundle, const std::filesystem::path& path) {
  write_file(path, serialize_index(bundle));
}

IndexBundle load_index(const std::filesystem::path& path) { return deserialize_index(read_file(path)); }

}  // namespace biovss
