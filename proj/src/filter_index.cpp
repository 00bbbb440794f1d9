#include "biovss/filter_index.hpp"

#include <algorithm>

#include "byteio.hpp"

namespace biovss {

std::uint64_t CountBloomFilter::total() const noexcept {
  std::uint64_t t = 0;
  for (auto c : counters) t += c;
  return t;
}

CountBloomFilter build_count_filter(std::span<const SparseBinaryCode> codes, std::size_t length) {
  CountBloomFilter f{std::vector<std::uint32_t>(length, 0)};
  for (const auto& code : codes) {
    require(code.length() == length, "count filter: code length " + std::to_string(code.length()) +
                                         " does not match filter length " + std::to_string(length));
    for (auto p : code.positions()) ++f.counters[p];
  }
  return f;
}

BinarySketch build_sketch(std::span<const SparseBinaryCode> codes, std::size_t length) {
  BinarySketch s(length);
  for (const auto& code : codes) {
    require(code.length() == length, "sketch: code length " + std::to_string(code.length()) +
                                         " does not match sketch length " + std::to_string(length));
    for (auto p : code.positions()) s.set(p);
  }
  return s;
}

std::vector<CountBloomFilter> build_count_filters(const EncodedDatabase& encoded, std::size_t length) {
  std::vector<CountBloomFilter> out;
  out.reserve(encoded.sets.size());
  for (const auto& codes : encoded.sets) out.push_back(build_count_filter(codes, length));
  return out;
}

std::vector<BinarySketch> build_sketches(const EncodedDatabase& encoded, std::size_t length) {
  std::vector<BinarySketch> out;
  out.reserve(encoded.sets.size());
  for (const auto& codes : encoded.sets) out.push_back(build_sketch(codes, length));
  return out;
}

InvertedIndex::InvertedIndex(std::size_t num_sets, std::vector<std::vector<Entry>> lists)
    : num_sets_(num_sets), lists_(std::move(lists)) {
  for (const auto& list : lists_) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      require(list[i].set < num_sets_, "inverted index: set ordinal out of range");
      require(list[i].count >= 1, "inverted index: zero count entry");
      if (i > 0) {
        const auto& prev = list[i - 1];
        require(prev.count > list[i].count || (prev.count == list[i].count && prev.set < list[i].set),
                "inverted index: list not ordered by (count desc, set asc)");
      }
    }
  }
}

std::size_t InvertedIndex::total_entries() const noexcept {
  std::size_t n = 0;
  for (const auto& l : lists_) n += l.size();
  return n;
}

InvertedIndex build_inverted_index(std::span<const CountBloomFilter> filters) {
  const std::size_t length = filters.empty() ? 0 : filters.front().length();
  std::vector<std::vector<InvertedIndex::Entry>> lists(length);
  for (std::size_t j = 0; j < filters.size(); ++j) {
    require(filters[j].length() == length, "inverted index: filters differ in length");
    for (std::size_t p = 0; p < length; ++p)
      if (filters[j].counters[p] > 0)
        lists[p].push_back({static_cast<std::uint32_t>(j), filters[j].counters[p]});
  }
  // Appending in ordinal order makes a stable sort on count alone yield the
  // (count desc, ordinal asc) order.
  for (auto& list : lists)
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.count > b.count; });
  return InvertedIndex(filters.size(), std::move(lists));
}

StoreLayout parse_store_layout(std::string_view name) {
  if (name == "dense") return StoreLayout::kDense;
  if (name == "coo") return StoreLayout::kCoo;
  if (name == "csr") return StoreLayout::kCsr;
  fail(ErrorKind::kInvalidArgument, "unknown storage layout '" + std::string(name) + "'");
}

std::string_view to_string(StoreLayout layout) {
  switch (layout) {
    case StoreLayout::kDense: return "dense";
    case StoreLayout::kCoo: return "coo";
    case StoreLayout::kCsr: return "csr";
  }
  return "?";
}

std::size_t SparseStore::nonzeros() const noexcept {
  if (layout == StoreLayout::kDense)
    return static_cast<std::size_t>(std::count_if(dense.begin(), dense.end(), [](auto v) { return v != 0; }));
  return values.size();
}

std::size_t SparseStore::byte_size() const noexcept {
  switch (layout) {
    case StoreLayout::kDense: return dense.size() * sizeof(std::uint32_t);
    case StoreLayout::kCoo:
      return (coo_rows.size() + coo_cols.size() + values.size()) * sizeof(std::uint32_t);
    case StoreLayout::kCsr:
      return csr_row_ptr.size() * sizeof(std::uint64_t) + (csr_cols.size() + values.size()) * sizeof(std::uint32_t);
  }
  return 0;
}

SparseStore encode_store(std::span<const CountBloomFilter> filters, StoreLayout layout) {
  SparseStore s;
  s.layout = layout;
  s.rows = filters.size();
  s.cols = filters.empty() ? 0 : static_cast<std::uint32_t>(filters.front().length());
  for (const auto& f : filters) require(f.length() == s.cols, "encode_store: filters differ in length");

  switch (layout) {
    case StoreLayout::kDense:
      s.dense.reserve(s.rows * s.cols);
      for (const auto& f : filters) s.dense.insert(s.dense.end(), f.counters.begin(), f.counters.end());
      break;
    case StoreLayout::kCoo:
      for (std::size_t r = 0; r < filters.size(); ++r)
        for (std::uint32_t c = 0; c < s.cols; ++c)
          if (auto v = filters[r].counters[c]; v != 0) {
            s.coo_rows.push_back(static_cast<std::uint32_t>(r));
            s.coo_cols.push_back(c);
            s.values.push_back(v);
          }
      break;
    case StoreLayout::kCsr:
      s.csr_row_ptr.reserve(s.rows + 1);
      s.csr_row_ptr.push_back(0);
      for (const auto& f : filters) {
        for (std::uint32_t c = 0; c < s.cols; ++c)
          if (auto v = f.counters[c]; v != 0) {
            s.csr_cols.push_back(c);
            s.values.push_back(v);
          }
        s.csr_row_ptr.push_back(s.values.size());
      }
      break;
  }
  return s;
}

namespace {

[[noreturn]] void corrupt_store(const std::string& msg) { fail(ErrorKind::kIntegrity, "filter store: " + msg); }

}  // namespace

std::vector<CountBloomFilter> decode_store(const SparseStore& s) {
  std::vector<CountBloomFilter> out(s.rows, CountBloomFilter{std::vector<std::uint32_t>(s.cols, 0)});
  switch (s.layout) {
    case StoreLayout::kDense:
      if (s.dense.size() != s.rows * s.cols) corrupt_store("dense array size does not match shape");
      for (std::size_t r = 0; r < s.rows; ++r)
        std::copy_n(s.dense.begin() + static_cast<std::ptrdiff_t>(r * s.cols), s.cols, out[r].counters.begin());
      break;
    case StoreLayout::kCoo: {
      if (s.coo_rows.size() != s.values.size() || s.coo_cols.size() != s.values.size())
        corrupt_store("COO arrays differ in length");
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        const auto r = s.coo_rows[i], c = s.coo_cols[i];
        if (r >= s.rows || c >= s.cols) corrupt_store("COO coordinate out of range");
        if (s.values[i] == 0) corrupt_store("COO stores an explicit zero");
        if (i > 0 && (s.coo_rows[i - 1] > r || (s.coo_rows[i - 1] == r && s.coo_cols[i - 1] >= c)))
          corrupt_store("COO coordinates not strictly increasing");
        out[r].counters[c] = s.values[i];
      }
      break;
    }
    case StoreLayout::kCsr: {
      if (s.csr_row_ptr.size() != s.rows + 1 || s.csr_row_ptr.front() != 0 ||
          s.csr_row_ptr.back() != s.values.size() || s.csr_cols.size() != s.values.size())
        corrupt_store("CSR array sizes inconsistent");
      for (std::size_t r = 0; r < s.rows; ++r) {
        const auto begin = s.csr_row_ptr[r], end = s.csr_row_ptr[r + 1];
        if (begin > end || end > s.values.size()) corrupt_store("CSR row pointers not monotone");
        for (auto i = begin; i < end; ++i) {
          const auto c = s.csr_cols[i];
          if (c >= s.cols) corrupt_store("CSR column out of range");
          if (i > begin && s.csr_cols[i - 1] >= c) corrupt_store("CSR columns not strictly increasing");
          if (s.values[i] == 0) corrupt_store("CSR stores an explicit zero");
          out[r].counters[c] = s.values[i];
        }
      }
      break;
    }
    default:
      corrupt_store("unknown layout tag");
  }
  return out;
}

std::vector<std::uint8_t> SparseStore::serialize() const {
  detail::ByteWriter w;
  w.put<std::uint8_t>(static_cast<std::uint8_t>(layout));
  w.put<std::uint64_t>(rows);
  w.put<std::uint32_t>(cols);
  switch (layout) {
    case StoreLayout::kDense:
      w.put_array<std::uint32_t>(dense);
      break;
    case StoreLayout::kCoo:
      w.put<std::uint64_t>(values.size());
      w.put_array<std::uint32_t>(coo_rows);
      w.put_array<std::uint32_t>(coo_cols);
      w.put_array<std::uint32_t>(values);
      break;
    case StoreLayout::kCsr:
      w.put<std::uint64_t>(values.size());
      w.put_array<std::uint64_t>(csr_row_ptr);
      w.put_array<std::uint32_t>(csr_cols);
      w.put_array<std::uint32_t>(values);
      break;
  }
  return std::move(w.bytes());
}

SparseStore SparseStore::deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "filter store");
  SparseStore s;
  const auto tag = r.get<std::uint8_t>("layout");
  if (tag > static_cast<std::uint8_t>(StoreLayout::kCsr)) r.corrupt("unknown layout tag " + std::to_string(tag));
  s.layout = static_cast<StoreLayout>(tag);
  s.rows = r.get<std::uint64_t>("rows");
  s.cols = r.get<std::uint32_t>("cols");
  switch (s.layout) {
    case StoreLayout::kDense:
      if (s.cols != 0 && s.rows > r.remaining() / 4 / s.cols) r.corrupt("dense shape exceeds payload");
      s.dense = r.get_array<std::uint32_t>(s.rows * s.cols, "dense counters");
      break;
    case StoreLayout::kCoo: {
      const auto nnz = r.get<std::uint64_t>("nonzero count");
      s.coo_rows = r.get_array<std::uint32_t>(nnz, "COO rows");
      s.coo_cols = r.get_array<std::uint32_t>(nnz, "COO cols");
      s.values = r.get_array<std::uint32_t>(nnz, "COO values");
      break;
    }
    case StoreLayout::kCsr: {
      const auto nnz = r.get<std::uint64_t>("nonzero count");
      if (s.rows >= r.remaining() / 8) r.corrupt("row count exceeds payload");
      s.csr_row_ptr = r.get_array<std::uint64_t>(s.rows + 1, "CSR row pointers");
      s.csr_cols = r.get_array<std::uint32_t>(nnz, "CSR columns");
      s.values = r.get_array<std::uint32_t>(nnz, "CSR values");
      break;
    }
  }
  if (!r.done()) r.corrupt("trailing bytes after filter store");
  decode_store(s);  // structural validation
  return s;
}

}  // namespace biovss
