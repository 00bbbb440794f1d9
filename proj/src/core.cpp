#include "biovss/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace biovss {

VectorSet::VectorSet(SetId id, std::size_t dim, std::vector<float> data)
    : id_(id), dim_(dim), data_(std::move(data)) {
  require(dim_ >= 1, "vector set: dimension must be >= 1");
  require(!data_.empty(), "vector set " + std::to_string(id_) + ": must contain at least one vector");
  require(data_.size() % dim_ == 0, "vector set " + std::to_string(id_) + ": data length not a multiple of dim");
  for (float x : data_)
    require(std::isfinite(x), "vector set " + std::to_string(id_) + ": non-finite component");
}

namespace {

std::vector<float> flatten(const std::vector<std::vector<float>>& vectors, std::size_t& dim) {
  dim = vectors.empty() ? 0 : vectors.front().size();
  std::vector<float> out;
  out.reserve(vectors.size() * dim);
  for (const auto& v : vectors) {
    require(v.size() == dim, "vector set: mixed dimensionality");
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace

VectorSet::VectorSet(SetId id, const std::vector<std::vector<float>>& vectors) {
  std::size_t dim = 0;
  auto data = flatten(vectors, dim);
  *this = VectorSet(id, dim, std::move(data));
}

Database::Database(std::size_t dim, std::vector<VectorSet> sets)
    : dim_(dim), sets_(std::move(sets)) {
  require(dim_ >= 1, "database: dimension must be >= 1");
  require(!sets_.empty(), "database: must contain at least one set");
  by_id_.reserve(sets_.size());
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    require(sets_[i].dim() == dim_, "database: set " + std::to_string(sets_[i].id()) +
                                        " has dimension " + std::to_string(sets_[i].dim()) +
                                        ", expected " + std::to_string(dim_));
    require(by_id_.emplace(sets_[i].id(), i).second,
            "database: duplicate set id " + std::to_string(sets_[i].id()));
  }
}

std::size_t Database::total_vectors() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sets_) n += s.size();
  return n;
}

std::size_t Database::max_cardinality() const noexcept {
  std::size_t m = 0;
  for (const auto& s : sets_) m = std::max(m, s.size());
  return m;
}

std::size_t Database::find(SetId id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? sets_.size() : it->second;
}

DistanceMatrix::DistanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  require(entries_.size() == rows_ * cols_, "distance matrix: entry count does not match shape");
  for (double e : entries_)
    require(std::isfinite(e) && e >= 0.0, "distance matrix: entries must be finite and >= 0");
}

SetMetric parse_set_metric(std::string_view name) {
  if (name == "hausdorff") return SetMetric::kHausdorff;
  if (name == "meanmin") return SetMetric::kMeanMin;
  if (name == "min") return SetMetric::kMin;
  fail(ErrorKind::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(SetMetric metric) {
  switch (metric) {
    case SetMetric::kHausdorff: return "hausdorff";
    case SetMetric::kMeanMin: return "meanmin";
    case SetMetric::kMin: return "min";
  }
  return "?";
}

double euclidean(std::span<const float> a, std::span<const float> b) {
  require(a.size() == b.size(), "euclidean: dimension mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

DistanceMatrix pairwise_matrix(const VectorSet& q, const VectorSet& v, ElementMetric) {
  require(q.dim() == v.dim(), "pairwise_matrix: dimension mismatch");
  std::vector<double> e;
  e.reserve(q.size() * v.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) e.push_back(euclidean(q.vector(i), v.vector(j)));
  return DistanceMatrix(q.size(), v.size(), std::move(e));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Row minima and column minima of a grid given by `at(i, j)`.
template <typename At>
void row_col_minima(std::size_t rows, std::size_t cols, At&& at, std::vector<double>& row_min,
                    std::vector<double>& col_min) {
  row_min.assign(rows, kInf);
  col_min.assign(cols, kInf);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double d = at(i, j);
      row_min[i] = std::min(row_min[i], d);
      col_min[j] = std::min(col_min[j], d);
    }
  }
}

double hausdorff_from_minima(const std::vector<double>& row_min, const std::vector<double>& col_min) {
  const double forward = *std::max_element(row_min.begin(), row_min.end());
  const double backward = *std::max_element(col_min.begin(), col_min.end());
  return std::max(forward, backward);
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

double aggregate_hausdorff(const DistanceMatrix& m) {
  require(!m.empty(), "aggregate_hausdorff: empty matrix");
  std::vector<double> rmin, cmin;
  row_col_minima(m.rows(), m.cols(), [&](std::size_t i, std::size_t j) { return m(i, j); }, rmin, cmin);
  return hausdorff_from_minima(rmin, cmin);
}

double aggregate_mean_min(const DistanceMatrix& m) {
  require(!m.empty(), "aggregate_mean_min: empty matrix");
  std::vector<double> rmin, cmin;
  row_col_minima(m.rows(), m.cols(), [&](std::size_t i, std::size_t j) { return m(i, j); }, rmin, cmin);
  return mean_of(rmin);
}

double aggregate_min(const DistanceMatrix& m) {
  require(!m.empty(), "aggregate_min: empty matrix");
  double best = kInf;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) best = std::min(best, m(i, j));
  return best;
}

// The direct forms below evaluate each pair once with the same euclidean() call
// that pairwise_matrix uses, so they agree bit-for-bit with the matrix route.

double hausdorff(const VectorSet& q, const VectorSet& v) {
  require(q.dim() == v.dim(), "hausdorff: dimension mismatch");
  std::vector<double> rmin, cmin;
  row_col_minima(q.size(), v.size(),
                 [&](std::size_t i, std::size_t j) { return euclidean(q.vector(i), v.vector(j)); },
                 rmin, cmin);
  return hausdorff_from_minima(rmin, cmin);
}

double mean_min(const VectorSet& q, const VectorSet& v) {
  require(q.dim() == v.dim(), "mean_min: dimension mismatch");
  std::vector<double> rmin(q.size(), kInf);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      rmin[i] = std::min(rmin[i], euclidean(q.vector(i), v.vector(j)));
  return mean_of(rmin);
}

double min_dist(const VectorSet& q, const VectorSet& v) {
  require(q.dim() == v.dim(), "min_dist: dimension mismatch");
  double best = kInf;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) best = std::min(best, euclidean(q.vector(i), v.vector(j)));
  return best;
}

double set_distance(SetMetric metric, const VectorSet& q, const VectorSet& v) {
  switch (metric) {
    case SetMetric::kHausdorff: return hausdorff(q, v);
    case SetMetric::kMeanMin: return mean_min(q, v);
    case SetMetric::kMin: return min_dist(q, v);
  }
  fail(ErrorKind::kInvalidArgument, "set_distance: unknown metric");
}

}  // namespace biovss
