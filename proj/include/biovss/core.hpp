#pragma once

// Dense vector sets and exact set-to-set distances.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "biovss/error.hpp"

namespace biovss {

using SetId = std::uint64_t;

/// A finite set of equal-dimension float vectors, stored row-major.
class VectorSet {
 public:
  VectorSet() = default;
  /// `data` holds m * dim floats. Rejects m == 0, dim == 0 and non-finite values.
  VectorSet(SetId id, std::size_t dim, std::vector<float> data);
  VectorSet(SetId id, const std::vector<std::vector<float>>& vectors);

  SetId id() const noexcept { return id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const std::vector<float>& data() const noexcept { return data_; }

  friend bool operator==(const VectorSet&, const VectorSet&) = default;

 private:
  SetId id_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

/// Collection of vector sets sharing one dimensionality, with unique ids.
class Database {
 public:
  Database() = default;
  Database(std::size_t dim, std::vector<VectorSet> sets);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return sets_.size(); }
  const VectorSet& operator[](std::size_t i) const { return sets_[i]; }
  const std::vector<VectorSet>& sets() const noexcept { return sets_; }
  std::size_t total_vectors() const noexcept;
  std::size_t max_cardinality() const noexcept;

  /// Ordinal of the set with this id, or size() when absent.
  std::size_t find(SetId id) const;

  friend bool operator==(const Database& a, const Database& b) {
    return a.dim_ == b.dim_ && a.sets_ == b.sets_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<VectorSet> sets_;
  std::unordered_map<SetId, std::size_t> by_id_;
};

/// Row-major grid of pairwise distances; rows index the query set.
class DistanceMatrix {
 public:
  DistanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

enum class ElementMetric { kEuclidean };

enum class SetMetric { kHausdorff, kMeanMin, kMin };

SetMetric parse_set_metric(std::string_view name);
std::string_view to_string(SetMetric metric);

double euclidean(std::span<const float> a, std::span<const float> b);

DistanceMatrix pairwise_matrix(const VectorSet& q, const VectorSet& v,
                               ElementMetric metric = ElementMetric::kEuclidean);

// Matrix-level aggregations. All reject an empty matrix.
double aggregate_hausdorff(const DistanceMatrix& m);
double aggregate_mean_min(const DistanceMatrix& m);
double aggregate_min(const DistanceMatrix& m);

double hausdorff(const VectorSet& q, const VectorSet& v);
/// Directional: mean over q of the distance to its nearest member of v.
double mean_min(const VectorSet& q, const VectorSet& v);
double min_dist(const VectorSet& q, const VectorSet& v);

double set_distance(SetMetric metric, const VectorSet& q, const VectorSet& v);

}  // namespace biovss
