#pragma once

// Shared fixtures and independent reference implementations for tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "biovss/core.hpp"
#include "biovss/hashing.hpp"

namespace biovss::testing {

inline std::vector<float> random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::vector<float> v(dim);
  for (auto& x : v) x = n(rng);
  return v;
}

inline VectorSet random_set(std::mt19937_64& rng, SetId id, std::size_t m, std::size_t dim) {
  std::vector<float> data;
  for (std::size_t i = 0; i < m; ++i) {
    auto v = random_vector(rng, dim);
    data.insert(data.end(), v.begin(), v.end());
  }
  return VectorSet(id, dim, std::move(data));
}

inline Database random_database(std::mt19937_64& rng, std::size_t n, std::size_t max_m, std::size_t dim) {
  std::uniform_int_distribution<std::size_t> card(1, max_m);
  std::vector<VectorSet> sets;
  for (std::size_t j = 0; j < n; ++j) sets.push_back(random_set(rng, 1000 + 3 * j, card(rng), dim));
  return Database(dim, std::move(sets));
}

inline long double naive_euclidean(std::span<const float> a, std::span<const float> b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

// Directed max-of-min both ways, computed with explicit loops.
template <typename Dist>
double naive_hausdorff(std::size_t rows, std::size_t cols, Dist dist) {
  double forward = 0, backward = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols; ++j) best = std::min(best, static_cast<double>(dist(i, j)));
    forward = std::max(forward, best);
  }
  for (std::size_t j = 0; j < cols; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows; ++i) best = std::min(best, static_cast<double>(dist(i, j)));
    backward = std::max(backward, best);
  }
  return std::max(forward, backward);
}

inline double naive_set_hausdorff(const VectorSet& q, const VectorSet& v) {
  return naive_hausdorff(q.size(), v.size(), [&](std::size_t i, std::size_t j) {
    return naive_euclidean(q.vector(i), v.vector(j));
  });
}

// Reference top-k: compute every distance, sort (distance, id), cut.
inline std::vector<std::pair<double, SetId>> naive_topk(const VectorSet& q, const Database& db, std::size_t k,
                                                        SetMetric metric = SetMetric::kHausdorff) {
  std::vector<std::pair<double, SetId>> all;
  for (const auto& s : db.sets()) all.emplace_back(set_distance(metric, q, s), s.id());
  std::sort(all.begin(), all.end());
  all.resize(std::min(k, all.size()));
  return all;
}

inline std::size_t naive_bit_hamming(const SparseBinaryCode& a, const SparseBinaryCode& b) {
  std::vector<int> x(a.length(), 0), y(b.length(), 0);
  for (auto p : a.positions()) x[p] = 1;
  for (auto p : b.positions()) y[p] = 1;
  std::size_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
  return d;
}

}  // namespace biovss::testing
