#pragma once

// Analytical quantities behind the correctness guarantee: the min-max
// similarity aggregate, Chernoff tail coefficients, the hash-count bound,
// set connectivity, and a Monte-Carlo check of the tail bounds.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "biovss/core.hpp"

namespace biovss::theory {

/// Row-major similarity scores in [0, 1].
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  const std::vector<double>& entries() const noexcept { return entries_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

/// min(min_i max_j s_ij, min_j max_i s_ij).
double sigma(const SimilarityMatrix& s);

/// Upper-tail coefficient: Pr[sigma(S_hat) >= tau1] <= m_q * m * gamma^L.
/// Requires 0 < s_max < tau1 < 1.
double gamma_coefficient(double s_max, double tau1);

/// Lower-tail coefficient: Pr[sigma(S_hat) <= tau2] <= m_q * m * xi^L.
/// Requires 0 < tau2 < s_min < 1.
double xi_coefficient(double s_min, double tau2);

struct BoundParams {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::uint64_t query_size = 0;   // m_q
  std::uint64_t target_size = 0;  // m
  double delta = 0.05;
  double gamma_max = 0.9;
  double xi_max = 0.9;

  void validate() const;
};

/// Real-valued hash count satisfying both tail requirements.
double required_hash_count_real(const BoundParams& p);
/// Ceiling of required_hash_count_real.
std::uint64_t required_hash_count(const BoundParams& p);

/// sim(q, v) = (1 + cos(q, v)) / 2. Rejects zero-norm vectors.
double pair_similarity(std::span<const float> q, std::span<const float> v);
/// Sum of pair_similarity over all cross pairs.
double connectivity(const VectorSet& q, const VectorSet& v);

struct TailRow {
  double tau;
  double frequency;       // empirical Pr[s_hat >= tau] (upper) or Pr[s_hat <= tau] (lower)
  double standard_error;  // sqrt(f (1 - f) / trials)
  double bound;           // gamma^L or xi^L; NaN when tau is outside the coefficient's domain
};

struct TailSimulation {
  double s;
  std::size_t hashes;
  std::size_t trials;
  std::vector<TailRow> upper;
  std::vector<TailRow> lower;
};

/// Draws s_hat = Binomial(L, s) / L `trials` times and tabulates tail
/// frequencies at each threshold: thresholds above s go to `upper`, below s to `lower`.
TailSimulation tail_bound_simulation(double s, std::size_t hashes, std::size_t trials,
                                     const std::vector<double>& thresholds, std::uint64_t seed);

}  // namespace biovss::theory
