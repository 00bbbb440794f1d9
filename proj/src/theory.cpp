#include "biovss/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace biovss::theory {

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  require(entries_.size() == rows_ * cols_, "similarity matrix: entry count does not match shape");
  for (double e : entries_) require(e >= 0.0 && e <= 1.0, "similarity matrix: entries must lie in [0, 1]");
}

double sigma(const SimilarityMatrix& s) {
  require(s.rows() > 0 && s.cols() > 0, "sigma: empty matrix");
  constexpr double kLow = -std::numeric_limits<double>::infinity();
  std::vector<double> row_max(s.rows(), kLow), col_max(s.cols(), kLow);
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) {
      row_max[i] = std::max(row_max[i], s(i, j));
      col_max[j] = std::max(col_max[j], s(i, j));
    }
  return std::min(*std::min_element(row_max.begin(), row_max.end()),
                  *std::min_element(col_max.begin(), col_max.end()));
}

namespace {

// (s (1 - tau) / (tau (1 - s)))^tau * (1 - s) / (1 - tau), in log space.
double chernoff_coefficient(double s, double tau) {
  const double log_ratio = std::log(s) + std::log1p(-tau) - std::log(tau) - std::log1p(-s);
  return std::exp(tau * log_ratio + std::log1p(-s) - std::log1p(-tau));
}

}  // namespace

double gamma_coefficient(double s_max, double tau1) {
  require(s_max > 0.0 && s_max < 1.0, "gamma: s_max must lie in (0, 1)");
  require(tau1 > s_max && tau1 < 1.0, "gamma: tau1 must lie in (s_max, 1)");
  return chernoff_coefficient(s_max, tau1);
}

double xi_coefficient(double s_min, double tau2) {
  require(s_min > 0.0 && s_min < 1.0, "xi: s_min must lie in (0, 1)");
  require(tau2 > 0.0 && tau2 < s_min, "xi: tau2 must lie in (0, s_min)");
  return chernoff_coefficient(s_min, tau2);
}

void BoundParams::validate() const {
  require(n >= 1 && k >= 1 && query_size >= 1 && target_size >= 1, "bound: n, k, m_q, m must be positive");
  require(k < n, "bound: k must be smaller than n");
  require(delta > 0.0 && delta < 1.0, "bound: delta must lie in (0, 1)");
  require(gamma_max > 0.0 && gamma_max < 1.0, "bound: gamma_max must lie in (0, 1)");
  require(xi_max > 0.0 && xi_max < 1.0, "bound: xi_max must lie in (0, 1)");
}

double required_hash_count_real(const BoundParams& p) {
  p.validate();
  const double pairs = static_cast<double>(p.query_size) * static_cast<double>(p.target_size);
  const double upper = std::log(2.0 * static_cast<double>(p.n - p.k) * pairs / p.delta) / std::log(1.0 / p.gamma_max);
  const double lower = std::log(2.0 * static_cast<double>(p.k) * pairs / p.delta) / std::log(1.0 / p.xi_max);
  return std::max(upper, lower);
}

std::uint64_t required_hash_count(const BoundParams& p) {
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(required_hash_count_real(p))));
}

double pair_similarity(std::span<const float> q, std::span<const float> v) {
  require(q.size() == v.size(), "similarity: dimension mismatch");
  double dot = 0.0, nq = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    dot += static_cast<double>(q[i]) * v[i];
    nq += static_cast<double>(q[i]) * q[i];
    nv += static_cast<double>(v[i]) * v[i];
  }
  require(nq > 0.0 && nv > 0.0, "similarity: zero-norm vector");
  const double cosine = std::clamp(dot / std::sqrt(nq * nv), -1.0, 1.0);
  return (1.0 + cosine) / 2.0;
}

double connectivity(const VectorSet& q, const VectorSet& v) {
  require(q.dim() == v.dim(), "connectivity: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) total += pair_similarity(q.vector(i), v.vector(j));
  return total;
}

TailSimulation tail_bound_simulation(double s, std::size_t hashes, std::size_t trials,
                                     const std::vector<double>& thresholds, std::uint64_t seed) {
  require(s > 0.0 && s < 1.0, "tail simulation: s must lie in (0, 1)");
  require(hashes >= 1, "tail simulation: L must be >= 1");
  require(trials >= 1, "tail simulation: trials must be >= 1");

  std::mt19937_64 rng(seed);
  std::binomial_distribution<int> draw(static_cast<int>(hashes), s);
  // histogram[j] = number of trials with exactly j collisions
  std::vector<std::size_t> histogram(hashes + 1, 0);
  for (std::size_t t = 0; t < trials; ++t) ++histogram[static_cast<std::size_t>(draw(rng))];

  const double L = static_cast<double>(hashes);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto row = [&](double tau, std::size_t hits, double bound) {
    const double f = static_cast<double>(hits) / static_cast<double>(trials);
    return TailRow{tau, f, std::sqrt(f * (1.0 - f) / static_cast<double>(trials)), bound};
  };

  TailSimulation out{s, hashes, trials, {}, {}};
  for (double tau : thresholds) {
    if (tau > s) {
      std::size_t hits = 0;
      for (std::size_t j = 0; j <= hashes; ++j)
        if (static_cast<double>(j) >= tau * L) hits += histogram[j];
      const double bound = tau < 1.0 ? std::pow(gamma_coefficient(s, tau), L) : nan;
      out.upper.push_back(row(tau, hits, bound));
    } else if (tau < s) {
      std::size_t hits = 0;
      for (std::size_t j = 0; j <= hashes; ++j)
        if (static_cast<double>(j) <= tau * L) hits += histogram[j];
      const double bound = tau > 0.0 ? std::pow(xi_coefficient(s, tau), L) : nan;
      out.lower.push_back(row(tau, hits, bound));
    }
  }
  return out;
}

}  // namespace biovss::theory
