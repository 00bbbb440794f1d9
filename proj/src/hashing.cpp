#include "biovss/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace biovss {

ProjectionMatrix::ProjectionMatrix(std::size_t rows, std::size_t cols, std::vector<float> weights,
                                   Provenance provenance, std::uint64_t seed)
    : rows_(rows), cols_(cols), weights_(std::move(weights)), provenance_(provenance), seed_(seed) {
  require(rows_ >= 1 && cols_ >= 1, "projection: shape must be positive");
  require(weights_.size() == rows_ * cols_, "projection: weight count does not match shape");
  for (float w : weights_) require(std::isfinite(w), "projection: non-finite weight");
}

std::vector<double> ProjectionMatrix::project(std::span<const float> v) const {
  require(v.size() == cols_, "projection: input has dimension " + std::to_string(v.size()) +
                                 ", expected " + std::to_string(cols_));
  std::vector<double> x(v.begin(), v.end());
  if (normalizes_inputs()) {
    double norm = 0.0;
    for (double c : x) norm += c * c;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& c : x) c /= norm;
  }
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const float* w = weights_.data() + i * cols_;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += static_cast<double>(w[j]) * x[j];
    out[i] = acc;
  }
  return out;
}

SparseBinaryCode::SparseBinaryCode(std::size_t length, std::vector<std::uint32_t> positions)
    : length_(length), positions_(std::move(positions)) {
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    require(positions_[i] < length_, "code: bit position out of range");
    require(i == 0 || positions_[i - 1] < positions_[i], "code: positions must be strictly increasing");
  }
}

BitVector SparseBinaryCode::to_bits() const {
  BitVector bits(length_);
  for (auto p : positions_) bits.set(p);
  return bits;
}

ProjectionMatrix random_projection(std::uint64_t seed, std::size_t rows, std::size_t cols,
                                   double density) {
  require(rows >= 1 && cols >= 1, "random_projection: shape must be positive");
  require(density > 0.0 && density <= 1.0, "random_projection: density must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(density);
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::vector<float> w(rows * cols, 0.0f);
  for (float& x : w)
    if (keep(rng)) x = gauss(rng);
  return ProjectionMatrix(rows, cols, std::move(w), Provenance::kRandomSparse, seed);
}

SparseBinaryCode wta_encode(const ProjectionMatrix& w, std::span<const float> v,
                            std::size_t active_bits) {
  require(active_bits >= 1 && active_bits <= w.rows(),
          "wta_encode: active bits must lie in [1, " + std::to_string(w.rows()) + "]");
  const auto activation = w.project(v);
  std::vector<std::uint32_t> idx(activation.size());
  std::iota(idx.begin(), idx.end(), 0u);
  auto stronger = [&](std::uint32_t a, std::uint32_t b) {
    return activation[a] != activation[b] ? activation[a] > activation[b] : a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(active_bits - 1), idx.end(),
                   stronger);
  idx.resize(active_bits);
  std::sort(idx.begin(), idx.end());
  return SparseBinaryCode(w.rows(), std::move(idx));
}

std::vector<SparseBinaryCode> encode_set(const ProjectionMatrix& w, const VectorSet& set,
                                         std::size_t active_bits) {
  require(set.dim() == w.cols(), "encode: set dimension " + std::to_string(set.dim()) +
                                     " does not match projection input " + std::to_string(w.cols()));
  std::vector<SparseBinaryCode> codes;
  codes.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) codes.push_back(wta_encode(w, set.vector(i), active_bits));
  return codes;
}

EncodedDatabase encode_database(const Database& db, const ProjectionMatrix& w,
                                std::size_t active_bits) {
  require(db.dim() == w.cols(), "encode_database: dimension mismatch");
  EncodedDatabase out;
  out.code_length = w.rows();
  out.active_bits = active_bits;
  out.sets.reserve(db.size());
  for (const auto& s : db.sets()) out.sets.push_back(encode_set(w, s, active_bits));
  return out;
}

namespace {

void normalize(std::span<double> x) {
  double n = 0.0;
  for (double c : x) n += c * c;
  n = std::sqrt(n);
  if (n > 0.0)
    for (double& c : x) c /= n;
}

}  // namespace

TrainedProjection HebbianTrainer::train(const Database& db, std::size_t rows,
                                        const TrainingOptions& options) const {
  require(db.size() >= 1, "train_projection: empty database");
  require(rows >= 1, "train_projection: rows must be >= 1");
  require(options.epochs >= 1, "train_projection: epochs must be >= 1");
  require(options.batch_size >= 1, "train_projection: batch size must be >= 1");
  require(options.learning_rate > 0.0, "train_projection: learning rate must be positive");

  const std::size_t d = db.dim();
  std::vector<double> inputs;
  inputs.reserve(db.total_vectors() * d);
  for (const auto& s : db.sets())
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto v = s.vector(i);
      const auto start = inputs.size();
      inputs.insert(inputs.end(), v.begin(), v.end());
      normalize(std::span<double>(inputs.data() + start, d));
    }
  const std::size_t count = inputs.size() / d;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> w(rows * d);
  for (double& x : w) x = gauss(rng);
  for (std::size_t r = 0; r < rows; ++r) normalize(std::span<double>(w.data() + r * d, d));

  TrainingLog log;
  log.batch_size = options.batch_size;
  const double total_steps = static_cast<double>(options.epochs * count);
  std::size_t step = 0;

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Original contents of rows touched during the current batch.
  std::vector<std::size_t> touched;
  std::vector<char> is_touched(rows, 0);
  std::vector<double> before(rows * d);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < count; start += options.batch_size) {
      const std::size_t stop = std::min(count, start + options.batch_size);
      for (std::size_t t = start; t < stop; ++t, ++step) {
        const double* x = inputs.data() + order[t] * d;
        std::size_t winner = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows; ++r) {
          const double* wr = w.data() + r * d;
          double dot = 0.0;
          for (std::size_t j = 0; j < d; ++j) dot += wr[j] * x[j];
          if (dot > best) {
            best = dot;
            winner = r;
          }
        }
        double* wr = w.data() + winner * d;
        if (!is_touched[winner]) {
          is_touched[winner] = 1;
          touched.push_back(winner);
          std::copy(wr, wr + d, before.begin() + static_cast<std::ptrdiff_t>(winner * d));
        }
        const double lr = options.learning_rate * (1.0 - static_cast<double>(step) / total_steps);
        for (std::size_t j = 0; j < d; ++j) wr[j] += lr * (x[j] - best * wr[j]);
        normalize(std::span<double>(wr, d));
      }
      double magnitude = 0.0;
      for (auto r : touched) {
        for (std::size_t j = 0; j < d; ++j)
          magnitude = std::max(magnitude, std::abs(w[r * d + j] - before[r * d + j]));
        is_touched[r] = 0;
      }
      touched.clear();
      log.update_magnitudes.push_back(magnitude);
      if (options.on_batch) options.on_batch(log.update_magnitudes.size() - 1, w);
    }
  }

  std::vector<float> weights(w.begin(), w.end());
  // Re-normalize in float so stored rows are unit-norm at float precision.
  for (std::size_t r = 0; r < rows; ++r) {
    double n = 0.0;
    for (std::size_t j = 0; j < d; ++j) n += static_cast<double>(weights[r * d + j]) * weights[r * d + j];
    n = std::sqrt(n);
    for (std::size_t j = 0; j < d; ++j) weights[r * d + j] = static_cast<float>(weights[r * d + j] / n);
  }
  return {ProjectionMatrix(rows, d, std::move(weights), Provenance::kTrained, options.seed),
          std::move(log)};
}

TrainedProjection train_projection(const Database& db, std::size_t rows,
                                   const TrainingOptions& options) {
  return HebbianTrainer{}.train(db, rows, options);
}

}  // namespace biovss
