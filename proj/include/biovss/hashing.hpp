#pragma once

// Winner-take-all sparse binary codes over a projection matrix, plus a
// trainable projection with per-batch update-magnitude logging.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "biovss/bits.hpp"
#include "biovss/core.hpp"

namespace biovss {

enum class Provenance : std::uint8_t { kRandomSparse = 0, kTrained = 1 };

class ProjectionMatrix {
 public:
  ProjectionMatrix() = default;
  ProjectionMatrix(std::size_t rows, std::size_t cols, std::vector<float> weights,
                   Provenance provenance, std::uint64_t seed);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Provenance provenance() const noexcept { return provenance_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<float>& weights() const noexcept { return weights_; }
  std::span<const float> row(std::size_t i) const { return {weights_.data() + i * cols_, cols_}; }

  /// Trained projections expect unit-norm inputs.
  bool normalizes_inputs() const noexcept { return provenance_ == Provenance::kTrained; }

  /// Wv, accumulated in double. Normalizes v first when normalizes_inputs().
  std::vector<double> project(std::span<const float> v) const;

  friend bool operator==(const ProjectionMatrix&, const ProjectionMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> weights_;
  Provenance provenance_ = Provenance::kRandomSparse;
  std::uint64_t seed_ = 0;
};

/// b-bit code with exactly L set bits, stored as increasing positions.
class SparseBinaryCode {
 public:
  SparseBinaryCode() = default;
  SparseBinaryCode(std::size_t length, std::vector<std::uint32_t> positions);

  std::size_t length() const noexcept { return length_; }
  const std::vector<std::uint32_t>& positions() const noexcept { return positions_; }
  std::size_t popcount() const noexcept { return positions_.size(); }
  BitVector to_bits() const;

  friend bool operator==(const SparseBinaryCode&, const SparseBinaryCode&) = default;

 private:
  std::size_t length_ = 0;
  std::vector<std::uint32_t> positions_;
};

/// One code list per database set, in database order.
struct EncodedDatabase {
  std::size_t code_length = 0;
  std::size_t active_bits = 0;
  std::vector<std::vector<SparseBinaryCode>> sets;

  friend bool operator==(const EncodedDatabase&, const EncodedDatabase&) = default;
};

inline constexpr double kDefaultProjectionDensity = 0.1;

/// Sparse Gaussian projection: each entry is nonzero with probability
/// `density`, drawn from N(0, 1). Deterministic in `seed`.
ProjectionMatrix random_projection(std::uint64_t seed, std::size_t rows, std::size_t cols,
                                   double density = kDefaultProjectionDensity);

/// Sets the `active_bits` largest coordinates of Wv; ties go to the lower index.
SparseBinaryCode wta_encode(const ProjectionMatrix& w, std::span<const float> v,
                            std::size_t active_bits);

std::vector<SparseBinaryCode> encode_set(const ProjectionMatrix& w, const VectorSet& set,
                                         std::size_t active_bits);

EncodedDatabase encode_database(const Database& db, const ProjectionMatrix& w,
                                std::size_t active_bits);

struct TrainingLog {
  std::size_t batch_size = 0;
  std::vector<double> update_magnitudes;  // M_t = max |dW_ij| over batch t
};

struct TrainingOptions {
  std::size_t epochs = 1;
  std::size_t batch_size = 10000;
  double learning_rate = 0.05;  // initial; decays linearly to zero over the run
  std::uint64_t seed = 0;
  // Called after each batch with the batch index and the current rows x cols weights.
  std::function<void(std::size_t, std::span<const double>)> on_batch;
};

struct TrainedProjection {
  ProjectionMatrix projection;
  TrainingLog log;
};

/// Pluggable training rule for the learned projection.
class ProjectionTrainer {
 public:
  virtual ~ProjectionTrainer() = default;
  virtual TrainedProjection train(const Database& db, std::size_t rows,
                                  const TrainingOptions& options) const = 0;
};

// Competitive Hebbian rule on L2-normalized inputs: the row with the largest
// <w, x> moves by lr * (x - <x, w> w) and is renormalized. Rows start as
// normalized Gaussian draws. Inputs are shuffled per epoch.
class HebbianTrainer final : public ProjectionTrainer {
 public:
  TrainedProjection train(const Database& db, std::size_t rows,
                          const TrainingOptions& options) const override;
};

TrainedProjection train_projection(const Database& db, std::size_t rows,
                                   const TrainingOptions& options = {});

}  // namespace biovss
