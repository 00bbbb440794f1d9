#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "biovss/error.hpp"

namespace biovss {

// Fixed-length bitmap packed into 64-bit words. Bits past size() are zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t nbits)
      : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  std::size_t size() const noexcept { return nbits_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }
  std::vector<std::uint64_t>& mutable_words() noexcept { return words_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

  std::size_t popcount() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  BitVector& operator|=(const BitVector& o) {
    require(o.nbits_ == nbits_, "bit vector length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::size_t hamming(const BitVector& a, const BitVector& b) {
  require(a.size() == b.size(), "hamming: length mismatch");
  const auto& wa = a.words();
  const auto& wb = b.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i)
    n += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return n;
}

inline std::size_t and_popcount(const BitVector& a, const BitVector& b) {
  require(a.size() == b.size(), "and_popcount: length mismatch");
  const auto& wa = a.words();
  const auto& wb = b.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i)
    n += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  return n;
}

}  // namespace biovss
