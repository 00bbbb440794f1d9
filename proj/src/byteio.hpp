#pragma once

// Little-endian byte buffers for the on-disk formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "biovss/error.hpp"

namespace biovss::detail {

static_assert(std::endian::native == std::endian::little, "on-disk formats assume a little-endian host");

class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }

  template <typename T>
  void put_array(std::span<const T> values) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
    buf_.insert(buf_.end(), p, p + values.size_bytes());
  }

  void put_bytes(std::span<const std::uint8_t> bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }

  std::vector<std::uint8_t>& bytes() noexcept { return buf_; }
  std::size_t size() const noexcept { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string context, std::size_t base_offset = 0)
      : bytes_(bytes), context_(std::move(context)), base_(base_offset) {}

  template <typename T>
  T get(const char* what) {
    static_assert(std::is_trivially_copyable_v<T>);
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  template <typename T>
  std::vector<T> get_array(std::size_t count, const char* what) {
    static_assert(std::is_trivially_copyable_v<T>);
    if (count > remaining() / sizeof(T)) truncated(count * sizeof(T), what);
    std::vector<T> out(count);
    if (count != 0) std::memcpy(out.data(), bytes_.data() + pos_, count * sizeof(T));
    pos_ += count * sizeof(T);
    return out;
  }

  std::span<const std::uint8_t> get_bytes(std::size_t count, const char* what) {
    need(count, what);
    auto s = bytes_.subspan(pos_, count);
    pos_ += count;
    return s;
  }

  std::size_t offset() const noexcept { return base_ + pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  bool done() const noexcept { return pos_ == bytes_.size(); }

  [[noreturn]] void corrupt(const std::string& msg) const {
    fail(ErrorKind::kIntegrity, context_ + ": " + msg + " at byte offset " + std::to_string(offset()));
  }

 private:
  void need(std::size_t n, const char* what) {
    if (n > remaining()) truncated(n, what);
  }
  [[noreturn]] void truncated(std::size_t n, const char* what) const {
    fail(ErrorKind::kIntegrity, context_ + ": truncated while reading " + what + " (need " +
                                    std::to_string(n) + " bytes, " + std::to_string(remaining()) +
                                    " left) at byte offset " + std::to_string(offset()));
  }

  std::span<const std::uint8_t> bytes_;
  std::string context_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

}  // namespace biovss::detail
