#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "augplan/common.hpp"

namespace augplan::detail {

// Little-endian serialization helpers shared by the binary file formats.
class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { bytes_.reserve(reserve); }

  void Magic(std::string_view magic) {
    bytes_.insert(bytes_.end(), magic.begin(), magic.end());
  }
  void U8(std::uint8_t v) { bytes_.push_back(v); }
  void U16(std::uint16_t v) {
    bytes_.push_back(static_cast<std::uint8_t>(v & 0xff));
    bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void U32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
      bytes_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
    }
  }
  void U64(std::uint64_t v) {
    for (int shift = 0; shift < 64; shift += 8) {
      bytes_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
    }
  }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void ExpectMagic(std::string_view magic) {
    Need(magic.size());
    if (std::memcmp(bytes_.data(), magic.data(), magic.size()) != 0) {
      throw Error(ErrorCode::kMalformedHeader,
                  "expected magic \"" + std::string(magic) + "\"");
    }
    pos_ += magic.size();
  }
  std::uint8_t U8() {
    Need(1);
    return bytes_[pos_++];
  }
  std::uint16_t U16() {
    Need(2);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] |
                                              (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      v |= static_cast<std::uint32_t>(bytes_[pos_ + k]) << (8 * k);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t U64() {
    const std::uint64_t lo = U32();
    const std::uint64_t hi = U32();
    return lo | (hi << 32);
  }
  float F32() { return std::bit_cast<float>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }
  void Need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw Error(ErrorCode::kMalformedHeader, "truncated payload");
    }
  }
  void ExpectEnd() const {
    if (pos_ != bytes_.size()) {
      throw Error(ErrorCode::kMalformedHeader, "trailing bytes after payload");
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace augplan::detail
