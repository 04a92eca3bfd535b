#pragma once

#include <cstdint>
#include <vector>

#include "uvc/common.hpp"

namespace uvc {

// MSB-first bit writer over a growable byte buffer.
class BitSink {
public:
  void write_bit(int b);
  void write_bits(uint64_t value, int n);  // n in [0,64], MSB first
  void byte_align();                       // pad with zero bits to a byte boundary
  size_t bit_count() const { return bits_; }
  const std::vector<uint8_t>& bytes() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

  // Exp-Golomb order 0: 0 -> "1", 1 -> "010", 2 -> "011", ...
  void write_ue(uint64_t v);
  // Signed mapping 0,1,-1,2,-2,...
  void write_se(int64_t v);

private:
  std::vector<uint8_t> buf_;
  size_t bits_ = 0;
};

// MSB-first bit reader. Throws MalformedBitstream past the end.
class BitSource {
public:
  BitSource(const uint8_t* data, size_t len, uint64_t base_offset = 0)
      : data_(data), len_(len), base_(base_offset) {}

  int read_bit();
  uint64_t read_bits(int n);
  void byte_align();
  uint64_t read_ue();
  int64_t read_se();
  size_t bit_pos() const { return pos_; }
  uint64_t byte_offset() const { return base_ + pos_ / 8; }
  bool exhausted() const { return pos_ >= len_ * 8; }

private:
  const uint8_t* data_;
  size_t len_;
  uint64_t base_;
  size_t pos_ = 0;
};

}  // namespace uvc
