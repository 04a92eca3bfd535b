#include "uvc/bitio.hpp"

namespace uvc {

void BitSink::write_bit(int b) {
  if ((bits_ & 7) == 0) buf_.push_back(0);
  if (b) buf_.back() |= static_cast<uint8_t>(0x80u >> (bits_ & 7));
  ++bits_;
}

void BitSink::write_bits(uint64_t value, int n) {
  for (int i = n - 1; i >= 0; --i) write_bit(static_cast<int>((value >> i) & 1));
}

void BitSink::byte_align() {
  while (bits_ & 7) write_bit(0);
}

void BitSink::write_ue(uint64_t v) {
  uint64_t vp1 = v + 1;
  int len = 0;
  for (uint64_t t = vp1; t > 1; t >>= 1) ++len;
  write_bits(0, len);
  write_bits(vp1, len + 1);
}

void BitSink::write_se(int64_t v) {
  uint64_t u = v > 0 ? static_cast<uint64_t>(2 * v - 1) : static_cast<uint64_t>(-2 * v);
  write_ue(u);
}

int BitSource::read_bit() {
  if (pos_ >= len_ * 8)
    throw MalformedBitstream("bit source exhausted", base_ + len_);
  int b = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
  ++pos_;
  return b;
}

uint64_t BitSource::read_bits(int n) {
  uint64_t v = 0;
  for (int i = 0; i < n; ++i) v = (v << 1) | static_cast<uint64_t>(read_bit());
  return v;
}

void BitSource::byte_align() {
  while (pos_ & 7) read_bit();
}

uint64_t BitSource::read_ue() {
  int zeros = 0;
  while (read_bit() == 0) {
    if (++zeros > 62) throw MalformedBitstream("exp-Golomb prefix too long", byte_offset());
  }
  uint64_t v = 1;
  for (int i = 0; i < zeros; ++i) v = (v << 1) | static_cast<uint64_t>(read_bit());
  return v - 1;
}

int64_t BitSource::read_se() {
  uint64_t u = read_ue();
  if (u & 1) return static_cast<int64_t>((u + 1) / 2);
  return -static_cast<int64_t>(u / 2);
}

}  // namespace uvc
