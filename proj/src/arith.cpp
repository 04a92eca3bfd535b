#include "uvc/arith.hpp"

#include <cmath>

namespace uvc {

void RangeEncoder::shift_low() {
  if (static_cast<uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    uint8_t carry = static_cast<uint8_t>(low_ >> 32);
    uint8_t b = cache_;
    do {
      out_.push_back(static_cast<uint8_t>(b + carry));
      b = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFull) << 8;
}

std::vector<uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

void RangeEncoder::encode_ue_bypass(uint32_t v) {
  uint32_t vp1 = v + 1;
  int len = 0;
  for (uint32_t t = vp1; t > 1; t >>= 1) ++len;
  encode_bypass_bits(0, len);
  encode_bypass_bits(vp1, len + 1);
}

void RangeEncoder::encode_tu_bypass(uint32_t v, uint32_t cmax) {
  for (uint32_t i = 0; i < v; ++i) encode_bypass(1);
  if (v < cmax) encode_bypass(0);
}

void RangeEncoder::encode_tu_ctx(ArithContext* ctx_base, int nctx, uint32_t v, uint32_t cmax) {
  for (uint32_t i = 0; i < v; ++i)
    encode_bin(ctx_base[static_cast<int>(i) < nctx - 1 ? i : nctx - 1], 1);
  if (v < cmax)
    encode_bin(ctx_base[static_cast<int>(v) < nctx - 1 ? v : nctx - 1], 0);
}

RangeDecoder::RangeDecoder(const uint8_t* data, size_t len, uint64_t base_offset)
    : data_(data), len_(len), base_(base_offset) {
  next_byte();  // leading cache byte, always zero on encode
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

uint8_t RangeDecoder::next_byte() {
  if (pos_ >= len_)
    throw MalformedBitstream("arithmetic payload truncated", base_ + len_);
  return data_[pos_++];
}

uint32_t RangeDecoder::decode_ue_bypass() {
  int zeros = 0;
  while (decode_bypass() == 0) {
    if (++zeros > 30) throw MalformedBitstream("exp-Golomb prefix too long", byte_offset());
  }
  uint32_t v = 1;
  for (int i = 0; i < zeros; ++i) v = (v << 1) | static_cast<uint32_t>(decode_bypass());
  return v - 1;
}

uint32_t RangeDecoder::decode_tu_bypass(uint32_t cmax) {
  uint32_t v = 0;
  while (v < cmax && decode_bypass() == 1) ++v;
  return v;
}

uint32_t RangeDecoder::decode_tu_ctx(ArithContext* ctx_base, int nctx, uint32_t cmax) {
  uint32_t v = 0;
  while (v < cmax &&
         decode_bin(ctx_base[static_cast<int>(v) < nctx - 1 ? v : nctx - 1]) == 1)
    ++v;
  return v;
}

void BitCounter::encode_tu_ctx(ArithContext* ctx_base, int nctx, uint32_t v, uint32_t cmax) {
  for (uint32_t i = 0; i < v; ++i)
    encode_bin(ctx_base[static_cast<int>(i) < nctx - 1 ? i : nctx - 1], 1);
  if (v < cmax)
    encode_bin(ctx_base[static_cast<int>(v) < nctx - 1 ? v : nctx - 1], 0);
}

namespace {
std::array<int32_t, 32769> build_cost_table() {
  std::array<int32_t, 32769> c;
  c[0] = 64 << 16;  // unreachable state, finite sentinel
  for (int s = 1; s <= 32768; ++s)
    c[static_cast<size_t>(s)] = static_cast<int32_t>(
        std::lround(-std::log2(static_cast<double>(s) / 32768.0) * 65536.0));
  return c;
}
}  // namespace

const std::array<int32_t, 32769> kBinCost = build_cost_table();

}  // namespace uvc
