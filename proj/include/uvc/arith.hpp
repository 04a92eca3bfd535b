#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "uvc/common.hpp"

namespace uvc {

// Adaptive binary probability model. `state` is P(bin==0) in 1/32768 units,
// kept in [1, 32766].
struct ArithContext {
  uint16_t state = 16384;

  void update(int bin) {
    int s = state;
    s += ((bin == 0 ? 32768 - s : -s) >> 5);
    state = static_cast<uint16_t>(clip(s, 1, 32766));
  }
};

// Context indices for every syntax element family; one flat set per slice.
enum CtxId : int {
  kCtxSplitFlag = 0,   // 4 contexts, by block-area class
  kCtxSplitMode = 4,   // 6 contexts, by unary bin position
  kCtxIsIntra = 10,
  kCtxIntraMode = 11,  // 2 contexts, one per fixed-length bin
  kCtxRefDir = 13,
  kCtxCbfLuma = 14,
  kCtxCbfCb = 15,
  kCtxCbfCr = 16,
  kCtxSigLuma = 17,    // 4 contexts, by scan-position class
  kCtxSigChroma = 21,  // 4 contexts
  kCtxBimMag = 25,     // 2 contexts, by unary bin position
  kCtxFilterSlice = 27,
  kCtxFilterCtu = 28,
  kNumCtx = 29
};

// Area classes <=64, <=256, <=1024, >1024 samples.
inline int area_ctx_class(int w, int h) {
  int a = w * h;
  if (a <= 64) return 0;
  if (a <= 256) return 1;
  if (a <= 1024) return 2;
  return 3;
}

// Scan-position classes 0, 1-3, 4-15, >=16.
inline int scan_ctx_class(int pos) {
  if (pos == 0) return 0;
  if (pos <= 3) return 1;
  if (pos <= 15) return 2;
  return 3;
}

struct ContextSet {
  std::array<ArithContext, kNumCtx> ctx;
  ArithContext& operator[](int i) { return ctx[static_cast<size_t>(i)]; }
  const ArithContext& operator[](int i) const { return ctx[static_cast<size_t>(i)]; }
  void reset() { ctx.fill(ArithContext{}); }
};

// Byte-oriented range encoder (carry-propagating, 32-bit range). The first
// output byte is always the zero cache byte; finish() flushes five bytes so a
// matching decoder never starves. Payloads are byte strings that can be
// concatenated by a container.
class RangeEncoder {
public:
  void encode_bin(ArithContext& c, int bin) {
    uint32_t bound = (range_ >> 15) * c.state;
    if (bin == 0) {
      range_ = bound;
    } else {
      low_ += bound;
      range_ -= bound;
    }
    c.update(bin);
    normalize();
  }

  void encode_bypass(int bin) {
    uint32_t half = range_ >> 1;
    if (bin == 0) {
      range_ = half;
    } else {
      low_ += half;
      range_ -= half;
    }
    normalize();
  }

  void encode_bypass_bits(uint32_t v, int n) {
    for (int i = n - 1; i >= 0; --i) encode_bypass(static_cast<int>((v >> i) & 1));
  }

  // Exp-Golomb order 0 through bypass bins.
  void encode_ue_bypass(uint32_t v);

  // Truncated unary with a fixed maximum.
  void encode_tu_bypass(uint32_t v, uint32_t cmax);
  void encode_tu_ctx(ArithContext* ctx_base, int nctx, uint32_t v, uint32_t cmax);

  std::vector<uint8_t> finish();

private:
  void normalize() {
    while (range_ < (1u << 24)) {
      shift_low();
      range_ <<= 8;
    }
  }
  void shift_low();

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cache_size_ = 1;
  std::vector<uint8_t> out_;
};

// Mirror of RangeEncoder. Reads from a bounded byte slice; renormalization
// past the end raises MalformedBitstream.
class RangeDecoder {
public:
  RangeDecoder(const uint8_t* data, size_t len, uint64_t base_offset = 0);

  int decode_bin(ArithContext& c) {
    uint32_t bound = (range_ >> 15) * c.state;
    int bin;
    if (code_ < bound) {
      bin = 0;
      range_ = bound;
    } else {
      bin = 1;
      code_ -= bound;
      range_ -= bound;
    }
    c.update(bin);
    normalize();
    return bin;
  }

  int decode_bypass() {
    uint32_t half = range_ >> 1;
    int bin;
    if (code_ < half) {
      bin = 0;
      range_ = half;
    } else {
      bin = 1;
      code_ -= half;
      range_ -= half;
    }
    normalize();
    return bin;
  }

  uint32_t decode_bypass_bits(int n) {
    uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | static_cast<uint32_t>(decode_bypass());
    return v;
  }

  uint32_t decode_ue_bypass();
  uint32_t decode_tu_bypass(uint32_t cmax);
  uint32_t decode_tu_ctx(ArithContext* ctx_base, int nctx, uint32_t cmax);

  uint64_t byte_offset() const { return base_ + static_cast<uint64_t>(pos_); }
  size_t consumed() const { return pos_; }

private:
  void normalize() {
    while (range_ < (1u << 24)) {
      code_ = (code_ << 8) | next_byte();
      range_ <<= 8;
    }
  }
  uint8_t next_byte();

  const uint8_t* data_;
  size_t len_;
  uint64_t base_;
  size_t pos_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

// kBinCost[s] = -log2(s / 32768) in 2^-16-bit units.
extern const std::array<int32_t, 32769> kBinCost;

// Rate meter with the same interface as RangeEncoder: accumulates the
// fractional bit cost -log2(p) of each bin while applying the real context
// updates, so speculative encoding is replayable bit for bit. Costs are held
// in integer 2^-16-bit units, which makes accumulated totals independent of
// summation order — a replayed tree prices to the exact same number.
class BitCounter {
public:
  static constexpr int64_t kOneBit = 1 << 16;

  void encode_bin(ArithContext& c, int bin) {
    bits16_ += bin_cost16(c.state, bin);
    c.update(bin);
  }
  void encode_bypass(int) { bits16_ += kOneBit; }
  void encode_bypass_bits(uint32_t, int n) { bits16_ += static_cast<int64_t>(n) * kOneBit; }
  void encode_ue_bypass(uint32_t v) {
    const uint64_t vp1 = static_cast<uint64_t>(v) + 1;
    int len = 0;
    for (uint64_t t = vp1; t > 1; t >>= 1) ++len;
    bits16_ += static_cast<int64_t>(2 * len + 1) * kOneBit;
  }
  void encode_tu_bypass(uint32_t v, uint32_t cmax) {
    bits16_ += static_cast<int64_t>((v < cmax) ? v + 1 : v) * kOneBit;
  }
  void encode_tu_ctx(ArithContext* ctx_base, int nctx, uint32_t v, uint32_t cmax);

  int64_t bits_fixed() const { return bits16_; }
  double bits() const { return static_cast<double>(bits16_) / kOneBit; }
  void reset() { bits16_ = 0; }

  // -log2 of the probability the model assigns to `bin` at `state`, in
  // 2^-16-bit units.
  static int32_t bin_cost16(uint16_t state, int bin) {
    return bin == 0 ? kBinCost[state] : kBinCost[32768 - state];
  }

private:
  int64_t bits16_ = 0;
};

}  // namespace uvc
