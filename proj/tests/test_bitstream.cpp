#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "uvc/arith.hpp"
#include "uvc/bitio.hpp"
#include "uvc/common.hpp"
#include "uvc/rdo.hpp"
#include "uvc/syntax.hpp"

using namespace uvc;

TEST_CASE("bit sink writes msb first") {
  BitSink s;
  s.write_bit(1);
  s.write_bit(0);
  s.write_bit(1);
  CHECK(s.bit_count() == 3);
  s.byte_align();
  CHECK(s.bit_count() == 8);
  REQUIRE(s.bytes().size() == 1);
  CHECK(s.bytes()[0] == 0xA0);

  BitSink w;
  w.write_bits(0xABCD, 16);
  REQUIRE(w.bytes().size() == 2);
  CHECK(w.bytes()[0] == 0xAB);
  CHECK(w.bytes()[1] == 0xCD);
}

TEST_CASE("exp-golomb bit patterns") {
  // 0 -> "1", 1 -> "010", 2 -> "011": together 1 010 011 padded = 0xA6.
  BitSink s;
  s.write_ue(0);
  CHECK(s.bit_count() == 1);
  s.write_ue(1);
  CHECK(s.bit_count() == 4);
  s.write_ue(2);
  CHECK(s.bit_count() == 7);
  s.byte_align();
  REQUIRE(s.bytes().size() == 1);
  CHECK(s.bytes()[0] == 0xA6);
}

TEST_CASE("exp-golomb and signed mapping round trip exhaustively") {
  BitSink s;
  for (uint64_t v = 0; v <= 4095; ++v) s.write_ue(v);
  for (int64_t v = -2048; v <= 2048; ++v) s.write_se(v);
  s.byte_align();
  const auto& bytes = s.bytes();
  BitSource r(bytes.data(), bytes.size());
  for (uint64_t v = 0; v <= 4095; ++v) CHECK(r.read_ue() == v);
  for (int64_t v = -2048; v <= 2048; ++v) CHECK(r.read_se() == v);
}

TEST_CASE("bit source bounds and malformed prefixes") {
  const uint8_t one = 0xFF;
  BitSource r(&one, 1, 1000);
  CHECK(r.read_bits(8) == 0xFF);
  CHECK(r.exhausted());
  CHECK_THROWS_AS(r.read_bit(), MalformedBitstream);
  try {
    BitSource r2(&one, 1, 1000);
    r2.read_bits(8);
    r2.read_bit();
    FAIL("expected a throw");
  } catch (const MalformedBitstream& e) {
    CHECK(e.byte_offset == 1001);
  }

  // A run of zeros long enough that no legal ue prefix fits.
  BitSink s;
  for (int i = 0; i < 64; ++i) s.write_bit(0);
  const auto& z = s.bytes();
  BitSource zr(z.data(), z.size());
  CHECK_THROWS_AS(zr.read_ue(), MalformedBitstream);
}

TEST_CASE("probability adaptation fixtures") {
  ArithContext c;
  CHECK(c.state == 16384);
  c.update(0);
  CHECK(c.state == 16896);  // += (32768 - 16384) >> 5
  c.state = 16384;
  c.update(1);
  CHECK(c.state == 15872);  // -= 16384 >> 5

  // Saturation keeps the state inside [1, 32766] either way.
  ArithContext lo, hi;
  for (int i = 0; i < 4000; ++i) {
    lo.update(1);
    hi.update(0);
    CHECK(lo.state >= 1);
    CHECK(hi.state <= 32766);
  }
  CHECK(lo.state < 64);
  CHECK(hi.state > 32700);
}

TEST_CASE("range codec round trips a mixed symbol schedule in lockstep") {
  std::mt19937 rng(2024);
  const int n = 5000;
  std::vector<int> kind(n), bins(n);
  std::vector<uint32_t> vals(n);
  for (int i = 0; i < n; ++i) {
    kind[i] = static_cast<int>(rng() % 4);  // ctx bin, bypass, ue, tu
    bins[i] = static_cast<int>(rng() % 2);
    vals[i] = rng() % 997;
  }

  ContextSet enc_cs, dec_cs;
  std::vector<uint16_t> enc_states;
  RangeEncoder enc;
  for (int i = 0; i < n; ++i) {
    switch (kind[i]) {
      case 0: enc.encode_bin(enc_cs[i % kNumCtx], bins[i]); break;
      case 1: enc.encode_bypass(bins[i]); break;
      case 2: enc.encode_ue_bypass(vals[i]); break;
      case 3: enc.encode_tu_ctx(&enc_cs[kCtxSplitMode], 6, vals[i] % 7, 6); break;
    }
    enc_states.push_back(enc_cs[i % kNumCtx].state);
  }
  const std::vector<uint8_t> payload = enc.finish();

  RangeDecoder dec(payload.data(), payload.size());
  for (int i = 0; i < n; ++i) {
    switch (kind[i]) {
      case 0: CHECK(dec.decode_bin(dec_cs[i % kNumCtx]) == bins[i]); break;
      case 1: CHECK(dec.decode_bypass() == bins[i]); break;
      case 2: CHECK(dec.decode_ue_bypass() == vals[i]); break;
      case 3: CHECK(dec.decode_tu_ctx(&dec_cs[kCtxSplitMode], 6, 6) == vals[i] % 7); break;
    }
    // Decoder context state equals the encoder's at every position.
    CHECK(dec_cs[i % kNumCtx].state == enc_states[static_cast<size_t>(i)]);
  }
  for (int i = 0; i < kNumCtx; ++i) CHECK(enc_cs[i].state == dec_cs[i].state);
}

TEST_CASE("bypass bits and truncated unary round trip") {
  RangeEncoder enc;
  for (uint32_t v = 0; v < 64; ++v) enc.encode_bypass_bits(v, 6);
  for (uint32_t cmax : {1u, 2u, 6u})
    for (uint32_t v = 0; v <= cmax; ++v) enc.encode_tu_bypass(v, cmax);
  for (uint32_t v : {0u, 1u, 2u, 127u, 128u, 1000000u}) enc.encode_ue_bypass(v);
  const auto payload = enc.finish();

  RangeDecoder dec(payload.data(), payload.size());
  for (uint32_t v = 0; v < 64; ++v) CHECK(dec.decode_bypass_bits(6) == v);
  for (uint32_t cmax : {1u, 2u, 6u})
    for (uint32_t v = 0; v <= cmax; ++v) CHECK(dec.decode_tu_bypass(cmax) == v);
  for (uint32_t v : {0u, 1u, 2u, 127u, 128u, 1000000u}) CHECK(dec.decode_ue_bypass() == v);
}

TEST_CASE("truncated arithmetic payload is reported with its offset") {
  RangeEncoder enc;
  ContextSet cs;
  std::mt19937 rng(7);
  for (int i = 0; i < 2000; ++i) enc.encode_bin(cs[kCtxIsIntra], static_cast<int>(rng() % 2));
  std::vector<uint8_t> payload = enc.finish();
  payload.resize(payload.size() / 2);  // cut the tail off

  ContextSet dc;
  RangeDecoder dec(payload.data(), payload.size(), 5000);
  bool threw = false;
  try {
    for (int i = 0; i < 2000; ++i) dec.decode_bin(dc[kCtxIsIntra]);
  } catch (const MalformedBitstream& e) {
    threw = true;
    CHECK(e.byte_offset == 5000 + payload.size());
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("adaptive coding compresses a constant source and not an alternating one") {
  RangeEncoder constant;
  ArithContext c0;
  for (int i = 0; i < 10000; ++i) constant.encode_bin(c0, 0);
  CHECK(constant.finish().size() * 8 < 1500);

  RangeEncoder alternating;
  ArithContext c1;
  for (int i = 0; i < 10000; ++i) alternating.encode_bin(c1, i & 1);
  CHECK(alternating.finish().size() * 8 >= 9800);
}

TEST_CASE("compressed length approaches binary entropy within 5 percent") {
  const int n = 100000;
  const double p1 = 0.2;
  std::mt19937 rng(99);
  std::bernoulli_distribution coin(p1);
  RangeEncoder enc;
  ArithContext c;
  for (int i = 0; i < n; ++i) enc.encode_bin(c, coin(rng) ? 1 : 0);
  const double bits = static_cast<double>(enc.finish().size()) * 8.0;
  const double entropy = -(p1 * std::log2(p1) + (1 - p1) * std::log2(1 - p1)) * n;
  CHECK(bits > 0.95 * entropy);
  CHECK(bits < 1.05 * entropy);
}

TEST_CASE("rate meter cost table fixtures") {
  CHECK(BitCounter::bin_cost16(16384, 0) == BitCounter::kOneBit);  // p = 1/2 exactly
  CHECK(BitCounter::bin_cost16(16384, 1) == BitCounter::kOneBit);
  CHECK(BitCounter::bin_cost16(8192, 0) == 2 * BitCounter::kOneBit);  // p = 1/4
  CHECK(BitCounter::bin_cost16(32768 - 8192, 1) == 2 * BitCounter::kOneBit);
  // Monotone: a likelier bin never costs more.
  for (int s = 2; s <= 32766; ++s) {
    CHECK(kBinCost[s] <= kBinCost[s - 1]);
    CHECK(kBinCost[s] > 0);
  }

  BitCounter bc;
  bc.encode_bypass(1);
  CHECK(bc.bits_fixed() == BitCounter::kOneBit);
  bc.reset();
  bc.encode_ue_bypass(0);
  CHECK(bc.bits_fixed() == 1 * BitCounter::kOneBit);
  bc.reset();
  bc.encode_ue_bypass(1);
  CHECK(bc.bits_fixed() == 3 * BitCounter::kOneBit);
  bc.reset();
  bc.encode_ue_bypass(6);
  CHECK(bc.bits_fixed() == 5 * BitCounter::kOneBit);
  bc.reset();
  bc.encode_tu_bypass(2, 6);
  CHECK(bc.bits_fixed() == 3 * BitCounter::kOneBit);  // v < cmax: v+1 bins
  bc.reset();
  bc.encode_tu_bypass(6, 6);
  CHECK(bc.bits_fixed() == 6 * BitCounter::kOneBit);  // v == cmax: v bins
}

TEST_CASE("rate meter totals are order independent and mirror context updates") {
  std::mt19937 rng(3);
  std::vector<std::pair<int, int>> schedule;  // (ctx index, bin)
  for (int i = 0; i < 600; ++i)
    schedule.emplace_back(static_cast<int>(rng() % kNumCtx), static_cast<int>(rng() % 2));

  ContextSet a, b;
  BitCounter meter;
  RangeEncoder real;
  for (auto [ci, bin] : schedule) {
    meter.encode_bin(a[ci], bin);
    real.encode_bin(b[ci], bin);
  }
  for (int i = 0; i < kNumCtx; ++i) CHECK(a[i].state == b[i].state);

  // Summing the same per-bin integer costs in reverse gives the same total.
  ContextSet c;
  std::vector<int64_t> costs;
  for (auto [ci, bin] : schedule) {
    costs.push_back(BitCounter::bin_cost16(c[ci].state, bin));
    c[ci].update(bin);
  }
  int64_t forward = 0, backward = 0;
  for (size_t i = 0; i < costs.size(); ++i) forward += costs[i];
  for (size_t i = costs.size(); i-- > 0;) backward += costs[i];
  CHECK(forward == backward);
  CHECK(forward == meter.bits_fixed());
}

TEST_CASE("residual rate cache prices exactly like the plain meter") {
  std::mt19937 rng(99);
  RdSearch::ZeroRunMemo zmemo;
  for (int rep = 0; rep < 400; ++rep) {
    const int w = 4 << (rng() % 5), h = 4 << (rng() % 5);
    CoeffBlock levels(w, h);
    const int density = static_cast<int>(rng() % 100) % 25;
    for (auto& v : levels.v)
      if (static_cast<int>(rng() % 100) < density)
        v = static_cast<int32_t>(rng() % 2001) - 1000;
    ContextSet a, b, c;
    for (int i = 0; i < kNumCtx; ++i) {
      const uint16_t s = static_cast<uint16_t>(1 + rng() % 32766);
      a[i].state = s;
      b[i].state = s;
      c[i].state = s;
    }
    BitCounter bc;
    code_residual(bc, a, levels, kCtxCbfLuma, kCtxSigLuma);
    RdSearch::ResidualRate rr, rr_z;
    CHECK(RdSearch::priced_residual16(levels, rr, b, kCtxCbfLuma, kCtxSigLuma) ==
          bc.bits_fixed());
    CHECK(RdSearch::priced_residual16(levels, rr_z, c, kCtxCbfLuma, kCtxSigLuma, &zmemo) ==
          bc.bits_fixed());

    // Second visit exercises the per-class memo; context states must track.
    BitCounter bc2;
    code_residual(bc2, a, levels, kCtxCbfLuma, kCtxSigLuma);
    CHECK(RdSearch::priced_residual16(levels, rr, b, kCtxCbfLuma, kCtxSigLuma) ==
          bc2.bits_fixed());
    CHECK(RdSearch::priced_residual16(levels, rr_z, c, kCtxCbfLuma, kCtxSigLuma, &zmemo) ==
          bc2.bits_fixed());
    for (int i = 0; i < kNumCtx; ++i) {
      CHECK(a[i].state == b[i].state);
      CHECK(a[i].state == c[i].state);
    }
  }
}
