#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "uvc/arith.hpp"
#include "uvc/intra.hpp"
#include "uvc/partition.hpp"
#include "uvc/transform.hpp"

namespace uvc {

// Diagonal zig-zag scan order for a w x h block: anti-diagonals x+y = d in
// increasing d, alternating traversal direction (even d walks from the bottom
// of the diagonal up, odd d from the right end down). Returned positions are
// (x, y) pairs. Cached per size; sizes are the transform sizes.
const std::vector<std::pair<uint8_t, uint8_t>>& zigzag_scan(int w, int h);
// Same order as zigzag_scan, as row-major linear offsets.
const std::vector<uint16_t>& zigzag_linear(int w, int h);

// ---- Encode-side syntax. Dest is RangeEncoder (real bits) or BitCounter
// (exact rate metering); both apply identical context updates, which is what
// makes speculative RD costs replayable.

template <typename Dest>
void code_split(Dest& d, ContextSet& cs, const BlockRect& rect, ModeMask allowed,
                SplitMode chosen) {
  if (!allowed) return;  // leaf is implied, nothing coded
  const int cls = area_ctx_class(rect.w, rect.h);
  d.encode_bin(cs[kCtxSplitFlag + cls], chosen == SplitMode::NONE ? 0 : 1);
  if (chosen == SplitMode::NONE) return;
  d.encode_tu_ctx(&cs[kCtxSplitMode], 6, static_cast<uint32_t>(mode_index(chosen)),
                  kNumSplitModes - 1);
}

template <typename Dest>
void code_is_intra(Dest& d, ContextSet& cs, bool intra) {
  d.encode_bin(cs[kCtxIsIntra], intra ? 1 : 0);
}

template <typename Dest>
void code_intra_mode(Dest& d, ContextSet& cs, IntraMode m) {
  const int idx = static_cast<int>(m);
  d.encode_bin(cs[kCtxIntraMode], (idx >> 1) & 1);
  d.encode_bin(cs[kCtxIntraMode + 1], idx & 1);
}

template <typename Dest>
void code_ref_dir(Dest& d, ContextSet& cs, int dir) {
  d.encode_bin(cs[kCtxRefDir], dir);
}

// Motion-vector difference, both axes, bypass-coded exp-Golomb with the
// signed mapping 0,1,-1,2,-2,...
template <typename Dest>
void code_mvd(Dest& d, int mvd_x, int mvd_y) {
  const auto map_se = [](int v) -> uint32_t {
    return v > 0 ? static_cast<uint32_t>(2 * v - 1) : static_cast<uint32_t>(-2 * v);
  };
  d.encode_ue_bypass(map_se(mvd_x));
  d.encode_ue_bypass(map_se(mvd_y));
}

// Coded-block flag plus, when set, one significance flag per scan position,
// sign and |level|-1 through bypass for each significant one.
template <typename Dest>
void code_residual(Dest& d, ContextSet& cs, const CoeffBlock& levels, int cbf_ctx,
                   int sig_ctx_base) {
  bool any = false;
  for (int32_t v : levels.v)
    if (v) {
      any = true;
      break;
    }
  d.encode_bin(cs[cbf_ctx], any ? 1 : 0);
  if (!any) return;
  const auto& scan = zigzag_scan(levels.w, levels.h);
  for (size_t p = 0; p < scan.size(); ++p) {
    const int32_t v = levels.at(scan[p].first, scan[p].second);
    d.encode_bin(cs[sig_ctx_base + scan_ctx_class(static_cast<int>(p))], v ? 1 : 0);
    if (!v) continue;
    d.encode_bypass(v < 0 ? 1 : 0);
    d.encode_ue_bypass(static_cast<uint32_t>((v < 0 ? -v : v) - 1));
  }
}

// Per-CTU QP offset in [-2, +2]: magnitude as context-coded truncated unary,
// sign (1 = negative) as bypass when nonzero.
template <typename Dest>
void code_qp_delta(Dest& d, ContextSet& cs, int delta) {
  const uint32_t mag = static_cast<uint32_t>(delta < 0 ? -delta : delta);
  d.encode_tu_ctx(&cs[kCtxBimMag], 2, mag, 2);
  if (mag) d.encode_bypass(delta < 0 ? 1 : 0);
}

template <typename Dest>
void code_filter_slice(Dest& d, ContextSet& cs, bool enable, int model_idx) {
  d.encode_bin(cs[kCtxFilterSlice], enable ? 1 : 0);
  if (enable) d.encode_tu_bypass(static_cast<uint32_t>(model_idx), 2);
}

template <typename Dest>
void code_filter_ctu_flag(Dest& d, ContextSet& cs, bool on) {
  d.encode_bin(cs[kCtxFilterCtu], on ? 1 : 0);
}

// ---- Decode-side counterparts (always on a RangeDecoder).

// Returns NONE for an implied or signaled leaf; validates the parsed mode
// against `allowed` and throws MalformedBitstream on an illegal split.
SplitMode parse_split(RangeDecoder& d, ContextSet& cs, const BlockRect& rect,
                      ModeMask allowed);
bool parse_is_intra(RangeDecoder& d, ContextSet& cs);
IntraMode parse_intra_mode(RangeDecoder& d, ContextSet& cs);
int parse_ref_dir(RangeDecoder& d, ContextSet& cs);
std::pair<int, int> parse_mvd(RangeDecoder& d);
CoeffBlock parse_residual(RangeDecoder& d, ContextSet& cs, int w, int h, int cbf_ctx,
                          int sig_ctx_base);
int parse_qp_delta(RangeDecoder& d, ContextSet& cs);
std::pair<bool, int> parse_filter_slice(RangeDecoder& d, ContextSet& cs);
bool parse_filter_ctu_flag(RangeDecoder& d, ContextSet& cs);

}  // namespace uvc
