#include "uvc/syntax.hpp"

#include <array>

#include "uvc/quant.hpp"

namespace uvc {
namespace {

std::vector<std::pair<uint8_t, uint8_t>> build_zigzag(int w, int h) {
  std::vector<std::pair<uint8_t, uint8_t>> scan;
  scan.reserve(static_cast<size_t>(w) * h);
  for (int d = 0; d <= w + h - 2; ++d) {
    if ((d & 1) == 0) {
      for (int y = std::min(d, h - 1); y >= 0 && d - y < w; --y)
        scan.emplace_back(static_cast<uint8_t>(d - y), static_cast<uint8_t>(y));
    } else {
      for (int x = std::min(d, w - 1); x >= 0 && d - x < h; --x)
        scan.emplace_back(static_cast<uint8_t>(x), static_cast<uint8_t>(d - x));
    }
  }
  return scan;
}

int size_slot(int n) { return ilog2(n) - 2; }  // 4..64 -> 0..4

}  // namespace

const std::vector<std::pair<uint8_t, uint8_t>>& zigzag_scan(int w, int h) {
  static const auto table = [] {
    std::array<std::array<std::vector<std::pair<uint8_t, uint8_t>>, 5>, 5> t;
    for (int wi = 0; wi < 5; ++wi)
      for (int hi = 0; hi < 5; ++hi) t[wi][hi] = build_zigzag(4 << wi, 4 << hi);
    return t;
  }();
  if (!transform_size_supported(w) || !transform_size_supported(h))
    throw std::invalid_argument("zigzag_scan: unsupported size " + std::to_string(w) + "x" +
                                std::to_string(h));
  return table[size_slot(w)][size_slot(h)];
}

const std::vector<uint16_t>& zigzag_linear(int w, int h) {
  static const auto table = [] {
    std::array<std::array<std::vector<uint16_t>, 5>, 5> t;
    for (int wi = 0; wi < 5; ++wi)
      for (int hi = 0; hi < 5; ++hi) {
        const int bw = 4 << wi;
        for (const auto& [x, y] : build_zigzag(bw, 4 << hi))
          t[wi][hi].push_back(static_cast<uint16_t>(y * bw + x));
      }
    return t;
  }();
  if (!transform_size_supported(w) || !transform_size_supported(h))
    throw std::invalid_argument("zigzag_linear: unsupported size " + std::to_string(w) + "x" +
                                std::to_string(h));
  return table[size_slot(w)][size_slot(h)];
}

SplitMode parse_split(RangeDecoder& d, ContextSet& cs, const BlockRect& rect,
                      ModeMask allowed) {
  if (!allowed) return SplitMode::NONE;
  const int cls = area_ctx_class(rect.w, rect.h);
  if (d.decode_bin(cs[kCtxSplitFlag + cls]) == 0) return SplitMode::NONE;
  const uint32_t idx = d.decode_tu_ctx(&cs[kCtxSplitMode], 6, kNumSplitModes - 1);
  const SplitMode mode = kSplitOrder[idx];
  if (!(allowed & (1u << idx)))
    throw MalformedBitstream("illegal split mode " + std::string(split_mode_name(mode)) +
                                 " for " + std::to_string(rect.w) + "x" + std::to_string(rect.h),
                             d.byte_offset());
  return mode;
}

bool parse_is_intra(RangeDecoder& d, ContextSet& cs) {
  return d.decode_bin(cs[kCtxIsIntra]) != 0;
}

IntraMode parse_intra_mode(RangeDecoder& d, ContextSet& cs) {
  const int hi = d.decode_bin(cs[kCtxIntraMode]);
  const int lo = d.decode_bin(cs[kCtxIntraMode + 1]);
  return static_cast<IntraMode>((hi << 1) | lo);
}

int parse_ref_dir(RangeDecoder& d, ContextSet& cs) { return d.decode_bin(cs[kCtxRefDir]); }

std::pair<int, int> parse_mvd(RangeDecoder& d) {
  const auto unmap_se = [](uint32_t u) -> int {
    return (u & 1) ? static_cast<int>((u + 1) / 2) : -static_cast<int>(u / 2);
  };
  const uint32_t ux = d.decode_ue_bypass();
  const uint32_t uy = d.decode_ue_bypass();
  return {unmap_se(ux), unmap_se(uy)};
}

CoeffBlock parse_residual(RangeDecoder& d, ContextSet& cs, int w, int h, int cbf_ctx,
                          int sig_ctx_base) {
  CoeffBlock out(w, h);
  if (d.decode_bin(cs[cbf_ctx]) == 0) return out;
  const auto& scan = zigzag_scan(w, h);
  for (size_t p = 0; p < scan.size(); ++p) {
    if (d.decode_bin(cs[sig_ctx_base + scan_ctx_class(static_cast<int>(p))]) == 0) continue;
    const int sign = d.decode_bypass();
    const uint32_t mag_minus1 = d.decode_ue_bypass();
    if (mag_minus1 >= static_cast<uint32_t>(kMaxLevel))
      throw MalformedBitstream("coefficient level overflow", d.byte_offset());
    const int32_t mag = static_cast<int32_t>(mag_minus1) + 1;
    out.at(scan[p].first, scan[p].second) = sign ? -mag : mag;
  }
  return out;
}

int parse_qp_delta(RangeDecoder& d, ContextSet& cs) {
  const uint32_t mag = d.decode_tu_ctx(&cs[kCtxBimMag], 2, 2);
  if (!mag) return 0;
  const int sign = d.decode_bypass();
  return sign ? -static_cast<int>(mag) : static_cast<int>(mag);
}

std::pair<bool, int> parse_filter_slice(RangeDecoder& d, ContextSet& cs) {
  const bool enable = d.decode_bin(cs[kCtxFilterSlice]) != 0;
  if (!enable) return {false, 0};
  return {true, static_cast<int>(d.decode_tu_bypass(2))};
}

bool parse_filter_ctu_flag(RangeDecoder& d, ContextSet& cs) {
  return d.decode_bin(cs[kCtxFilterCtu]) != 0;
}

}  // namespace uvc
