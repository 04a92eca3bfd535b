#pragma once

#include <cstdint>

#include "uvc/arith.hpp"
#include "uvc/coding_info.hpp"
#include "uvc/gop.hpp"
#include "uvc/partition.hpp"
#include "uvc/plane.hpp"
#include "uvc/rdo.hpp"

namespace uvc {

// Per-slice state the CTU coder threads through both directions. leaf ids
// count up in coding order across the whole picture so encoder and decoder
// derive identical boundary-strength and co-location maps.
struct SliceCodingState {
  SliceType slice = SliceType::kIntra;
  PartitionConfig cfg;
  const RefPicture* ref0 = nullptr;
  const RefPicture* ref1 = nullptr;
  int32_t next_leaf_id = 0;
};

// Encoder half: codes the searched tree's syntax (luma tree, then chroma at
// the chroma-root nodes) into the range encoder while repainting the
// reconstruction through the normative pipeline and recording cell info.
// eff_qp is this CTU's effective luma QP; chroma codes at eff_qp + 1. When
// pred_out is given, every block's prediction signal is painted into it (the
// loop filter reads it as an auxiliary input).
void emit_ctu(const RdNode& tree, const FrameBuffer& src, FrameBuffer& recon,
              CodingInfoMap& info, SliceCodingState& st, int eff_qp, RangeEncoder& enc,
              ContextSet& cs, FrameBuffer* pred_out = nullptr);

// Decoder half: exact mirror of emit_ctu.
void parse_ctu(const BlockRect& ctu, FrameBuffer& recon, CodingInfoMap& info,
               SliceCodingState& st, int eff_qp, RangeDecoder& dec, ContextSet& cs,
              FrameBuffer* pred_out = nullptr);

// A node codes the chroma for its area when no ancestor has and it either is
// a leaf or its chosen split would create a child narrower or shorter than 8
// luma samples. Exposed for tests.
bool chroma_coded_here(const BlockRect& rect, SplitMode chosen, bool ancestor_coded);

}  // namespace uvc
