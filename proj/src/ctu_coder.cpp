#include "uvc/ctu_coder.hpp"

#include <stdexcept>

#include "uvc/common.hpp"
#include "uvc/intra.hpp"
#include "uvc/motion.hpp"
#include "uvc/quant.hpp"
#include "uvc/syntax.hpp"
#include "uvc/transform.hpp"

namespace uvc {

bool chroma_coded_here(const BlockRect& rect, SplitMode chosen, bool ancestor_coded) {
  if (ancestor_coded) return false;
  if (chosen == SplitMode::NONE) return true;
  for (const BlockRect& c : split(rect, chosen))
    if (c.w < 8 || c.h < 8) return true;
  return false;
}

namespace {

BlockRect chroma_rect(const BlockRect& r) { return {r.x / 2, r.y / 2, r.w / 2, r.h / 2}; }

bool any_nonzero(const CoeffBlock& levels) {
  for (int32_t v : levels.v)
    if (v) return true;
  return false;
}

PlaneBuffer predict_chroma(const PlaneBuffer& recon_plane, const PlaneBuffer* ref_plane,
                           const BlockRect& cr, const LeafDecision& dec) {
  if (dec.intra)
    return intra_predict(dec.intra_mode, gather_intra_neighbors(recon_plane, cr), cr.w, cr.h);
  return motion_compensate_chroma(*ref_plane, cr, dec.mv);
}

void paint_block(PlaneBuffer& dst, const BlockRect& r, const PlaneBuffer& blk) {
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) dst.at(r.x + x, r.y + y) = blk.at(x, y);
}

CellInfo leaf_cell_info(SliceCodingState& st, const LeafDecision& dec, bool cbf) {
  CellInfo ci;
  ci.leaf_id = st.next_leaf_id++;
  ci.intra = dec.intra;
  ci.cbf = cbf;
  ci.mv = dec.intra ? MotionVector{} : dec.mv;
  return ci;
}

struct EmitPass {
  const FrameBuffer& src;
  FrameBuffer& recon;
  CodingInfoMap& info;
  SliceCodingState& st;
  int qp;
  RangeEncoder& enc;
  ContextSet& cs;
  FrameBuffer* pred_out;

  void chroma(const BlockRect& rect, const LeafDecision& dec) {
    const BlockRect cr = chroma_rect(rect);
    const int qpc = clip(qp + 1, kMinQp, kMaxQp);
    const RefPicture* ref = dec.intra ? nullptr : (dec.ref_dir ? st.ref1 : st.ref0);
    const PlaneBuffer pu =
        predict_chroma(recon.u, ref ? &ref->frame->u : nullptr, cr, dec);
    if (pred_out) paint_block(pred_out->u, cr, pu);
    const CoeffBlock lu = quantize_leaf(src.u, cr, pu, qpc, dec.intra);
    code_residual(enc, cs, lu, kCtxCbfCb, kCtxSigChroma);
    reconstruct_leaf(recon.u, cr, pu, lu, qpc);
    const PlaneBuffer pv =
        predict_chroma(recon.v, ref ? &ref->frame->v : nullptr, cr, dec);
    if (pred_out) paint_block(pred_out->v, cr, pv);
    const CoeffBlock lv = quantize_leaf(src.v, cr, pv, qpc, dec.intra);
    code_residual(enc, cs, lv, kCtxCbfCr, kCtxSigChroma);
    reconstruct_leaf(recon.v, cr, pv, lv, qpc);
  }

  const LeafDecision* node(const RdNode& n, int depth_left, bool chroma_done) {
    const ModeMask allowed = allowed_modes(n.rect, st.cfg, depth_left);
    code_split(enc, cs, n.rect, allowed, n.mode);
    const bool chroma_here = chroma_coded_here(n.rect, n.mode, chroma_done);
    const LeafDecision* first = nullptr;
    if (n.is_leaf()) {
      const LeafDecision& dec = n.leaf.dec;
      if (st.slice != SliceType::kIntra) code_is_intra(enc, cs, dec.intra);
      if (dec.intra) {
        code_intra_mode(enc, cs, dec.intra_mode);
      } else {
        if (st.slice == SliceType::kInterB) code_ref_dir(enc, cs, dec.ref_dir);
        const RefPicture* ref = dec.ref_dir ? st.ref1 : st.ref0;
        const MotionVector pmv = colocated_predictor(*ref, n.rect);
        code_mvd(enc, dec.mv.dx - pmv.dx, dec.mv.dy - pmv.dy);
      }
      const PlaneBuffer pred = predict_luma_leaf(n.rect, dec, recon.y, st.ref0, st.ref1);
      if (pred_out) paint_block(pred_out->y, n.rect, pred);
      const CoeffBlock levels = quantize_leaf(src.y, n.rect, pred, qp, dec.intra);
      code_residual(enc, cs, levels, kCtxCbfLuma, kCtxSigLuma);
      reconstruct_leaf(recon.y, n.rect, pred, levels, qp);
      info.record_leaf(n.rect, leaf_cell_info(st, dec, any_nonzero(levels)));
      first = &dec;
    } else {
      for (const auto& ch : n.children) {
        const LeafDecision* f = node(*ch, depth_left - 1, chroma_done || chroma_here);
        if (!first) first = f;
      }
    }
    if (chroma_here) chroma(n.rect, *first);
    return first;
  }
};

struct ParsePass {
  FrameBuffer& recon;
  CodingInfoMap& info;
  SliceCodingState& st;
  int qp;
  RangeDecoder& dec;
  ContextSet& cs;
  FrameBuffer* pred_out;

  void chroma(const BlockRect& rect, const LeafDecision& d) {
    const BlockRect cr = chroma_rect(rect);
    const int qpc = clip(qp + 1, kMinQp, kMaxQp);
    const RefPicture* ref = d.intra ? nullptr : (d.ref_dir ? st.ref1 : st.ref0);
    const PlaneBuffer pu = predict_chroma(recon.u, ref ? &ref->frame->u : nullptr, cr, d);
    if (pred_out) paint_block(pred_out->u, cr, pu);
    const CoeffBlock lu = parse_residual(dec, cs, cr.w, cr.h, kCtxCbfCb, kCtxSigChroma);
    reconstruct_leaf(recon.u, cr, pu, lu, qpc);
    const PlaneBuffer pv = predict_chroma(recon.v, ref ? &ref->frame->v : nullptr, cr, d);
    if (pred_out) paint_block(pred_out->v, cr, pv);
    const CoeffBlock lv = parse_residual(dec, cs, cr.w, cr.h, kCtxCbfCr, kCtxSigChroma);
    reconstruct_leaf(recon.v, cr, pv, lv, qpc);
  }

  LeafDecision node(const BlockRect& rect, int depth_left, bool chroma_done) {
    const ModeMask allowed = allowed_modes(rect, st.cfg, depth_left);
    const SplitMode mode = parse_split(dec, cs, rect, allowed);
    const bool chroma_here = chroma_coded_here(rect, mode, chroma_done);
    LeafDecision first;
    if (mode == SplitMode::NONE) {
      LeafDecision d;
      d.intra = st.slice == SliceType::kIntra ? true : parse_is_intra(dec, cs);
      if (d.intra) {
        d.intra_mode = parse_intra_mode(dec, cs);
      } else {
        d.ref_dir = st.slice == SliceType::kInterB ? parse_ref_dir(dec, cs) : 0;
        const RefPicture* ref = d.ref_dir ? st.ref1 : st.ref0;
        if (!ref || !ref->frame)
          throw MalformedBitstream("inter block in a slice without that reference",
                                   dec.byte_offset());
        const auto [mx, my] = parse_mvd(dec);
        const MotionVector pmv = colocated_predictor(*ref, rect);
        d.mv = MotionVector{pmv.dx + mx, pmv.dy + my, ref->poc};
      }
      const PlaneBuffer pred = predict_luma_leaf(rect, d, recon.y, st.ref0, st.ref1);
      if (pred_out) paint_block(pred_out->y, rect, pred);
      const CoeffBlock levels = parse_residual(dec, cs, rect.w, rect.h, kCtxCbfLuma, kCtxSigLuma);
      reconstruct_leaf(recon.y, rect, pred, levels, qp);
      info.record_leaf(rect, leaf_cell_info(st, d, any_nonzero(levels)));
      first = d;
    } else {
      bool got = false;
      for (const BlockRect& cr : split(rect, mode)) {
        const LeafDecision f = node(cr, depth_left - 1, chroma_done || chroma_here);
        if (!got) {
          first = f;
          got = true;
        }
      }
    }
    if (chroma_here) chroma(rect, first);
    return first;
  }
};

}  // namespace

void emit_ctu(const RdNode& tree, const FrameBuffer& src, FrameBuffer& recon,
              CodingInfoMap& info, SliceCodingState& st, int eff_qp, RangeEncoder& enc,
              ContextSet& cs, FrameBuffer* pred_out) {
  EmitPass pass{src, recon, info, st, eff_qp, enc, cs, pred_out};
  pass.node(tree, st.cfg.max_depth, false);
}

void parse_ctu(const BlockRect& ctu, FrameBuffer& recon, CodingInfoMap& info,
               SliceCodingState& st, int eff_qp, RangeDecoder& dec, ContextSet& cs,
               FrameBuffer* pred_out) {
  ParsePass pass{recon, info, st, eff_qp, dec, cs, pred_out};
  pass.node(ctu, st.cfg.max_depth, false);
}

}  // namespace uvc
