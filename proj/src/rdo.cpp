#include "uvc/rdo.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace uvc {
namespace {

std::vector<uint8_t> copy_rect(const PlaneBuffer& p, const BlockRect& r) {
  std::vector<uint8_t> v(static_cast<size_t>(r.w) * r.h);
  for (int y = 0; y < r.h; ++y)
    std::memcpy(v.data() + static_cast<size_t>(y) * r.w, p.row(r.y + y) + r.x,
                static_cast<size_t>(r.w));
  return v;
}

void paste_rect(PlaneBuffer& p, const BlockRect& r, const std::vector<uint8_t>& v) {
  for (int y = 0; y < r.h; ++y)
    std::memcpy(p.row(r.y + y) + r.x, v.data() + static_cast<size_t>(y) * r.w,
                static_cast<size_t>(r.w));
}

uint64_t pack_rect(const BlockRect& r) {
  return static_cast<uint64_t>(r.x) | (static_cast<uint64_t>(r.y) << 14) |
         (static_cast<uint64_t>(ilog2(r.w)) << 28) | (static_cast<uint64_t>(ilog2(r.h)) << 34);
}

int64_t block_sse(const PlaneBuffer& src, const BlockRect& rect, const PlaneBuffer& blk) {
  int64_t sum = 0;
  for (int y = 0; y < rect.h; ++y) {
    const uint8_t* srow = src.row(rect.y + y) + rect.x;
    const uint8_t* brow = blk.row(y);
    int64_t row_sum = 0;
    for (int x = 0; x < rect.w; ++x) {
      const int d = static_cast<int>(srow[x]) - brow[x];
      row_sum += d * d;
    }
    sum += row_sum;
  }
  return sum;
}

// pred -> quantized levels + in-place reconstruction block + SSE, the one
// normative residual pipeline shared by search, replay, encode and decode.
struct CodedBlock {
  CoeffBlock levels;
  PlaneBuffer recon;
  int64_t dist = 0;
};

CodedBlock run_residual_pipeline(const PlaneBuffer& src, const BlockRect& rect,
                                 const PlaneBuffer& pred, int qp, bool intra) {
  CodedBlock out;
  const ResidualBlock res = residual_difference(src, rect, pred);
  out.levels = quantize(forward_transform(res), qp, intra);
  bool any = false;
  for (int32_t v : out.levels.v)
    if (v) {
      any = true;
      break;
    }
  if (!any) {
    // All-zero levels reconstruct to the prediction exactly (the inverse of a
    // zero block is zero and clip(pred + 0) == pred), so skip the transforms.
    out.recon = pred;
  } else {
    const ResidualBlock rec_res = inverse_transform(dequantize(out.levels, qp));
    out.recon = PlaneBuffer(rect.w, rect.h);
    reconstruct_into(out.recon, {0, 0, rect.w, rect.h}, pred, rec_res);
  }
  out.dist = block_sse(src, rect, out.recon);
  return out;
}

}  // namespace

void RdSearch::build_residual_rate(const CoeffBlock& levels, ResidualRate& rr) {
  rr.built = true;
  for (int32_t v : levels.v)
    if (v) {
      rr.cbf = true;
      break;
    }
  if (!rr.cbf) return;  // a cbf of 0 is the whole story
  const auto& scan = zigzag_linear(levels.w, levels.h);
  for (size_t p = 0; p < scan.size(); ++p) {
    const int cls = scan_ctx_class(static_cast<int>(p));
    const int32_t v = levels.v[scan[p]];
    auto& vec = rr.bins[static_cast<size_t>(cls)];
    int& n = rr.nbins[static_cast<size_t>(cls)];
    if ((n & 63) == 0) vec.push_back(0);
    if (v) {
      vec.back() |= 1ull << (n & 63);
      const uint32_t mag = static_cast<uint32_t>(v < 0 ? -v : v);
      int len = 0;
      for (uint32_t t = mag; t > 1; t >>= 1) ++len;  // ue(mag - 1) prefix length
      rr.bypass16 += static_cast<int64_t>(2 * len + 2) * BitCounter::kOneBit;  // + sign
    }
    ++n;
  }
  for (int cls = 0; cls < 4; ++cls) {
    bool zero = true;
    for (uint64_t wbits : rr.bins[static_cast<size_t>(cls)]) zero = zero && wbits == 0;
    rr.all_zero[static_cast<size_t>(cls)] = zero;
  }
}

int64_t RdSearch::priced_residual16(const CoeffBlock& levels, ResidualRate& rr, ContextSet& cs,
                                    int cbf_ctx, int sig_ctx_base, ZeroRunMemo* zero_memo) {
  if (!rr.built) build_residual_rate(levels, rr);
  ArithContext& cbf = cs[cbf_ctx];
  const int cbf_bin = rr.cbf ? 1 : 0;
  int64_t total = BitCounter::bin_cost16(cbf.state, cbf_bin);
  cbf.update(cbf_bin);
  if (!rr.cbf) return total;
  for (int cls = 0; cls < 4; ++cls) {
    const int n = rr.nbins[static_cast<size_t>(cls)];
    if (!n) continue;
    ArithContext& c = cs[sig_ctx_base + cls];
    const uint16_t s0 = c.state;
    if (zero_memo && rr.all_zero[static_cast<size_t>(cls)]) {
      // A run of n zero bins from state s0 costs the same whatever block it
      // belongs to, so the memo can be shared across candidates.
      const uint32_t key = (static_cast<uint32_t>(s0) << 13) | static_cast<uint32_t>(n);
      auto it = zero_memo->find(key);
      if (it == zero_memo->end()) {
        int64_t cost = 0;
        ArithContext t{s0};
        for (int i = 0; i < n; ++i) {
          cost += BitCounter::bin_cost16(t.state, 0);
          t.update(0);
        }
        it = zero_memo->emplace(key, std::make_pair(cost, t.state)).first;
      }
      total += it->second.first;
      c.state = it->second.second;
      continue;
    }
    bool hit = false;
    for (const auto& m : rr.memo[static_cast<size_t>(cls)]) {
      if (m.s0 == s0) {
        total += m.cost16;
        c.state = m.s1;
        hit = true;
        break;
      }
    }
    if (hit) continue;
    int64_t cost = 0;
    ArithContext t{s0};
    const uint64_t* w = rr.bins[static_cast<size_t>(cls)].data();
    for (int i = 0; i < n; ++i) {
      const int bin = static_cast<int>((w[i >> 6] >> (i & 63)) & 1);
      cost += BitCounter::bin_cost16(t.state, bin);
      t.update(bin);
    }
    rr.memo[static_cast<size_t>(cls)].push_back({s0, t.state, cost});
    c.state = t.state;
    total += cost;
  }
  return total + rr.bypass16;
}

PlaneBuffer predict_luma_leaf(const BlockRect& rect, const LeafDecision& dec,
                              const PlaneBuffer& recon_y, const RefPicture* ref0,
                              const RefPicture* ref1) {
  if (dec.intra)
    return intra_predict(dec.intra_mode, gather_intra_neighbors(recon_y, rect), rect.w, rect.h);
  const RefPicture* ref = dec.ref_dir ? ref1 : ref0;
  if (!ref || !ref->frame)
    throw std::invalid_argument("prediction: missing reference picture");
  return motion_compensate(ref->frame->y, rect, dec.mv);
}

CoeffBlock quantize_leaf(const PlaneBuffer& src, const BlockRect& rect,
                         const PlaneBuffer& pred, int qp, bool intra) {
  return quantize(forward_transform(residual_difference(src, rect, pred)), qp, intra);
}

void reconstruct_leaf(PlaneBuffer& dst, const BlockRect& rect, const PlaneBuffer& pred,
                      const CoeffBlock& levels, int qp) {
  reconstruct_into(dst, rect, pred, inverse_transform(dequantize(levels, qp)));
}

double lambda_from_qp(int qp, bool intra_slice) {
  if (qp < kMinQp || qp > kMaxQp)
    throw std::invalid_argument("lambda_from_qp: qp " + std::to_string(qp) + " outside [0, 51]");
  const double k = intra_slice ? 0.68 : 0.57;
  return k * std::pow(2.0, (qp - 12) / 3.0);
}

MotionVector colocated_predictor(const RefPicture& ref, const BlockRect& rect) {
  const CellInfo& cell = ref.info->cell_at_pixel(rect.x, rect.y);
  if (cell.intra) return MotionVector{0, 0, ref.poc};
  return MotionVector{cell.mv.dx, cell.mv.dy, ref.poc};
}

RdSearch::RdSearch(const CtuSearchInput& in, PlaneBuffer& recon_y) : in_(in), recon_(recon_y) {}

RdSearchResult RdSearch::run(const BlockRect& rect, ContextSet& cs) {
  return search_node(rect, cs, in_.cfg.max_depth);
}

const RdSearch::IntraCand& RdSearch::intra_candidate(const BlockRect& rect, IntraMode mode,
                                                     const IntraNeighbors& nb) {
  IntraKey key;
  key.rect_mode = pack_rect(rect) | (static_cast<uint64_t>(mode) << 40);
  key.nb_hash = fnv1a(nb.left.data(), nb.left.size(),
                      fnv1a(nb.top.data(), nb.top.size()));
  auto it = intra_memo_.find(key);
  if (it != intra_memo_.end()) return it->second;
  const PlaneBuffer pred = intra_predict(mode, nb, rect.w, rect.h);
  CodedBlock cb = run_residual_pipeline(*in_.src_y, rect, pred, in_.qp, true);
  IntraCand cand;
  cand.levels = std::move(cb.levels);
  cand.recon = std::move(cb.recon);
  cand.dist = cb.dist;
  return intra_memo_.emplace(key, std::move(cand)).first->second;
}

const RdSearch::InterCand& RdSearch::inter_candidate(const BlockRect& rect, int dir,
                                                     const RefPicture& ref) {
  const uint64_t key = pack_rect(rect) | (static_cast<uint64_t>(dir) << 62);
  auto it = inter_memo_.find(key);
  if (it != inter_memo_.end()) return it->second;
  const MotionSearchResult ms =
      motion_search(*in_.src_y, rect, ref.frame->y, in_.search_range, ref.poc);
  const MotionVector pred_mv = colocated_predictor(ref, rect);
  const PlaneBuffer pred = motion_compensate(ref.frame->y, rect, ms.mv);
  CodedBlock cb = run_residual_pipeline(*in_.src_y, rect, pred, in_.qp, false);
  InterCand cand;
  cand.mv = ms.mv;
  cand.mvd_x = ms.mv.dx - pred_mv.dx;
  cand.mvd_y = ms.mv.dy - pred_mv.dy;
  cand.levels = std::move(cb.levels);
  cand.recon = std::move(cb.recon);
  cand.dist = cb.dist;
  return inter_memo_.emplace(key, std::move(cand)).first->second;
}

std::pair<LeafCoding, int64_t> RdSearch::search_leaf(const BlockRect& rect, ContextSet& cs) {
  const IntraNeighbors nb = gather_intra_neighbors(recon_, rect);
  LeafCoding best;
  int64_t best_rate16 = 0;
  ContextSet best_ctx;
  double best_total = 0;
  bool have = false;

  const auto consider = [&](const LeafDecision& dec, const CoeffBlock& levels,
                            const PlaneBuffer& recon, int64_t dist, ResidualRate& rate,
                            ContextSet ctx, int mvd_x, int mvd_y) {
    BitCounter bc;
    if (in_.slice != SliceType::kIntra) code_is_intra(bc, ctx, dec.intra);
    if (dec.intra) {
      code_intra_mode(bc, ctx, dec.intra_mode);
    } else {
      if (in_.slice == SliceType::kInterB) code_ref_dir(bc, ctx, dec.ref_dir);
      code_mvd(bc, mvd_x, mvd_y);
    }
    const int64_t rate16 = bc.bits_fixed() + priced_residual16(levels, rate, ctx, kCtxCbfLuma,
                                                               kCtxSigLuma, &zero_run_memo_);
    const double total = static_cast<double>(dist) +
                         in_.lambda * (static_cast<double>(rate16) / BitCounter::kOneBit);
    if (!have || total < best_total) {
      have = true;
      best_total = total;
      best = LeafCoding{dec, levels, recon, dist};
      best_rate16 = rate16;
      best_ctx = ctx;
    }
  };

  for (int m = 0; m < kNumIntraModes; ++m) {
    const IntraMode mode = static_cast<IntraMode>(m);
    const IntraCand& c = intra_candidate(rect, mode, nb);
    LeafDecision dec;
    dec.intra = true;
    dec.intra_mode = mode;
    consider(dec, c.levels, c.recon, c.dist, c.rate, cs, 0, 0);
  }
  if (in_.slice != SliceType::kIntra) {
    for (int dir = 0; dir < 2; ++dir) {
      const RefPicture* ref = dir == 0 ? in_.ref0 : in_.ref1;
      if (!ref) continue;
      if (dir == 1 && in_.slice != SliceType::kInterB) continue;
      const InterCand& c = inter_candidate(rect, dir, *ref);
      LeafDecision dec;
      dec.intra = false;
      dec.ref_dir = dir;
      dec.mv = c.mv;
      consider(dec, c.levels, c.recon, c.dist, c.rate, cs, c.mvd_x, c.mvd_y);
    }
  }

  paste_rect(recon_, rect, best.recon.data());
  cs = best_ctx;
  return {std::move(best), best_rate16};
}

RdSearchResult RdSearch::search_node(const BlockRect& rect, ContextSet& cs, int depth_left) {
  const ModeMask allowed = allowed_modes(rect, in_.cfg, depth_left);
  const std::vector<uint8_t> saved_px = copy_rect(recon_, rect);
  const ContextSet cs_in = cs;

  RdSearchResult best;
  ContextSet best_ctx = cs_in;
  {
    ContextSet ctx = cs_in;
    BitCounter bc;
    code_split(bc, ctx, rect, allowed, SplitMode::NONE);
    auto [leaf, leaf_rate16] = search_leaf(rect, ctx);
    best.node = std::make_unique<RdNode>();
    best.node->rect = rect;
    best.node->mode = SplitMode::NONE;
    best.node->leaf = std::move(leaf);
    best.cost = RdCost{best.node->leaf.dist, bc.bits_fixed() + leaf_rate16};
    best_ctx = ctx;
  }
  std::vector<uint8_t> best_px = copy_rect(recon_, rect);
  double best_total = best.cost.total(in_.lambda);

  for (int idx = 0; idx < kNumSplitModes; ++idx) {
    if (!(allowed & (1u << idx))) continue;
    const SplitMode mode = kSplitOrder[idx];
    paste_rect(recon_, rect, saved_px);
    ContextSet ctx = cs_in;
    BitCounter bc;
    code_split(bc, ctx, rect, allowed, mode);
    auto node = std::make_unique<RdNode>();
    node->rect = rect;
    node->mode = mode;
    RdCost acc{0, bc.bits_fixed()};
    for (const BlockRect& child : split(rect, mode)) {
      RdSearchResult r = search_node(child, ctx, depth_left - 1);
      acc.distortion += r.cost.distortion;
      acc.rate16 += r.cost.rate16;
      node->children.push_back(std::move(r.node));
    }
    const double total = acc.total(in_.lambda);
    if (total < best_total) {
      best_total = total;
      best.node = std::move(node);
      best.cost = acc;
      best_ctx = ctx;
      best_px = copy_rect(recon_, rect);
    }
  }

  paste_rect(recon_, rect, best_px);
  cs = best_ctx;
  return best;
}

namespace {

RdCost replay_node(const CtuSearchInput& in, const RdNode& n, ContextSet& cs,
                   PlaneBuffer& recon, int depth_left) {
  const ModeMask allowed = allowed_modes(n.rect, in.cfg, depth_left);
  BitCounter bc;
  code_split(bc, cs, n.rect, allowed, n.mode);
  RdCost cost{0, 0};
  if (!n.is_leaf()) {
    cost.rate16 = bc.bits_fixed();
    for (const auto& child : n.children) {
      const RdCost c = replay_node(in, *child, cs, recon, depth_left - 1);
      cost.distortion += c.distortion;
      cost.rate16 += c.rate16;
    }
    return cost;
  }

  const LeafDecision& dec = n.leaf.dec;
  PlaneBuffer pred;
  int mvd_x = 0, mvd_y = 0;
  if (dec.intra) {
    const IntraNeighbors nb = gather_intra_neighbors(recon, n.rect);
    pred = intra_predict(dec.intra_mode, nb, n.rect.w, n.rect.h);
  } else {
    const RefPicture* ref = dec.ref_dir == 0 ? in.ref0 : in.ref1;
    const MotionVector pred_mv = colocated_predictor(*ref, n.rect);
    pred = motion_compensate(ref->frame->y, n.rect, dec.mv);
    mvd_x = dec.mv.dx - pred_mv.dx;
    mvd_y = dec.mv.dy - pred_mv.dy;
  }
  const ResidualBlock res = residual_difference(*in.src_y, n.rect, pred);
  const CoeffBlock levels = quantize(forward_transform(res), in.qp, dec.intra);
  if (in.slice != SliceType::kIntra) code_is_intra(bc, cs, dec.intra);
  if (dec.intra) {
    code_intra_mode(bc, cs, dec.intra_mode);
  } else {
    if (in.slice == SliceType::kInterB) code_ref_dir(bc, cs, dec.ref_dir);
    code_mvd(bc, mvd_x, mvd_y);
  }
  code_residual(bc, cs, levels, kCtxCbfLuma, kCtxSigLuma);
  const ResidualBlock rec_res = inverse_transform(dequantize(levels, in.qp));
  PlaneBuffer blk(n.rect.w, n.rect.h);
  reconstruct_into(blk, {0, 0, n.rect.w, n.rect.h}, pred, rec_res);
  for (int y = 0; y < n.rect.h; ++y)
    for (int x = 0; x < n.rect.w; ++x) recon.at(n.rect.x + x, n.rect.y + y) = blk.at(x, y);
  cost.distortion = block_sse(*in.src_y, n.rect, blk);
  cost.rate16 = bc.bits_fixed();
  return cost;
}

}  // namespace

RdCost replay_tree(const CtuSearchInput& in, const RdNode& node, ContextSet& cs,
                   PlaneBuffer& recon_y) {
  return replay_node(in, node, cs, recon_y, in.cfg.max_depth);
}

}  // namespace uvc
