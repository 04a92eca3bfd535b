#include "uvc/nn_filter.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "uvc/common.hpp"
#include "uvc/nn_infer.hpp"

namespace uvc {
namespace {

void require_same_size(const PlaneBuffer& a, const PlaneBuffer& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height())
    throw std::invalid_argument(std::string("filter inputs: ") + what + " dimension mismatch");
}

void fill_scaled(TensorStack& t, int c, const PlaneBuffer& p, double scale) {
  double* dst = t.plane(c);
  for (int y = 0; y < p.height(); ++y)
    for (int x = 0; x < p.width(); ++x)
      dst[static_cast<size_t>(y) * p.width() + x] = p.at(x, y) * scale;
}

void fill_constant(TensorStack& t, int c, double value) {
  double* dst = t.plane(c);
  for (size_t i = 0; i < static_cast<size_t>(t.h) * t.w; ++i) dst[i] = value;
}

}  // namespace

FilterAux build_filter_aux(const CodingInfoMap& info, bool intra_slice) {
  FilterAux aux;
  aux.bs_y = build_bs_plane(info);
  aux.bs_c = downsample_max_2x2(aux.bs_y);
  if (intra_slice) {
    aux.mask_y = build_partition_mask(info);
    aux.mask_c = downsample_max_2x2(aux.mask_y);
    aux.has_mask = true;
  }
  return aux;
}

TensorStack build_luma_inputs(const PlaneBuffer& recon, const PlaneBuffer& pred,
                              const PlaneBuffer& bs, int qp, const PlaneBuffer* mask) {
  require_same_size(recon, pred, "luma recon/pred");
  require_same_size(recon, bs, "luma recon/bs");
  if (mask) require_same_size(recon, *mask, "luma recon/mask");
  TensorStack t(mask ? 5 : 4, recon.height(), recon.width());
  fill_scaled(t, 0, recon, 1.0 / 255.0);
  fill_scaled(t, 1, pred, 1.0 / 255.0);
  fill_scaled(t, 2, bs, 1.0 / 2.0);
  fill_constant(t, 3, qp / 51.0);
  if (mask) fill_scaled(t, 4, *mask, 1.0);
  return t;
}

TensorStack build_chroma_inputs(const PlaneBuffer& recon_u, const PlaneBuffer& recon_v,
                                const PlaneBuffer& pred_u, const PlaneBuffer& pred_v,
                                const PlaneBuffer& bs, int qp, const PlaneBuffer* mask,
                                const PlaneBuffer& recon_luma) {
  require_same_size(recon_u, recon_v, "chroma U/V");
  require_same_size(recon_u, pred_u, "chroma recon/pred U");
  require_same_size(recon_v, pred_v, "chroma recon/pred V");
  require_same_size(recon_u, bs, "chroma recon/bs");
  if (mask) require_same_size(recon_u, *mask, "chroma recon/mask");
  if (recon_luma.width() < 2 * recon_u.width() - 1 ||
      recon_luma.height() < 2 * recon_u.height() - 1)
    throw std::invalid_argument("filter inputs: luma plane too small for chroma grid");
  TensorStack t(mask ? 8 : 7, recon_u.height(), recon_u.width());
  fill_scaled(t, 0, recon_u, 1.0 / 255.0);
  fill_scaled(t, 1, recon_v, 1.0 / 255.0);
  fill_scaled(t, 2, pred_u, 1.0 / 255.0);
  fill_scaled(t, 3, pred_v, 1.0 / 255.0);
  fill_scaled(t, 4, bs, 1.0 / 2.0);
  fill_constant(t, 5, qp / 51.0);
  int c = 6;
  if (mask) fill_scaled(t, c++, *mask, 1.0);
  double* dst = t.plane(c);
  for (int y = 0; y < recon_u.height(); ++y)
    for (int x = 0; x < recon_u.width(); ++x)
      dst[static_cast<size_t>(y) * recon_u.width() + x] =
          recon_luma.at(2 * x, 2 * y) / 255.0;
  return t;
}

FrameBuffer filter_frame(const FilterNets& nets, const FrameBuffer& recon,
                         const FrameBuffer& pred, const FilterAux& aux, int qp,
                         bool intra_slice) {
  if (!nets.luma || !nets.chroma)
    throw std::invalid_argument("filter: missing network weights");
  const PlaneBuffer* mask_y = (intra_slice && aux.has_mask) ? &aux.mask_y : nullptr;
  const PlaneBuffer* mask_c = (intra_slice && aux.has_mask) ? &aux.mask_c : nullptr;

  FrameBuffer out = recon;
  const TensorStack in_y = build_luma_inputs(recon.y, pred.y, aux.bs_y, qp, mask_y);
  const TensorStack res_y = infer(*nets.luma, in_y);
  apply_residual_plane(out.y, res_y.plane(0));

  const TensorStack in_c = build_chroma_inputs(recon.u, recon.v, pred.u, pred.v, aux.bs_c,
                                               qp, mask_c, recon.y);
  const TensorStack res_c = infer(*nets.chroma, in_c);
  apply_residual_plane(out.u, res_c.plane(0));
  apply_residual_plane(out.v, res_c.plane(1));
  return out;
}

int filter_ctu_cols(int width) { return (width + kFilterCtuSize - 1) / kFilterCtuSize; }
int filter_ctu_rows(int height) { return (height + kFilterCtuSize - 1) / kFilterCtuSize; }

namespace {

struct CtuRects {
  int x0, y0, w, h;      // luma
  int cx0, cy0, cw, ch;  // chroma
};

CtuRects ctu_rects(const FrameBuffer& f, int cx, int cy) {
  CtuRects r;
  r.x0 = cx * kFilterCtuSize;
  r.y0 = cy * kFilterCtuSize;
  r.w = std::min(kFilterCtuSize, f.width() - r.x0);
  r.h = std::min(kFilterCtuSize, f.height() - r.y0);
  r.cx0 = r.x0 / 2;
  r.cy0 = r.y0 / 2;
  r.cw = std::min((r.x0 + kFilterCtuSize + 1) / 2, f.u.width()) - r.cx0;
  r.ch = std::min((r.y0 + kFilterCtuSize + 1) / 2, f.u.height()) - r.cy0;
  return r;
}

uint64_t ctu_sse(const FrameBuffer& a, const FrameBuffer& b, const CtuRects& r) {
  uint64_t s = sse_rect(a.y, b.y, r.x0, r.y0, r.w, r.h);
  s += sse_rect(a.u, b.u, r.cx0, r.cy0, r.cw, r.ch);
  s += sse_rect(a.v, b.v, r.cx0, r.cy0, r.cw, r.ch);
  return s;
}

void copy_ctu(FrameBuffer& dst, const FrameBuffer& src, const CtuRects& r) {
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) dst.y.at(r.x0 + x, r.y0 + y) = src.y.at(r.x0 + x, r.y0 + y);
  for (int y = 0; y < r.ch; ++y)
    for (int x = 0; x < r.cw; ++x) {
      dst.u.at(r.cx0 + x, r.cy0 + y) = src.u.at(r.cx0 + x, r.cy0 + y);
      dst.v.at(r.cx0 + x, r.cy0 + y) = src.v.at(r.cx0 + x, r.cy0 + y);
    }
}

// Nominal signalled bin count: slice flag, then truncated-unary model index
// (cMax 2) and one flag per CTU when enabled.
int decision_bits(bool enable, int model_index, int nctu) {
  if (!enable) return 1;
  return 1 + (model_index < 2 ? model_index + 1 : 2) + nctu;
}

}  // namespace

FrameBuffer apply_filter_decision(const FilterDecision& decision, const FrameBuffer& filtered,
                                  const FrameBuffer& recon) {
  FrameBuffer out = recon;
  if (!decision.slice_enable) return out;
  const int cols = filter_ctu_cols(recon.width());
  const int rows = filter_ctu_rows(recon.height());
  if (decision.ctu_flags.size() != static_cast<size_t>(cols) * rows)
    throw std::invalid_argument("filter decision: flag count does not match CTU grid");
  for (int cy = 0; cy < rows; ++cy)
    for (int cx = 0; cx < cols; ++cx)
      if (decision.ctu_flags[static_cast<size_t>(cy) * cols + cx])
        copy_ctu(out, filtered, ctu_rects(recon, cx, cy));
  return out;
}

FilterSelection select_filtering(const std::array<FilterNets, kNumFilterModels>& models,
                                 const FrameBuffer& original, const FrameBuffer& recon,
                                 const FrameBuffer& pred, const CodingInfoMap& info, int qp,
                                 bool intra_slice, double lambda) {
  const int cols = filter_ctu_cols(recon.width());
  const int rows = filter_ctu_rows(recon.height());
  const int nctu = cols * rows;
  const FilterAux aux = build_filter_aux(info, intra_slice);

  std::vector<uint64_t> sse_off(static_cast<size_t>(nctu));
  uint64_t total_off = 0;
  for (int cy = 0; cy < rows; ++cy)
    for (int cx = 0; cx < cols; ++cx) {
      const uint64_t s = ctu_sse(original, recon, ctu_rects(recon, cx, cy));
      sse_off[static_cast<size_t>(cy) * cols + cx] = s;
      total_off += s;
    }

  FilterDecision best;
  double best_cost = static_cast<double>(total_off) + lambda * decision_bits(false, 0, nctu);
  FrameBuffer best_filtered;

  for (int m = 0; m < kNumFilterModels; ++m) {
    FrameBuffer filtered = filter_frame(models[m], recon, pred, aux, qp, intra_slice);
    FilterDecision cand;
    cand.slice_enable = true;
    cand.model_index = m;
    cand.ctu_flags.assign(static_cast<size_t>(nctu), 0);
    uint64_t total = 0;
    for (int cy = 0; cy < rows; ++cy)
      for (int cx = 0; cx < cols; ++cx) {
        const size_t i = static_cast<size_t>(cy) * cols + cx;
        const uint64_t s = ctu_sse(original, filtered, ctu_rects(recon, cx, cy));
        if (s < sse_off[i]) {  // ties keep the unfiltered block
          cand.ctu_flags[i] = 1;
          total += s;
        } else {
          total += sse_off[i];
        }
      }
    const double cost = static_cast<double>(total) + lambda * decision_bits(true, m, nctu);
    if (cost < best_cost) {  // ties keep the earlier candidate
      best_cost = cost;
      best = std::move(cand);
      best_filtered = std::move(filtered);
    }
  }

  FilterSelection sel;
  sel.frame = apply_filter_decision(best, best_filtered.width() ? best_filtered : recon, recon);
  sel.decision = std::move(best);
  return sel;
}

}  // namespace uvc
