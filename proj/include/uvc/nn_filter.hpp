#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "uvc/coding_info.hpp"
#include "uvc/nn_model.hpp"
#include "uvc/plane.hpp"

namespace uvc {

inline constexpr int kFilterCtuSize = 64;
inline constexpr int kNumFilterModels = 3;

// Slice-level filtering choice. `ctu_flags` is raster order over the CTU grid
// and is empty when the slice turns the filter off.
struct FilterDecision {
  bool slice_enable = false;
  int model_index = 0;
  std::vector<uint8_t> ctu_flags;
};

// One candidate model: the luma and chroma networks for the current slice
// type (intra or inter).
struct FilterNets {
  const ModelWeights* luma = nullptr;
  const ModelWeights* chroma = nullptr;
};

// Feature planes derived from the shared coding-info map. Masks are only
// populated for intra slices; the chroma variants are 2x2-max reductions of
// the luma ones.
struct FilterAux {
  PlaneBuffer bs_y, bs_c;
  PlaneBuffer mask_y, mask_c;
  bool has_mask = false;
};

FilterAux build_filter_aux(const CodingInfoMap& info, bool intra_slice);

// Channel stacks in the normative order [recon/255, pred/255, bs/2, qp/51,
// (intra only: boundary mask)]; the chroma stack interleaves U then V for the
// recon and pred slots and appends one channel of co-sited luma samples
// (luma at (2x, 2y), scaled by 255).
TensorStack build_luma_inputs(const PlaneBuffer& recon, const PlaneBuffer& pred,
                              const PlaneBuffer& bs, int qp, const PlaneBuffer* mask);
TensorStack build_chroma_inputs(const PlaneBuffer& recon_u, const PlaneBuffer& recon_v,
                                const PlaneBuffer& pred_u, const PlaneBuffer& pred_v,
                                const PlaneBuffer& bs, int qp, const PlaneBuffer* mask,
                                const PlaneBuffer& recon_luma);

// Runs both networks over the whole frame and returns the filtered
// reconstruction. Pure given its inputs; encoder and decoder share it.
FrameBuffer filter_frame(const FilterNets& nets, const FrameBuffer& recon,
                         const FrameBuffer& pred, const FilterAux& aux, int qp,
                         bool intra_slice);

// Replaces the CTUs flagged in `decision` (luma CTU plus the co-located
// chroma area) with their filtered version. With slice_enable off this is an
// exact copy of `recon`.
FrameBuffer apply_filter_decision(const FilterDecision& decision, const FrameBuffer& filtered,
                                  const FrameBuffer& recon);

int filter_ctu_cols(int width);
int filter_ctu_rows(int height);

struct FilterSelection {
  FilterDecision decision;
  FrameBuffer frame;
};

// Encoder-side choice: for each candidate model, CTUs keep the filtered
// version only where it strictly lowers the joint Y+U+V squared error against
// the original; the slice then picks the cheapest of {off, model 0, 1, 2} by
// SSE + lambda * signalled bits, earlier candidate winning ties.
FilterSelection select_filtering(const std::array<FilterNets, kNumFilterModels>& models,
                                 const FrameBuffer& original, const FrameBuffer& recon,
                                 const FrameBuffer& pred, const CodingInfoMap& info, int qp,
                                 bool intra_slice, double lambda);

}  // namespace uvc
