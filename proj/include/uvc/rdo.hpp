#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "uvc/arith.hpp"
#include "uvc/coding_info.hpp"
#include "uvc/gop.hpp"
#include "uvc/intra.hpp"
#include "uvc/motion.hpp"
#include "uvc/partition.hpp"
#include "uvc/plane.hpp"
#include "uvc/quant.hpp"
#include "uvc/syntax.hpp"
#include "uvc/transform.hpp"

namespace uvc {

// Lagrange multiplier: k * 2^((qp-12)/3), k = 0.68 for intra slices and 0.57
// otherwise.
double lambda_from_qp(int qp, bool intra_slice);

// Rate is held in 2^-16-bit units (BitCounter::kOneBit): integer, so sums are
// order-independent and a replay reproduces the total exactly.
struct RdCost {
  int64_t distortion = 0;  // luma SSE
  int64_t rate16 = 0;

  double rate_bits() const { return static_cast<double>(rate16) / BitCounter::kOneBit; }
  double total(double lambda) const {
    return static_cast<double>(distortion) + lambda * rate_bits();
  }
};

// A previously coded picture usable as a reference: reconstruction plus the
// coding map that supplies co-located motion predictors.
struct RefPicture {
  const FrameBuffer* frame = nullptr;
  const CodingInfoMap* info = nullptr;
  int poc = -1;
};

// Motion predictor for a block: the reference picture's own motion at the
// block's top-left cell, zero if that cell was intra-coded.
MotionVector colocated_predictor(const RefPicture& ref, const BlockRect& rect);

struct LeafDecision {
  bool intra = true;
  IntraMode intra_mode = IntraMode::kDc;
  int ref_dir = 0;  // 0 = list 0, 1 = list 1 (B slices only)
  MotionVector mv;  // absolute, half-pel units
};

// One leaf's chosen coding: decision, quantized luma levels, and the exact
// reconstruction the decoder will produce.
struct LeafCoding {
  LeafDecision dec;
  CoeffBlock levels;
  PlaneBuffer recon;
  int64_t dist = 0;
};

struct RdNode {
  BlockRect rect;
  SplitMode mode = SplitMode::NONE;
  std::vector<std::unique_ptr<RdNode>> children;
  LeafCoding leaf;  // valid when mode == NONE

  bool is_leaf() const { return mode == SplitMode::NONE; }
};

// Everything a CTU search needs to see of the picture being coded. qp is the
// effective luma QP for this CTU (base + layer offset + per-CTU delta);
// lambda stays slice-level.
struct CtuSearchInput {
  const PlaneBuffer* src_y = nullptr;
  SliceType slice = SliceType::kIntra;
  int qp = 32;
  double lambda = 0.0;
  PartitionConfig cfg;
  int search_range = 8;
  const RefPicture* ref0 = nullptr;
  const RefPicture* ref1 = nullptr;
};

struct RdSearchResult {
  std::unique_ptr<RdNode> node;
  RdCost cost;
};

// Exhaustive Lagrangian tree search. Candidate order at each node is NONE
// then the split modes in signalling order, replaced only on strictly lower
// cost; leaf candidates are intra DC, PLANAR, HOR, VER, then inter per
// reference direction. recon_y is used as the intra-neighbor source: the
// search speculatively paints candidate reconstructions inside the searched
// rect and leaves the winner painted on return. Context states in `cs`
// advance exactly as the chosen tree's luma syntax will advance them.
class RdSearch {
 public:
  RdSearch(const CtuSearchInput& in, PlaneBuffer& recon_y);

  RdSearchResult run(const BlockRect& rect, ContextSet& cs);

  // Context-exact accelerator for pricing one fixed level block many times.
  // The significance bins of each scan class form a fixed sequence per
  // candidate, and each class's context evolves only on its own bins, so
  // replaying classes one at a time gives the same integer cost sum and the
  // same final states as the interleaved scan; visits from an already-seen
  // entry state are then a table hit. Sign and magnitude bits are bypass
  // coded and therefore state-free constants.
  struct ResidualRate {
    bool built = false;
    bool cbf = false;
    int64_t bypass16 = 0;
    std::array<std::vector<uint64_t>, 4> bins;  // packed per class, scan order
    std::array<int, 4> nbins{0, 0, 0, 0};
    std::array<bool, 4> all_zero{false, false, false, false};
    struct Memo {
      uint16_t s0, s1;
      int64_t cost16;
    };
    std::array<std::vector<Memo>, 4> memo;
  };

  // Cost of an all-zero bin run, shared across candidates: key is
  // (entry state << 13) | run length, value is (cost16, exit state).
  using ZeroRunMemo = std::unordered_map<uint32_t, std::pair<int64_t, uint16_t>>;

  // Cost and context effects equal code_residual into a BitCounter exactly.
  static void build_residual_rate(const CoeffBlock& levels, ResidualRate& rr);
  static int64_t priced_residual16(const CoeffBlock& levels, ResidualRate& rr, ContextSet& cs,
                                   int cbf_ctx, int sig_ctx_base,
                                   ZeroRunMemo* zero_memo = nullptr);

 private:
  struct IntraKey {
    uint64_t rect_mode = 0;
    uint64_t nb_hash = 0;
    bool operator==(const IntraKey&) const = default;
  };
  struct IntraKeyHash {
    size_t operator()(const IntraKey& k) const {
      return static_cast<size_t>(k.rect_mode * 0x9E3779B97F4A7C15ull ^ k.nb_hash);
    }
  };
  struct InterCand {
    MotionVector mv;
    int mvd_x = 0, mvd_y = 0;
    CoeffBlock levels;
    PlaneBuffer recon;
    int64_t dist = 0;
    mutable ResidualRate rate;
  };
  struct IntraCand {
    CoeffBlock levels;
    PlaneBuffer recon;
    int64_t dist = 0;
    mutable ResidualRate rate;
  };

  RdSearchResult search_node(const BlockRect& rect, ContextSet& cs, int depth_left);
  // Leaf-mode decision; cs enters past the split syntax and leaves past the
  // winning leaf's syntax. Returns the leaf plus its syntax rate.
  std::pair<LeafCoding, int64_t> search_leaf(const BlockRect& rect, ContextSet& cs);

  const IntraCand& intra_candidate(const BlockRect& rect, IntraMode mode,
                                   const IntraNeighbors& nb);
  const InterCand& inter_candidate(const BlockRect& rect, int dir, const RefPicture& ref);

  const CtuSearchInput& in_;
  PlaneBuffer& recon_;
  std::unordered_map<IntraKey, IntraCand, IntraKeyHash> intra_memo_;
  std::unordered_map<uint64_t, InterCand> inter_memo_;
  ZeroRunMemo zero_run_memo_;
};

// Oracle and emission twin: re-codes the tree's luma syntax into a fresh
// BitCounter while recomputing every reconstruction from scratch (prediction,
// transform, quantization), painting recon_y. Returns exactly the cost the
// search reported for this tree, advancing cs identically.
RdCost replay_tree(const CtuSearchInput& in, const RdNode& node, ContextSet& cs,
                   PlaneBuffer& recon_y);

// The three normative leaf stages, shared verbatim by the search, the
// emission pass and the decoder.
PlaneBuffer predict_luma_leaf(const BlockRect& rect, const LeafDecision& dec,
                              const PlaneBuffer& recon_y, const RefPicture* ref0,
                              const RefPicture* ref1);
CoeffBlock quantize_leaf(const PlaneBuffer& src, const BlockRect& rect,
                         const PlaneBuffer& pred, int qp, bool intra);
void reconstruct_leaf(PlaneBuffer& dst, const BlockRect& rect, const PlaneBuffer& pred,
                      const CoeffBlock& levels, int qp);

}  // namespace uvc
