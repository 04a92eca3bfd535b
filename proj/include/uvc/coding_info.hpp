#pragma once

#include <cstdint>
#include <vector>

#include "uvc/motion.hpp"
#include "uvc/partition.hpp"
#include "uvc/plane.hpp"

namespace uvc {

// Per-4x4-cell record of how the covering leaf block was coded. Both encoder
// and decoder rebuild this map, so everything derived from it (boundary
// strengths, the partition mask, co-located motion predictors) stays in sync.
struct CellInfo {
  int32_t leaf_id = -1;
  bool intra = true;
  bool cbf = false;  // covering block has any nonzero luma coefficient
  MotionVector mv;
};

class CodingInfoMap {
 public:
  CodingInfoMap() = default;
  CodingInfoMap(int width, int height);

  int w4() const { return w4_; }
  int h4() const { return h4_; }
  CellInfo& cell(int x4, int y4) { return cells_[static_cast<size_t>(y4) * w4_ + x4]; }
  const CellInfo& cell(int x4, int y4) const {
    return cells_[static_cast<size_t>(y4) * w4_ + x4];
  }
  const CellInfo& cell_at_pixel(int x, int y) const { return cell(x >> 2, y >> 2); }

  // Paints every 4x4 cell covered by rect (luma coordinates).
  void record_leaf(const BlockRect& rect, const CellInfo& info);

 private:
  int w4_ = 0, h4_ = 0;
  std::vector<CellInfo> cells_;
};

// Boundary strength between two neighboring blocks: 2 if either side is
// intra; else 1 if either side has coded coefficients, the MVs differ by >= 2
// half-pel units in either axis, or the reference pictures differ; else 0.
int derive_bs(const CellInfo& a, const CellInfo& b);

// Luma-resolution plane of boundary strengths in {0,1,2}: for each 4x4 cell
// whose left (top) neighbor belongs to a different leaf, the cell's left
// column (top row) is set to the edge strength, keeping the max where the two
// overlap. Interior samples stay 0.
PlaneBuffer build_bs_plane(const CodingInfoMap& map);

// 0/1 mask of partition boundaries: the top row and left column of every leaf
// block, frame edges included.
PlaneBuffer build_partition_mask(const CodingInfoMap& map);

// Half-resolution reduction (2x2 max) used to carry luma-grid features onto
// the chroma grid.
PlaneBuffer downsample_max_2x2(const PlaneBuffer& p);

}  // namespace uvc
