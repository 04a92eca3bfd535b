#pragma once

#include <cstdint>

#include "uvc/partition.hpp"
#include "uvc/plane.hpp"

namespace uvc {

// Motion vectors are stored in half-sample units of the luma grid.
struct MotionVector {
  int dx = 0;
  int dy = 0;
  int ref_poc = -1;

  bool operator==(const MotionVector& o) const = default;
};

struct MotionSearchResult {
  MotionVector mv;
  int64_t sad = 0;
};

// Samples ref at half-pel position (sx2, sy2) (units of half a luma sample),
// clamping reads to the frame edge; half positions are the bilinear average
// with round-half-up.
int mc_sample(const PlaneBuffer& ref, int sx2, int sy2);

// Copies/interpolates the rect displaced by mv from ref.
PlaneBuffer motion_compensate(const PlaneBuffer& ref, const BlockRect& rect,
                              const MotionVector& mv);

// Chroma rides the luma motion vector: on the half-resolution chroma grid a
// half-pel luma vector lands on quarter-pel positions, interpolated
// bilinearly with 1/16 weights. rect is in chroma coordinates.
PlaneBuffer motion_compensate_chroma(const PlaneBuffer& ref, const BlockRect& rect,
                                     const MotionVector& mv);

int64_t sad_block(const PlaneBuffer& cur, const BlockRect& rect, const PlaneBuffer& ref,
                  int mv_dx, int mv_dy);

// Exhaustive integer search over [-range, +range]^2 followed by half-pel
// refinement of the 8 surrounding candidates. Ties break toward smaller
// |dx|+|dy|, then smaller dy, then smaller dx. Refinement candidates that
// would break |dx|,|dy| <= 2*range are skipped so the bound always holds.
MotionSearchResult motion_search(const PlaneBuffer& cur, const BlockRect& rect,
                                 const PlaneBuffer& ref, int range, int ref_poc);

}  // namespace uvc
