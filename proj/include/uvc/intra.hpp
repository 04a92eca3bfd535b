#pragma once

#include <cstdint>
#include <vector>

#include "uvc/partition.hpp"
#include "uvc/plane.hpp"

namespace uvc {

enum class IntraMode : uint8_t { kDc = 0, kPlanar = 1, kHor = 2, kVer = 3 };
constexpr int kNumIntraModes = 4;
const char* intra_mode_name(IntraMode m);

// Reference samples for one block: the row directly above (length w) and the
// column directly to the left (length h). Samples outside the frame are
// substituted with 128 by gather_intra_neighbors; inside the frame both
// neighbors are always reconstructed before the block is coded.
struct IntraNeighbors {
  std::vector<uint8_t> top;
  std::vector<uint8_t> left;
};

IntraNeighbors gather_intra_neighbors(const PlaneBuffer& recon, const BlockRect& r);

// DC: rounded mean of all neighbor samples. HOR/VER: replicate the left
// column / top row. PLANAR: bilinear blend toward the top-right and
// bottom-left corner samples with round-to-nearest.
PlaneBuffer intra_predict(IntraMode mode, const IntraNeighbors& nb, int w, int h);

}  // namespace uvc
