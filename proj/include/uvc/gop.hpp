#pragma once

#include <cstdint>
#include <vector>

namespace uvc {

enum class GopType : uint8_t { kIntraOnly = 0, kLowDelay = 1, kRandomAccess8 = 2 };

enum class SliceType : uint8_t { kIntra = 0, kInterP = 1, kInterB = 2 };

// One picture's place in the coding schedule. `layer` doubles as the slice QP
// offset (base + layer). Reference lists hold at most one POC each here.
struct GopEntry {
  int poc = 0;
  int layer = 0;
  SliceType slice = SliceType::kIntra;
  std::vector<int> refs0;  // past reference (list 0)
  std::vector<int> refs1;  // future reference (list 1), hierarchical GOPs only
};

// Pictures in coding order.
//  - intra-only: POC order, every picture intra, layer 0.
//  - low-delay: POC order, picture 0 intra, then P pictures referencing the
//    previous picture, layer 0.
//  - random-access-8: boundary pictures every 8 POCs at layer 0 (first intra,
//    later ones P referencing the previous boundary), the span between two
//    boundaries filled by binary bisection: the midpoint is a B picture
//    referencing both ends, at layer = bisection depth, capped at 3.
std::vector<GopEntry> build_gop(GopType type, int frame_count);

const char* gop_type_name(GopType t);

}  // namespace uvc
