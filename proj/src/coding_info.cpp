#include "uvc/coding_info.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace uvc {

CodingInfoMap::CodingInfoMap(int width, int height) {
  if (width <= 0 || height <= 0 || width % 4 || height % 4)
    throw std::invalid_argument("CodingInfoMap: dimensions must be positive multiples of 4");
  w4_ = width / 4;
  h4_ = height / 4;
  cells_.assign(static_cast<size_t>(w4_) * h4_, CellInfo{});
}

void CodingInfoMap::record_leaf(const BlockRect& rect, const CellInfo& info) {
  for (int y4 = rect.y / 4; y4 < (rect.y + rect.h) / 4; ++y4)
    for (int x4 = rect.x / 4; x4 < (rect.x + rect.w) / 4; ++x4) cell(x4, y4) = info;
}

int derive_bs(const CellInfo& a, const CellInfo& b) {
  if (a.intra || b.intra) return 2;
  if (a.cbf || b.cbf) return 1;
  if (std::abs(a.mv.dx - b.mv.dx) >= 2 || std::abs(a.mv.dy - b.mv.dy) >= 2) return 1;
  if (a.mv.ref_poc != b.mv.ref_poc) return 1;
  return 0;
}

PlaneBuffer build_bs_plane(const CodingInfoMap& map) {
  PlaneBuffer out(map.w4() * 4, map.h4() * 4, 0);
  for (int y4 = 0; y4 < map.h4(); ++y4) {
    for (int x4 = 0; x4 < map.w4(); ++x4) {
      const CellInfo& c = map.cell(x4, y4);
      if (x4 > 0) {
        const CellInfo& l = map.cell(x4 - 1, y4);
        if (l.leaf_id != c.leaf_id) {
          const uint8_t bs = static_cast<uint8_t>(derive_bs(l, c));
          for (int i = 0; i < 4; ++i) {
            uint8_t& v = out.at(x4 * 4, y4 * 4 + i);
            v = std::max(v, bs);
          }
        }
      }
      if (y4 > 0) {
        const CellInfo& t = map.cell(x4, y4 - 1);
        if (t.leaf_id != c.leaf_id) {
          const uint8_t bs = static_cast<uint8_t>(derive_bs(t, c));
          for (int i = 0; i < 4; ++i) {
            uint8_t& v = out.at(x4 * 4 + i, y4 * 4);
            v = std::max(v, bs);
          }
        }
      }
    }
  }
  return out;
}

PlaneBuffer build_partition_mask(const CodingInfoMap& map) {
  PlaneBuffer out(map.w4() * 4, map.h4() * 4, 0);
  for (int y4 = 0; y4 < map.h4(); ++y4) {
    for (int x4 = 0; x4 < map.w4(); ++x4) {
      const CellInfo& c = map.cell(x4, y4);
      if (x4 == 0 || map.cell(x4 - 1, y4).leaf_id != c.leaf_id)
        for (int i = 0; i < 4; ++i) out.at(x4 * 4, y4 * 4 + i) = 1;
      if (y4 == 0 || map.cell(x4, y4 - 1).leaf_id != c.leaf_id)
        for (int i = 0; i < 4; ++i) out.at(x4 * 4 + i, y4 * 4) = 1;
    }
  }
  return out;
}

PlaneBuffer downsample_max_2x2(const PlaneBuffer& p) {
  PlaneBuffer out(p.width() / 2, p.height() / 2, 0);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      out.at(x, y) = std::max(std::max(p.at(2 * x, 2 * y), p.at(2 * x + 1, 2 * y)),
                              std::max(p.at(2 * x, 2 * y + 1), p.at(2 * x + 1, 2 * y + 1)));
  return out;
}

}  // namespace uvc
