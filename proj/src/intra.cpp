#include "uvc/intra.hpp"

#include <stdexcept>

namespace uvc {

const char* intra_mode_name(IntraMode m) {
  switch (m) {
    case IntraMode::kDc: return "dc";
    case IntraMode::kPlanar: return "planar";
    case IntraMode::kHor: return "hor";
    case IntraMode::kVer: return "ver";
  }
  return "?";
}

IntraNeighbors gather_intra_neighbors(const PlaneBuffer& recon, const BlockRect& r) {
  IntraNeighbors nb;
  nb.top.resize(r.w, 128);
  nb.left.resize(r.h, 128);
  if (r.y > 0)
    for (int x = 0; x < r.w; ++x) nb.top[x] = recon.at(r.x + x, r.y - 1);
  if (r.x > 0)
    for (int y = 0; y < r.h; ++y) nb.left[y] = recon.at(r.x - 1, r.y + y);
  return nb;
}

PlaneBuffer intra_predict(IntraMode mode, const IntraNeighbors& nb, int w, int h) {
  if (static_cast<int>(nb.top.size()) != w || static_cast<int>(nb.left.size()) != h)
    throw std::invalid_argument("intra_predict: neighbor sizes do not match block");
  PlaneBuffer out(w, h);
  switch (mode) {
    case IntraMode::kDc: {
      int64_t sum = 0;
      for (uint8_t v : nb.top) sum += v;
      for (uint8_t v : nb.left) sum += v;
      const int n = w + h;
      const uint8_t dc = static_cast<uint8_t>((sum + n / 2) / n);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = dc;
      break;
    }
    case IntraMode::kHor:
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = nb.left[y];
      break;
    case IntraMode::kVer:
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = nb.top[x];
      break;
    case IntraMode::kPlanar: {
      const int tr = nb.top[w - 1];
      const int bl = nb.left[h - 1];
      const int shift = ilog2(w) + ilog2(h) + 1;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const int64_t ph =
              static_cast<int64_t>(w - 1 - x) * nb.left[y] + static_cast<int64_t>(x + 1) * tr;
          const int64_t pv =
              static_cast<int64_t>(h - 1 - y) * nb.top[x] + static_cast<int64_t>(y + 1) * bl;
          out.at(x, y) = static_cast<uint8_t>((ph * h + pv * w + static_cast<int64_t>(w) * h) >>
                                              shift);
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace uvc
