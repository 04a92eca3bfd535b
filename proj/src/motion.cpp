#include "uvc/motion.hpp"

#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace uvc {
namespace {

struct TieKey {
  int64_t sad;
  int sum_abs, dy, dx;

  bool operator<(const TieKey& o) const {
    if (sad != o.sad) return sad < o.sad;
    if (sum_abs != o.sum_abs) return sum_abs < o.sum_abs;
    if (dy != o.dy) return dy < o.dy;
    return dx < o.dx;
  }
};

TieKey key_for(int64_t sad, int dx, int dy) {
  return {sad, std::abs(dx) + std::abs(dy), dy, dx};
}

// True when every sample the half-pel filter may touch lies inside the plane,
// so the clamped reads below can use raw rows instead.
bool window_inside(const PlaneBuffer& ref, const BlockRect& rect, int mv_dx, int mv_dy) {
  const int x0 = 2 * rect.x + mv_dx, y0 = 2 * rect.y + mv_dy;
  const int x1 = 2 * (rect.x + rect.w - 1) + mv_dx, y1 = 2 * (rect.y + rect.h - 1) + mv_dy;
  return (x0 >> 1) >= 0 && (y0 >> 1) >= 0 && (x1 >> 1) + 1 < ref.width() &&
         (y1 >> 1) + 1 < ref.height();
}

// SAD with an abandon threshold: once the running sum strictly exceeds
// `bound`, this candidate can no longer win (selection replaces on strictly
// smaller SAD first), so the exact argmin and tie-break are preserved.
int64_t sad_block_bounded(const PlaneBuffer& cur, const BlockRect& rect, const PlaneBuffer& ref,
                          int mv_dx, int mv_dy, int64_t bound) {
  int64_t sad = 0;
  if (!(mv_dx & 1) && !(mv_dy & 1)) {
    const int ox = mv_dx >> 1, oy = mv_dy >> 1;
    if (window_inside(ref, rect, mv_dx, mv_dy)) {
      for (int y = 0; y < rect.h; ++y) {
        const uint8_t* crow = cur.row(rect.y + y) + rect.x;
        const uint8_t* rrow = ref.row(rect.y + y + oy) + rect.x + ox;
        int64_t row_sum = 0;
        for (int x = 0; x < rect.w; ++x) row_sum += std::abs(static_cast<int>(crow[x]) - rrow[x]);
        sad += row_sum;
        if (sad > bound) return sad;
      }
      return sad;
    }
    for (int y = 0; y < rect.h; ++y) {
      for (int x = 0; x < rect.w; ++x)
        sad += std::abs(static_cast<int>(cur.at(rect.x + x, rect.y + y)) -
                        ref.at_clamped(rect.x + x + ox, rect.y + y + oy));
      if (sad > bound) return sad;
    }
    return sad;
  }
  for (int y = 0; y < rect.h; ++y) {
    for (int x = 0; x < rect.w; ++x)
      sad += std::abs(static_cast<int>(cur.at(rect.x + x, rect.y + y)) -
                      mc_sample(ref, 2 * (rect.x + x) + mv_dx, 2 * (rect.y + y) + mv_dy));
    if (sad > bound) return sad;
  }
  return sad;
}

}  // namespace

int mc_sample(const PlaneBuffer& ref, int sx2, int sy2) {
  const int ix = sx2 >> 1, fx = sx2 & 1;
  const int iy = sy2 >> 1, fy = sy2 & 1;
  const int a = ref.at_clamped(ix, iy);
  if (!fx && !fy) return a;
  const int b = ref.at_clamped(ix + 1, iy);
  if (fx && !fy) return (a + b + 1) >> 1;
  const int c = ref.at_clamped(ix, iy + 1);
  if (!fx) return (a + c + 1) >> 1;
  const int d = ref.at_clamped(ix + 1, iy + 1);
  return (a + b + c + d + 2) >> 2;
}

PlaneBuffer motion_compensate(const PlaneBuffer& ref, const BlockRect& rect,
                              const MotionVector& mv) {
  PlaneBuffer out(rect.w, rect.h);
  if (window_inside(ref, rect, mv.dx, mv.dy)) {
    const int ix = (2 * rect.x + mv.dx) >> 1, fx = mv.dx & 1;
    const int iy = (2 * rect.y + mv.dy) >> 1, fy = mv.dy & 1;
    for (int y = 0; y < rect.h; ++y) {
      uint8_t* orow = out.row(y);
      const uint8_t* r0 = ref.row(iy + y);
      if (!fx && !fy) {
        for (int x = 0; x < rect.w; ++x) orow[x] = r0[ix + x];
      } else if (fx && !fy) {
        for (int x = 0; x < rect.w; ++x)
          orow[x] = static_cast<uint8_t>((r0[ix + x] + r0[ix + x + 1] + 1) >> 1);
      } else {
        const uint8_t* r1 = ref.row(iy + y + 1);
        if (!fx) {
          for (int x = 0; x < rect.w; ++x)
            orow[x] = static_cast<uint8_t>((r0[ix + x] + r1[ix + x] + 1) >> 1);
        } else {
          for (int x = 0; x < rect.w; ++x)
            orow[x] = static_cast<uint8_t>(
                (r0[ix + x] + r0[ix + x + 1] + r1[ix + x] + r1[ix + x + 1] + 2) >> 2);
        }
      }
    }
    return out;
  }
  for (int y = 0; y < rect.h; ++y)
    for (int x = 0; x < rect.w; ++x)
      out.at(x, y) = static_cast<uint8_t>(
          mc_sample(ref, 2 * (rect.x + x) + mv.dx, 2 * (rect.y + y) + mv.dy));
  return out;
}

PlaneBuffer motion_compensate_chroma(const PlaneBuffer& ref, const BlockRect& rect,
                                     const MotionVector& mv) {
  PlaneBuffer out(rect.w, rect.h);
  for (int y = 0; y < rect.h; ++y) {
    for (int x = 0; x < rect.w; ++x) {
      const int sx4 = 4 * (rect.x + x) + mv.dx;
      const int sy4 = 4 * (rect.y + y) + mv.dy;
      const int ix = sx4 >> 2, fx = sx4 & 3;
      const int iy = sy4 >> 2, fy = sy4 & 3;
      const int a = ref.at_clamped(ix, iy);
      const int b = ref.at_clamped(ix + 1, iy);
      const int c = ref.at_clamped(ix, iy + 1);
      const int d = ref.at_clamped(ix + 1, iy + 1);
      out.at(x, y) = static_cast<uint8_t>(
          ((4 - fx) * (4 - fy) * a + fx * (4 - fy) * b + (4 - fx) * fy * c + fx * fy * d + 8) >>
          4);
    }
  }
  return out;
}

int64_t sad_block(const PlaneBuffer& cur, const BlockRect& rect, const PlaneBuffer& ref,
                  int mv_dx, int mv_dy) {
  return sad_block_bounded(cur, rect, ref, mv_dx, mv_dy, std::numeric_limits<int64_t>::max());
}

MotionSearchResult motion_search(const PlaneBuffer& cur, const BlockRect& rect,
                                 const PlaneBuffer& ref, int range, int ref_poc) {
  if (range < 0) throw std::invalid_argument("motion_search: negative range");
  MotionSearchResult best;
  best.mv = {0, 0, ref_poc};
  best.sad = sad_block(cur, rect, ref, 0, 0);
  TieKey best_key = key_for(best.sad, 0, 0);
  for (int oy = -range; oy <= range; ++oy) {
    for (int ox = -range; ox <= range; ++ox) {
      if (ox == 0 && oy == 0) continue;
      const int dx = 2 * ox, dy = 2 * oy;
      const int64_t sad = sad_block_bounded(cur, rect, ref, dx, dy, best_key.sad);
      if (sad > best_key.sad) continue;
      const TieKey k = key_for(sad, dx, dy);
      if (k < best_key) {
        best_key = k;
        best.mv = {dx, dy, ref_poc};
        best.sad = sad;
      }
    }
  }
  const int cx = best.mv.dx, cy = best.mv.dy;
  for (int hy = -1; hy <= 1; ++hy) {
    for (int hx = -1; hx <= 1; ++hx) {
      if (!hx && !hy) continue;
      const int dx = cx + hx, dy = cy + hy;
      if (std::abs(dx) > 2 * range || std::abs(dy) > 2 * range) continue;
      const int64_t sad = sad_block_bounded(cur, rect, ref, dx, dy, best_key.sad);
      if (sad > best_key.sad) continue;
      const TieKey k = key_for(sad, dx, dy);
      if (k < best_key) {
        best_key = k;
        best.mv = {dx, dy, ref_poc};
        best.sad = sad;
      }
    }
  }
  return best;
}

}  // namespace uvc
