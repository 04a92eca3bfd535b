#include "uvc/bim.hpp"

#include <algorithm>
#include <stdexcept>

#include "uvc/common.hpp"
#include "uvc/quant.hpp"

namespace uvc {
namespace {

// Integer-pel SSE of an 8x8 block at (bx, by) against `ref` displaced by
// (dx, dy), with edge clamping.
double block_sse_at(const PlaneBuffer& cur, const PlaneBuffer& ref, int bx, int by, int dx,
                    int dy) {
  int64_t s = 0;
  for (int y = 0; y < kBimBlockSize; ++y)
    for (int x = 0; x < kBimBlockSize; ++x) {
      const int d = cur.at(bx + x, by + y) - ref.at_clamped(bx + x + dx, by + y + dy);
      s += static_cast<int64_t>(d) * d;
    }
  return static_cast<double>(s);
}

std::vector<double> error_map(const PlaneBuffer& center, const PlaneBuffer& nb, int cols,
                              int rows, int range) {
  std::vector<double> m(static_cast<size_t>(cols) * rows);
  for (int by = 0; by < rows; ++by)
    for (int bx = 0; bx < cols; ++bx) {
      double best = block_sse_at(center, nb, bx * kBimBlockSize, by * kBimBlockSize, 0, 0);
      for (int dy = -range; dy <= range; ++dy)
        for (int dx = -range; dx <= range; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const double s =
              block_sse_at(center, nb, bx * kBimBlockSize, by * kBimBlockSize, dx, dy);
          if (s < best) best = s;
        }
      m[static_cast<size_t>(by) * cols + bx] = best;
    }
  return m;
}

}  // namespace

MctfErrorMaps mctf_errors(const PlaneBuffer& center,
                          const std::vector<const PlaneBuffer*>& past,
                          const std::vector<const PlaneBuffer*>& future, int search_range) {
  if (past.empty() && future.empty())
    throw std::invalid_argument("mctf: window has no neighbor frames");
  if (past.size() > 2 || future.size() > 2)
    throw std::invalid_argument("mctf: window holds at most 2 past and 2 future frames");
  if (search_range < 0) throw std::invalid_argument("mctf: negative search range");
  for (const auto* p : past)
    if (!p || !p->same_size(center))
      throw std::invalid_argument("mctf: window frames must share dimensions");
  for (const auto* f : future)
    if (!f || !f->same_size(center))
      throw std::invalid_argument("mctf: window frames must share dimensions");

  MctfErrorMaps maps;
  maps.cols = (center.width() + kBimBlockSize - 1) / kBimBlockSize;
  maps.rows = (center.height() + kBimBlockSize - 1) / kBimBlockSize;
  for (const auto* p : past)
    maps.past.push_back(error_map(center, *p, maps.cols, maps.rows, search_range));
  for (const auto* f : future)
    maps.future.push_back(error_map(center, *f, maps.cols, maps.rows, search_range));
  return maps;
}

ImportanceMap importance_from_errors(const MctfErrorMaps& errors, int frame_width,
                                     int frame_height, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("bim: sigma must be positive");
  if (errors.future.empty())
    throw std::invalid_argument("bim: importance needs at least one future error map");

  const double s2 = sigma * sigma;
  const int nblk = errors.cols * errors.rows;
  std::vector<double> w(static_cast<size_t>(nblk), 0.0);
  for (const auto& map : errors.future)
    for (int i = 0; i < nblk; ++i)
      w[static_cast<size_t>(i)] += s2 / (s2 + map[static_cast<size_t>(i)] / 64.0);
  for (auto& x : w) x /= static_cast<double>(errors.future.size());

  ImportanceMap imp;
  imp.cols = (frame_width + 63) / 64;
  imp.rows = (frame_height + 63) / 64;
  imp.v.assign(static_cast<size_t>(imp.cols) * imp.rows, 0.0);
  const int per_ctu = 64 / kBimBlockSize;
  for (int cy = 0; cy < imp.rows; ++cy)
    for (int cx = 0; cx < imp.cols; ++cx) {
      const int bx0 = cx * per_ctu, by0 = cy * per_ctu;
      const int bx1 = std::min(bx0 + per_ctu, errors.cols);
      const int by1 = std::min(by0 + per_ctu, errors.rows);
      double acc = 0.0;
      int n = 0;
      for (int by = by0; by < by1; ++by)
        for (int bx = bx0; bx < bx1; ++bx) {
          acc += w[static_cast<size_t>(by) * errors.cols + bx];
          ++n;
        }
      imp.v[static_cast<size_t>(cy) * imp.cols + cx] = n ? acc / n : 1.0;
    }
  return imp;
}

QpOffsetMap delta_qp_from_importance(const ImportanceMap& imp,
                                     const std::array<double, 4>& t) {
  for (int i = 0; i < 4; ++i)
    if (!(t[i] > 0.0 && t[i] < 1.0) || (i > 0 && !(t[i] > t[i - 1])))
      throw std::invalid_argument("bim: thresholds must be strictly ascending in (0, 1)");
  QpOffsetMap out;
  out.cols = imp.cols;
  out.rows = imp.rows;
  out.v.resize(imp.v.size());
  for (size_t i = 0; i < imp.v.size(); ++i) {
    const double w = imp.v[i];
    int8_t d;
    if (w < t[0]) d = 2;
    else if (w < t[1]) d = 1;
    else if (w < t[2]) d = 0;
    else if (w < t[3]) d = -1;
    else d = -2;
    out.v[i] = d;
  }
  return out;
}

double default_bim_sigma(int base_qp) { return 2.0 * qstep(base_qp) / 3.0; }

bool bim_active(bool enabled, int temporal_layer, int poc, int frame_count) {
  return enabled && temporal_layer < 3 && poc <= frame_count - 2;
}

QpOffsetMap compute_bim_deltas(const std::vector<const PlaneBuffer*>& source_luma, int poc,
                               double sigma, const std::array<double, 4>& thresholds,
                               int search_range) {
  const int n = static_cast<int>(source_luma.size());
  if (poc < 0 || poc >= n) throw std::invalid_argument("bim: poc outside source window");
  std::vector<const PlaneBuffer*> past, future;
  for (int p = std::max(0, poc - 2); p < poc; ++p) past.push_back(source_luma[p]);
  for (int p = poc + 1; p <= std::min(n - 1, poc + 2); ++p) future.push_back(source_luma[p]);
  const PlaneBuffer& center = *source_luma[poc];
  const MctfErrorMaps maps = mctf_errors(center, past, future, search_range);
  const ImportanceMap imp =
      importance_from_errors(maps, center.width(), center.height(), sigma);
  return delta_qp_from_importance(imp, thresholds);
}

}  // namespace uvc
