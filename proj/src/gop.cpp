#include "uvc/gop.hpp"

#include <algorithm>
#include <stdexcept>

namespace uvc {
namespace {

void bisect(int lo, int hi, int depth, std::vector<GopEntry>& out) {
  if (hi - lo < 2) return;
  const int m = (lo + hi) / 2;
  GopEntry e;
  e.poc = m;
  e.layer = std::min(depth, 3);
  e.slice = SliceType::kInterB;
  e.refs0 = {lo};
  e.refs1 = {hi};
  out.push_back(std::move(e));
  bisect(lo, m, depth + 1, out);
  bisect(m, hi, depth + 1, out);
}

}  // namespace

std::vector<GopEntry> build_gop(GopType type, int frame_count) {
  if (frame_count <= 0) throw std::invalid_argument("build_gop: frame_count must be positive");
  std::vector<GopEntry> out;
  out.reserve(static_cast<size_t>(frame_count));
  switch (type) {
    case GopType::kIntraOnly:
      for (int poc = 0; poc < frame_count; ++poc)
        out.push_back({poc, 0, SliceType::kIntra, {}, {}});
      break;
    case GopType::kLowDelay:
      out.push_back({0, 0, SliceType::kIntra, {}, {}});
      for (int poc = 1; poc < frame_count; ++poc)
        out.push_back({poc, 0, SliceType::kInterP, {poc - 1}, {}});
      break;
    case GopType::kRandomAccess8: {
      out.push_back({0, 0, SliceType::kIntra, {}, {}});
      int lo = 0;
      while (lo < frame_count - 1) {
        const int hi = std::min(lo + 8, frame_count - 1);
        out.push_back({hi, 0, SliceType::kInterP, {lo}, {}});
        bisect(lo, hi, 1, out);
        lo = hi;
      }
      break;
    }
  }
  return out;
}

const char* gop_type_name(GopType t) {
  switch (t) {
    case GopType::kIntraOnly: return "intra";
    case GopType::kLowDelay: return "ld";
    case GopType::kRandomAccess8: return "ra8";
  }
  return "?";
}

}  // namespace uvc
