#include "uvc/plane.hpp"

#include <cmath>
#include <stdexcept>

namespace uvc {

PlaneBuffer::PlaneBuffer(int w, int h, uint8_t fill) : w_(w), h_(h) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("plane dimensions must be positive");
  data_.assign(static_cast<size_t>(w) * h, fill);
}

uint64_t sse_rect(const PlaneBuffer& a, const PlaneBuffer& b, int x, int y, int w, int h) {
  uint64_t acc = 0;
  for (int j = 0; j < h; ++j) {
    const uint8_t* pa = a.row(y + j) + x;
    const uint8_t* pb = b.row(y + j) + x;
    for (int i = 0; i < w; ++i) {
      int d = static_cast<int>(pa[i]) - static_cast<int>(pb[i]);
      acc += static_cast<uint64_t>(d * d);
    }
  }
  return acc;
}

uint64_t sse_plane(const PlaneBuffer& a, const PlaneBuffer& b) {
  if (!a.same_size(b)) throw std::invalid_argument("sse_plane: size mismatch");
  return sse_rect(a, b, 0, 0, a.width(), a.height());
}

double psnr(const PlaneBuffer& ref, const PlaneBuffer& test) {
  if (!ref.same_size(test)) throw std::invalid_argument("psnr: size mismatch");
  uint64_t sse = sse_plane(ref, test);
  if (sse == 0) return 100.0;
  double mse = static_cast<double>(sse) / (static_cast<double>(ref.width()) * ref.height());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace uvc
