#pragma once

#include <cstdint>
#include <vector>

#include "uvc/common.hpp"

namespace uvc {

// One 8-bit sample plane. Row-major, no padding.
class PlaneBuffer {
public:
  PlaneBuffer() = default;
  PlaneBuffer(int w, int h, uint8_t fill = 0);

  int width() const { return w_; }
  int height() const { return h_; }

  uint8_t at(int x, int y) const { return data_[static_cast<size_t>(y) * w_ + x]; }
  uint8_t& at(int x, int y) { return data_[static_cast<size_t>(y) * w_ + x]; }

  // Edge-clamped read; safe for any coordinate.
  uint8_t at_clamped(int x, int y) const {
    return at(clip(x, 0, w_ - 1), clip(y, 0, h_ - 1));
  }

  const uint8_t* row(int y) const { return data_.data() + static_cast<size_t>(y) * w_; }
  uint8_t* row(int y) { return data_.data() + static_cast<size_t>(y) * w_; }

  const std::vector<uint8_t>& data() const { return data_; }
  std::vector<uint8_t>& data() { return data_; }

  bool same_size(const PlaneBuffer& o) const { return w_ == o.w_ && h_ == o.h_; }

private:
  int w_ = 0;
  int h_ = 0;
  std::vector<uint8_t> data_;
};

// One 4:2:0 picture: full-resolution luma, half-resolution chroma.
struct FrameBuffer {
  PlaneBuffer y, u, v;
  int poc = 0;

  FrameBuffer() = default;
  FrameBuffer(int w, int h, uint8_t fill_y = 0, uint8_t fill_c = 128)
      : y(w, h, fill_y), u(w / 2, h / 2, fill_c), v(w / 2, h / 2, fill_c) {}

  int width() const { return y.width(); }
  int height() const { return y.height(); }
};

// Sum of squared differences over a rect of two planes.
uint64_t sse_rect(const PlaneBuffer& a, const PlaneBuffer& b, int x, int y, int w, int h);
uint64_t sse_plane(const PlaneBuffer& a, const PlaneBuffer& b);

// PSNR against an 8-bit peak. Identical planes return the 100 dB sentinel.
double psnr(const PlaneBuffer& ref, const PlaneBuffer& test);

}  // namespace uvc
