#pragma once

#include <cstdint>
#include <vector>

#include "uvc/common.hpp"
#include "uvc/partition.hpp"
#include "uvc/plane.hpp"

namespace uvc {

// Integer block of transform coefficients (or quantized levels), row-major.
struct CoeffBlock {
  int w = 0, h = 0;
  std::vector<int32_t> v;

  CoeffBlock() = default;
  CoeffBlock(int w_, int h_) : w(w_), h(h_), v(static_cast<size_t>(w_) * h_, 0) {}
  int32_t& at(int x, int y) { return v[static_cast<size_t>(y) * w + x]; }
  int32_t at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
};

// Residual samples, same layout, values in [-255, 255] for legal inputs.
struct ResidualBlock {
  int w = 0, h = 0;
  std::vector<int16_t> v;

  ResidualBlock() = default;
  ResidualBlock(int w_, int h_) : w(w_), h(h_), v(static_cast<size_t>(w_) * h_, 0) {}
  int16_t& at(int x, int y) { return v[static_cast<size_t>(y) * w + x]; }
  int16_t at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
};

// Separable integer DCT-II realized as lifting steps, which makes
// inverse_transform(forward_transform(x)) == x exactly. Output amplitude is
// 2x an orthonormal DCT (energy 4x); see FORMAT.md. Supported sizes: w and h
// each in {4, 8, 16, 32, 64}.
constexpr int kTransformAmpScale = 2;

bool transform_size_supported(int n);

CoeffBlock forward_transform(const ResidualBlock& res);
ResidualBlock inverse_transform(const CoeffBlock& coeffs);

// src(rect) - pred, where pred is a rect-sized block.
ResidualBlock residual_difference(const PlaneBuffer& src, const BlockRect& rect,
                                  const PlaneBuffer& pred);
// dst(rect) = clip(pred + res, 0, 255).
void reconstruct_into(PlaneBuffer& dst, const BlockRect& rect, const PlaneBuffer& pred,
                      const ResidualBlock& res);

}  // namespace uvc
