#include "uvc/quant.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace uvc {
namespace {

// 64 * 2^(r/6) for r = qp % 6, anchored so qp=4 -> 64 (step exactly 1).
constexpr int64_t kStepMantissa[6] = {40, 45, 51, 57, 64, 72};

void check_qp(int qp) {
  if (qp < kMinQp || qp > kMaxQp)
    throw std::invalid_argument("qp " + std::to_string(qp) + " outside [0, 51]");
}

}  // namespace

int64_t qstep_64(int qp) {
  check_qp(qp);
  return kStepMantissa[qp % 6] << (qp / 6);
}

double qstep(int qp) { return static_cast<double>(qstep_64(qp)) / 64.0; }

CoeffBlock quantize(const CoeffBlock& coeffs, int qp, bool intra) {
  const int64_t d = qstep_64(qp);
  const int64_t f = intra ? d / 3 : d / 6;
  // Division by the invariant step via round-up reciprocal (Granlund &
  // Montgomery): with L = ceil(log2(d)) and M = floor(2^(24+L) / d) + 1,
  // (n * M) >> (24+L) == n / d exactly for all n < 2^24; larger n (corrupt
  // or synthetic inputs only) fall back to real division.
  int lshift = 1;
  while ((1ll << lshift) < d) ++lshift;
  const int shift = 24 + lshift;
  const uint64_t recip = (1ull << shift) / static_cast<uint64_t>(d) + 1;
  CoeffBlock out(coeffs.w, coeffs.h);
  for (size_t i = 0; i < coeffs.v.size(); ++i) {
    const int64_t c = coeffs.v[i];
    const int64_t n = 64 * std::abs(c) + f;
    const int64_t mag = n < (1ll << 24)
                            ? static_cast<int64_t>((static_cast<uint64_t>(n) * recip) >> shift)
                            : n / d;
    const int64_t level = clip<int64_t>(mag, 0, kMaxLevel);
    out.v[i] = static_cast<int32_t>(c < 0 ? -level : level);
  }
  return out;
}

CoeffBlock dequantize(const CoeffBlock& levels, int qp) {
  const int64_t d = qstep_64(qp);
  CoeffBlock out(levels.w, levels.h);
  for (size_t i = 0; i < levels.v.size(); ++i) {
    const int64_t l = levels.v[i];
    const int64_t mag = (std::abs(l) * d + 32) >> 6;
    out.v[i] = static_cast<int32_t>(l < 0 ? -mag : mag);
  }
  return out;
}

double quant_error_bound(int qp, bool intra) {
  const double f = intra ? 1.0 / 3.0 : 1.0 / 6.0;
  return (1.0 - f) * qstep(qp) + 1.0;
}

}  // namespace uvc
