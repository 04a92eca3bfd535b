#pragma once

#include <cstdint>

#include "uvc/transform.hpp"

namespace uvc {

constexpr int kMinQp = 0;
constexpr int kMaxQp = 51;
constexpr int32_t kMaxLevel = 32767;

// Quantization step size, doubling every 6 qp: Qstep(qp) = 2^((qp-4)/6),
// evaluated in fixed point as mantissa_table[qp % 6] << (qp / 6) in 1/64
// units, so qp=4 is exactly step 1.
double qstep(int qp);
int64_t qstep_64(int qp);

// Dead-zone scalar quantizer. The rounding offset is Qstep/3 for intra blocks
// and Qstep/6 for inter blocks. Levels saturate at +-kMaxLevel.
CoeffBlock quantize(const CoeffBlock& coeffs, int qp, bool intra);
CoeffBlock dequantize(const CoeffBlock& levels, int qp);

// Worst-case absolute reconstruction error of dequantize(quantize(c)) for a
// legal-qp pipeline: (1 - f) * Qstep + 1, with f the dead-zone fraction.
double quant_error_bound(int qp, bool intra);

}  // namespace uvc
