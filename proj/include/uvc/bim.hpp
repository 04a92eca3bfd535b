#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "uvc/plane.hpp"

namespace uvc {

inline constexpr int kBimBlockSize = 8;
inline constexpr int kBimSearchRange = 8;
inline constexpr std::array<double, 4> kBimDefaultThresholds = {0.25, 0.45, 0.65, 0.85};

// Minimal motion-compensated SSE per 8x8 block of the center frame against
// each neighboring source frame (integer-pel full search).
struct MctfErrorMaps {
  int cols = 0, rows = 0;                  // 8x8 block grid
  std::vector<std::vector<double>> past;   // one map per past neighbor
  std::vector<std::vector<double>> future; // one map per future neighbor
};

MctfErrorMaps mctf_errors(const PlaneBuffer& center,
                          const std::vector<const PlaneBuffer*>& past,
                          const std::vector<const PlaneBuffer*>& future,
                          int search_range = kBimSearchRange);

// Per-CTU importance in (0, 1]: each block contributes
// sigma^2 / (sigma^2 + SSE/64) averaged over the future-frame maps, and a CTU
// averages its blocks. Past maps are ignored here; importance measures how
// much future pictures reuse this content.
struct ImportanceMap {
  int cols = 0, rows = 0;  // CTU grid
  std::vector<double> v;
  double at(int cx, int cy) const { return v[static_cast<size_t>(cy) * cols + cx]; }
};

ImportanceMap importance_from_errors(const MctfErrorMaps& errors, int frame_width,
                                     int frame_height, double sigma);

// Per-CTU delta-QP in [-2, +2]; low importance raises QP, high lowers it.
struct QpOffsetMap {
  int cols = 0, rows = 0;
  std::vector<int8_t> v;
  int at(int cx, int cy) const { return v[static_cast<size_t>(cy) * cols + cx]; }
};

QpOffsetMap delta_qp_from_importance(const ImportanceMap& imp,
                                     const std::array<double, 4>& thresholds =
                                         kBimDefaultThresholds);

// Default noise scale: two thirds of the quantizer step at the sequence base
// QP.
double default_bim_sigma(int base_qp);

// Deltas are only derived (and signalled) for pictures below the top temporal
// layer that still have at least one future source frame in the window.
bool bim_active(bool enabled, int temporal_layer, int poc, int frame_count);

// Convenience wrapper used by the encoder: builds the +-2 past/future window
// around `poc` from the source luma planes and runs the full chain.
QpOffsetMap compute_bim_deltas(const std::vector<const PlaneBuffer*>& source_luma, int poc,
                               double sigma,
                               const std::array<double, 4>& thresholds = kBimDefaultThresholds,
                               int search_range = kBimSearchRange);

}  // namespace uvc
