#include "uvc/transform.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace uvc {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kLiftShift = 12;
constexpr int32_t kLiftHalf = 1 << (kLiftShift - 1);

// A 1-D transform is a sequence of slot negations and plane rotations, each
// rotation realized as three integer shears sharing 12-bit coefficients, which
// is what makes the whole pipeline exactly invertible.
struct LiftOp {
  enum Kind : uint8_t { kNeg, kRot };
  Kind kind;
  int16_t a = 0, b = 0;
  int32_t p = 0, q = 0;
};

struct LiftPlan {
  std::vector<LiftOp> ops;
  std::vector<int16_t> perm;  // output k comes from slot perm[k]
};

void emit_neg(std::vector<LiftOp>& ops, int a) {
  ops.push_back({LiftOp::kNeg, static_cast<int16_t>(a), 0, 0, 0});
}

// Normalizes theta into [-pi/2, pi/2] by factoring out -I, then quantizes the
// shear coefficients: p = -tan(theta/2), q = sin(theta), both in units of
// 2^-12.
void emit_rot(std::vector<LiftOp>& ops, int a, int b, double theta) {
  while (theta > kPi / 2 + 1e-12) {
    emit_neg(ops, a);
    emit_neg(ops, b);
    theta -= kPi;
  }
  while (theta < -kPi / 2 - 1e-12) {
    emit_neg(ops, a);
    emit_neg(ops, b);
    theta += kPi;
  }
  if (std::abs(theta) <= 1e-15) return;
  LiftOp op;
  op.kind = LiftOp::kRot;
  op.a = static_cast<int16_t>(a);
  op.b = static_cast<int16_t>(b);
  op.p = static_cast<int32_t>(std::lround(-std::tan(theta / 2) * 4096.0));
  op.q = static_cast<int32_t>(std::lround(std::sin(theta) * 4096.0));
  ops.push_back(op);
}

// Orthonormal DCT-IV matrix, used only at plan-build time.
std::vector<double> dct4_matrix(int n) {
  std::vector<double> m(static_cast<size_t>(n) * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      m[static_cast<size_t>(k) * n + j] =
          std::sqrt(2.0 / n) * std::cos(kPi * (2 * k + 1) * (2 * j + 1) / (4 * n));
  return m;
}

// Factors the DCT-IV on the given slots into Givens rotations by numeric QR:
// rotate rows to zero everything below the diagonal, leaving diag(+-1), then
// the transform itself is the sign fixes followed by the transposed rotations
// in reverse order.
void plan_dct4_block(std::vector<LiftOp>& ops, const std::vector<int>& slots) {
  const int n = static_cast<int>(slots.size());
  std::vector<double> a = dct4_matrix(n);
  struct Giv {
    int p, q;
    double theta;
  };
  std::vector<Giv> seq;
  for (int col = 0; col < n; ++col) {
    for (int row = n - 1; row > col; --row) {
      const double va = a[static_cast<size_t>(row - 1) * n + col];
      const double vb = a[static_cast<size_t>(row) * n + col];
      if (std::abs(vb) < 1e-13) continue;
      const double th = std::atan2(vb, va);
      const double c = std::cos(th), s = std::sin(th);
      for (int j = 0; j < n; ++j) {
        const double rp = c * a[static_cast<size_t>(row - 1) * n + j] +
                          s * a[static_cast<size_t>(row) * n + j];
        const double rq = -s * a[static_cast<size_t>(row - 1) * n + j] +
                          c * a[static_cast<size_t>(row) * n + j];
        a[static_cast<size_t>(row - 1) * n + j] = rp;
        a[static_cast<size_t>(row) * n + j] = rq;
      }
      seq.push_back({row - 1, row, th});
    }
  }
  for (int i = 0; i < n; ++i)
    if (a[static_cast<size_t>(i) * n + i] < 0) emit_neg(ops, slots[i]);
  for (auto it = seq.rbegin(); it != seq.rend(); ++it)
    emit_rot(ops, slots[it->p], slots[it->q], it->theta);
}

// DCT-II by even/odd decomposition: butterfly pairs (i, n-1-i) as a -pi/4
// rotation plus a sign fix, DCT-II recursively on the sums, DCT-IV on the
// differences, outputs interleaved even/odd.
std::vector<int> plan_dct2_rec(std::vector<LiftOp>& ops, const std::vector<int>& slots) {
  const int n = static_cast<int>(slots.size());
  if (n == 1) return slots;
  if (n == 2) {
    emit_rot(ops, slots[0], slots[1], -kPi / 4);
    emit_neg(ops, slots[1]);
    return slots;
  }
  const int m = n / 2;
  for (int i = 0; i < m; ++i) {
    emit_rot(ops, slots[i], slots[n - 1 - i], -kPi / 4);
    emit_neg(ops, slots[n - 1 - i]);
  }
  std::vector<int> low(slots.begin(), slots.begin() + m);
  std::vector<int> high(m);
  for (int i = 0; i < m; ++i) high[i] = slots[n - 1 - i];
  const std::vector<int> even_out = plan_dct2_rec(ops, low);
  plan_dct4_block(ops, high);
  std::vector<int> out;
  out.reserve(n);
  for (int k = 0; k < m; ++k) {
    out.push_back(even_out[k]);
    out.push_back(high[k]);
  }
  return out;
}

LiftPlan build_plan(int n) {
  LiftPlan plan;
  std::vector<int> slots(n);
  for (int i = 0; i < n; ++i) slots[i] = i;
  const std::vector<int> perm = plan_dct2_rec(plan.ops, slots);
  plan.perm.reserve(n);
  for (int s : perm) plan.perm.push_back(static_cast<int16_t>(s));
  return plan;
}

const LiftPlan& get_plan(int n) {
  static const LiftPlan p4 = build_plan(4);
  static const LiftPlan p8 = build_plan(8);
  static const LiftPlan p16 = build_plan(16);
  static const LiftPlan p32 = build_plan(32);
  static const LiftPlan p64 = build_plan(64);
  switch (n) {
    case 4: return p4;
    case 8: return p8;
    case 16: return p16;
    case 32: return p32;
    case 64: return p64;
    default: throw std::invalid_argument("transform: unsupported size " + std::to_string(n));
  }
}

// The 1-D passes run all lines of a block at once: buf holds n slots of
// `lanes` contiguous values each, and every lifting op streams across the
// lane dimension. Lane type is a template so the hot path can use int32
// (vectorizable) while oversized inputs keep exact int64 arithmetic; both
// evaluate the identical expression per element, so results are bit-equal
// whenever the narrow type does not overflow.
template <typename T>
void apply_forward_lanes(const LiftPlan& plan, T* buf, int n, int lanes, T* scratch) {
  for (const LiftOp& op : plan.ops) {
    T* ra = buf + static_cast<size_t>(op.a) * lanes;
    if (op.kind == LiftOp::kNeg) {
      for (int i = 0; i < lanes; ++i) ra[i] = -ra[i];
      continue;
    }
    T* rb = buf + static_cast<size_t>(op.b) * lanes;
    const T p = op.p, q = op.q, half = kLiftHalf;
    for (int i = 0; i < lanes; ++i) ra[i] += (p * rb[i] + half) >> kLiftShift;
    for (int i = 0; i < lanes; ++i) rb[i] += (q * ra[i] + half) >> kLiftShift;
    for (int i = 0; i < lanes; ++i) ra[i] += (p * rb[i] + half) >> kLiftShift;
  }
  for (int k = 0; k < n; ++k)
    std::memcpy(scratch + static_cast<size_t>(k) * lanes,
                buf + static_cast<size_t>(plan.perm[k]) * lanes, sizeof(T) * lanes);
  std::memcpy(buf, scratch, sizeof(T) * static_cast<size_t>(n) * lanes);
}

// Exact inverse of apply_forward_lanes: un-permute, then undo each op in
// reverse. The three shears form a palindrome, so the inverse uses the same
// (a,b,a) order with subtraction.
template <typename T>
void apply_inverse_lanes(const LiftPlan& plan, T* buf, int n, int lanes, T* scratch) {
  for (int k = 0; k < n; ++k)
    std::memcpy(scratch + static_cast<size_t>(plan.perm[k]) * lanes,
                buf + static_cast<size_t>(k) * lanes, sizeof(T) * lanes);
  std::memcpy(buf, scratch, sizeof(T) * static_cast<size_t>(n) * lanes);
  for (auto it = plan.ops.rbegin(); it != plan.ops.rend(); ++it) {
    const LiftOp& op = *it;
    T* ra = buf + static_cast<size_t>(op.a) * lanes;
    if (op.kind == LiftOp::kNeg) {
      for (int i = 0; i < lanes; ++i) ra[i] = -ra[i];
      continue;
    }
    T* rb = buf + static_cast<size_t>(op.b) * lanes;
    const T p = op.p, q = op.q, half = kLiftHalf;
    for (int i = 0; i < lanes; ++i) ra[i] -= (p * rb[i] + half) >> kLiftShift;
    for (int i = 0; i < lanes; ++i) rb[i] -= (q * ra[i] + half) >> kLiftShift;
    for (int i = 0; i < lanes; ++i) ra[i] -= (p * rb[i] + half) >> kLiftShift;
  }
}

template <typename T>
void transpose(const T* src, int w, int h, T* dst) {  // src[y][x] -> dst[x][y]
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) dst[static_cast<size_t>(x) * h + y] = src[static_cast<size_t>(y) * w + x];
}

constexpr int kMaxN = 64;

struct Scratch {
  std::array<int32_t, kMaxN * kMaxN> a, b;
};
struct ScratchWide {
  std::array<int64_t, kMaxN * kMaxN> a, b;
};

template <typename T, typename S>
void forward_2d(const ResidualBlock& res, S& s, CoeffBlock& out) {
  const int w = res.w, h = res.h;
  const LiftPlan& row_plan = get_plan(w);
  const LiftPlan& col_plan = get_plan(h);
  T* buf = s.a.data();
  T* tmp = s.b.data();
  for (size_t i = 0; i < res.v.size(); ++i) buf[i] = static_cast<T>(res.v[i]) * kTransformAmpScale;
  // Rows first: transpose so each row becomes a slot with contiguous lanes.
  transpose(buf, w, h, tmp);
  apply_forward_lanes(row_plan, tmp, w, h, buf);
  transpose(tmp, h, w, buf);
  apply_forward_lanes(col_plan, buf, h, w, tmp);
  for (size_t i = 0; i < res.v.size(); ++i) out.v[i] = static_cast<int32_t>(buf[i]);
}

template <typename T, typename S>
void inverse_2d(const CoeffBlock& coeffs, S& s, ResidualBlock& out) {
  const int w = coeffs.w, h = coeffs.h;
  const LiftPlan& row_plan = get_plan(w);
  const LiftPlan& col_plan = get_plan(h);
  T* buf = s.a.data();
  T* tmp = s.b.data();
  for (size_t i = 0; i < coeffs.v.size(); ++i) buf[i] = static_cast<T>(coeffs.v[i]);
  apply_inverse_lanes(col_plan, buf, h, w, tmp);
  transpose(buf, w, h, tmp);
  apply_inverse_lanes(row_plan, tmp, w, h, buf);
  transpose(tmp, h, w, buf);
  for (size_t i = 0; i < coeffs.v.size(); ++i) {
    // Undo the amplitude pre-scale, rounding half away from zero; legal
    // streams always land on even values so this only shapes corrupt input.
    const T v = buf[i];
    const T r = v >= 0 ? (v + 1) / 2 : -((-v + 1) / 2);
    out.v[i] = static_cast<int16_t>(clip<int64_t>(r, INT16_MIN, INT16_MAX));
  }
}

// int32 lanes are exact while every intermediate stays within +-2^18 (shear
// products then fit 2^30 < INT32_MAX). Rotations preserve the L2 norm up to
// rounding and no slot can exceed the vector's L2 norm, so inputs with
// L2 <= 2^17 are safe with 2x headroom. Legal streams never get near the
// bound (a 64x64 residual of +-255 has coefficient L2 <= 2*255*64 = 32640);
// anything larger — corrupt levels, say — takes the int64 path instead.
bool int32_lanes_safe(const CoeffBlock& coeffs) {
  uint64_t l2 = 0;
  for (int32_t c : coeffs.v) l2 += static_cast<uint64_t>(static_cast<int64_t>(c) * c);
  return l2 <= (1ull << 34);
}

}  // namespace

bool transform_size_supported(int n) {
  return n == 4 || n == 8 || n == 16 || n == 32 || n == 64;
}

CoeffBlock forward_transform(const ResidualBlock& res) {
  if (!transform_size_supported(res.w) || !transform_size_supported(res.h))
    throw std::invalid_argument("forward_transform: unsupported block " +
                                std::to_string(res.w) + "x" + std::to_string(res.h));
  CoeffBlock out(res.w, res.h);
  Scratch s;
  forward_2d<int32_t>(res, s, out);  // residual inputs always fit int32 lanes
  return out;
}

ResidualBlock inverse_transform(const CoeffBlock& coeffs) {
  if (!transform_size_supported(coeffs.w) || !transform_size_supported(coeffs.h))
    throw std::invalid_argument("inverse_transform: unsupported block " +
                                std::to_string(coeffs.w) + "x" + std::to_string(coeffs.h));
  ResidualBlock out(coeffs.w, coeffs.h);
  if (int32_lanes_safe(coeffs)) {
    Scratch s;
    inverse_2d<int32_t>(coeffs, s, out);
  } else {
    ScratchWide s;
    inverse_2d<int64_t>(coeffs, s, out);
  }
  return out;
}

ResidualBlock residual_difference(const PlaneBuffer& src, const BlockRect& rect,
                                  const PlaneBuffer& pred) {
  ResidualBlock res(rect.w, rect.h);
  for (int y = 0; y < rect.h; ++y) {
    const uint8_t* srow = src.row(rect.y + y) + rect.x;
    const uint8_t* prow = pred.row(y);
    int16_t* rrow = res.v.data() + static_cast<size_t>(y) * rect.w;
    for (int x = 0; x < rect.w; ++x)
      rrow[x] = static_cast<int16_t>(static_cast<int>(srow[x]) - prow[x]);
  }
  return res;
}

void reconstruct_into(PlaneBuffer& dst, const BlockRect& rect, const PlaneBuffer& pred,
                      const ResidualBlock& res) {
  for (int y = 0; y < rect.h; ++y) {
    uint8_t* drow = dst.row(rect.y + y) + rect.x;
    const uint8_t* prow = pred.row(y);
    const int16_t* rrow = res.v.data() + static_cast<size_t>(y) * rect.w;
    for (int x = 0; x < rect.w; ++x) drow[x] = clip_pixel(prow[x] + rrow[x]);
  }
}

}  // namespace uvc
