#include "uvc/nn_infer.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace uvc {
namespace {

// Zero-padded convolution. Each output element starts at its bias and taps
// are added one at a time in fixed (in-channel, ky, kx) order, one rounding
// per tap, so results are bit-reproducible and independent of how the sweeps
// are batched. The 3x3 path copies each input channel into a zero-padded
// scratch plane once, then applies all nine taps per input channel in a
// single row sweep with the accumulator row kept hot; out-of-image taps
// contribute kv * 0.0, which leaves every sum unchanged.
TensorStack conv_forward(const Layer& l, const TensorStack& in) {
  const int k = l.ksize, r = k / 2;
  const int h = in.h, w = in.w;
  TensorStack out(l.out_ch, h, w);
  if (k == 1) {
    for (int oc = 0; oc < l.out_ch; ++oc) {
      double* op = out.plane(oc);
      const double b = l.bias[oc];
      for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) op[i] = b;
      const float* kbase = l.kernel.data() + static_cast<size_t>(oc) * l.in_ch;
      for (int ic = 0; ic < l.in_ch; ++ic) {
        const double* ip = in.plane(ic);
        const double kv = kbase[ic];
        for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) op[i] += kv * ip[i];
      }
    }
    return out;
  }
  if (k != 3) {
    // Generic fallback: tap-by-tap valid-window sweeps.
    for (int oc = 0; oc < l.out_ch; ++oc) {
      double* op = out.plane(oc);
      const double b = l.bias[oc];
      for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) op[i] = b;
      const float* kbase = l.kernel.data() + static_cast<size_t>(oc) * l.in_ch * k * k;
      for (int ic = 0; ic < l.in_ch; ++ic) {
        const double* ip = in.plane(ic);
        const float* kw = kbase + static_cast<size_t>(ic) * k * k;
        for (int ky = 0; ky < k; ++ky) {
          const int dy = ky - r;
          const int y0 = dy < 0 ? -dy : 0;
          const int y1 = dy > 0 ? h - dy : h;
          for (int kx = 0; kx < k; ++kx) {
            const int dx = kx - r;
            const int x0 = dx < 0 ? -dx : 0;
            const int x1 = dx > 0 ? w - dx : w;
            const double kv = kw[ky * k + kx];
            for (int y = y0; y < y1; ++y) {
              double* orow = op + static_cast<size_t>(y) * w;
              const double* irow = ip + static_cast<size_t>(y + dy) * w + dx;
              for (int x = x0; x < x1; ++x) orow[x] += kv * irow[x];
            }
          }
        }
      }
    }
    return out;
  }

  const int pw = w + 2, ph = h + 2;
  std::vector<double> pad(static_cast<size_t>(in.ch) * ph * pw, 0.0);
  for (int ic = 0; ic < in.ch; ++ic) {
    const double* ip = in.plane(ic);
    double* pp = pad.data() + static_cast<size_t>(ic) * ph * pw;
    for (int y = 0; y < h; ++y) {
      const double* src = ip + static_cast<size_t>(y) * w;
      double* dst = pp + static_cast<size_t>(y + 1) * pw + 1;
      for (int x = 0; x < w; ++x) dst[x] = src[x];
    }
  }
  std::vector<double> acc(static_cast<size_t>(w));
  for (int oc = 0; oc < l.out_ch; ++oc) {
    double* op = out.plane(oc);
    const double b = l.bias[oc];
    const float* kbase = l.kernel.data() + static_cast<size_t>(oc) * l.in_ch * 9;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) acc[x] = b;
      for (int ic = 0; ic < l.in_ch; ++ic) {
        const double* p0 = pad.data() + (static_cast<size_t>(ic) * ph + y) * pw;
        const double* p1 = p0 + pw;
        const double* p2 = p1 + pw;
        const float* kw = kbase + static_cast<size_t>(ic) * 9;
        const double k00 = kw[0], k01 = kw[1], k02 = kw[2];
        const double k10 = kw[3], k11 = kw[4], k12 = kw[5];
        const double k20 = kw[6], k21 = kw[7], k22 = kw[8];
        double* a = acc.data();
        for (int x = 0; x < w; ++x) {
          double s = a[x];
          s += k00 * p0[x];
          s += k01 * p0[x + 1];
          s += k02 * p0[x + 2];
          s += k10 * p1[x];
          s += k11 * p1[x + 1];
          s += k12 * p1[x + 2];
          s += k20 * p2[x];
          s += k21 * p2[x + 1];
          s += k22 * p2[x + 2];
          a[x] = s;
        }
      }
      double* orow = op + static_cast<size_t>(y) * w;
      for (int x = 0; x < w; ++x) orow[x] = acc[x];
    }
  }
  return out;
}

TensorStack prelu_forward(const Layer& l, const TensorStack& in) {
  TensorStack out(in.ch, in.h, in.w);
  const size_t plane_n = static_cast<size_t>(in.h) * in.w;
  for (int c = 0; c < in.ch; ++c) {
    const double s = l.slopes[c];
    const double* src = in.plane(c);
    double* dst = out.plane(c);
    for (size_t i = 0; i < plane_n; ++i) dst[i] = src[i] > 0.0 ? src[i] : s * src[i];
  }
  return out;
}

}  // namespace

ForwardTrace forward_pass(const ModelWeights& m, const TensorStack& input) {
  if (m.layers.empty() || input.ch != m.layers.front().in_ch)
    throw std::invalid_argument("forward_pass: input channels " + std::to_string(input.ch) +
                                " do not match model (" +
                                std::to_string(m.input_channels()) + ")");
  ForwardTrace t;
  t.acts.reserve(m.layers.size() + 1);
  t.acts.push_back(input);
  for (size_t i = 0; i < m.layers.size(); ++i) {
    const Layer& l = m.layers[i];
    switch (l.kind) {
      case LayerKind::kConv3x3:
      case LayerKind::kConv1x1:
        t.acts.push_back(conv_forward(l, t.acts.back()));
        break;
      case LayerKind::kPRelu:
        t.acts.push_back(prelu_forward(l, t.acts.back()));
        break;
      case LayerKind::kAddSkip: {
        const TensorStack& a = t.acts[i];      // output of layer i-1
        const TensorStack& b = t.acts[i - 3];  // output of layer i-4
        TensorStack out(a.ch, a.h, a.w);
        for (size_t j = 0; j < out.v.size(); ++j) out.v[j] = a.v[j] + b.v[j];
        t.acts.push_back(std::move(out));
        break;
      }
    }
  }
  return t;
}

// Inference keeps only the activations the skip connections can still reach
// (a five-slot ring instead of the whole trace). The layer arithmetic is the
// same code as forward_pass, so outputs are identical.
TensorStack infer(const ModelWeights& m, const TensorStack& input) {
  if (m.layers.empty() || input.ch != m.layers.front().in_ch)
    throw std::invalid_argument("forward_pass: input channels " + std::to_string(input.ch) +
                                " do not match model (" +
                                std::to_string(m.input_channels()) + ")");
  std::array<TensorStack, 5> ring;
  ring[0] = input;  // acts[a] lives in ring[a % 5]
  for (size_t i = 0; i < m.layers.size(); ++i) {
    const Layer& l = m.layers[i];
    const TensorStack& prev = ring[i % 5];  // acts[i]
    TensorStack out;
    switch (l.kind) {
      case LayerKind::kConv3x3:
      case LayerKind::kConv1x1:
        out = conv_forward(l, prev);
        break;
      case LayerKind::kPRelu:
        out = prelu_forward(l, prev);
        break;
      case LayerKind::kAddSkip: {
        const TensorStack& b = ring[(i - 3) % 5];  // acts[i-3]
        out = TensorStack(prev.ch, prev.h, prev.w);
        for (size_t j = 0; j < out.v.size(); ++j) out.v[j] = prev.v[j] + b.v[j];
        break;
      }
    }
    ring[(i + 1) % 5] = std::move(out);
  }
  return std::move(ring[m.layers.size() % 5]);
}

void apply_residual_plane(PlaneBuffer& recon, const double* residual) {
  const size_t n = static_cast<size_t>(recon.width()) * recon.height();
  std::vector<uint8_t>& px = recon.data();
  for (size_t i = 0; i < n; ++i) {
    const double r = residual[i] * 255.0;
    const long d = std::lround(r);  // half away from zero
    px[i] = clip_pixel(static_cast<int>(px[i]) + static_cast<int>(d));
  }
}

}  // namespace uvc
