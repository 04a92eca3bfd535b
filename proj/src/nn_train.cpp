#include "uvc/nn_train.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "uvc/common.hpp"
#include "uvc/nn_infer.hpp"

namespace uvc {
namespace {

TensorStack zeros_like(const TensorStack& t) { return TensorStack(t.ch, t.h, t.w); }

// Residual target error: e = out + recon - target, loss = mean(e^2).
// Writes dL/dout into `gout` and returns the loss. The reconstruction planes
// are the leading input channels by construction of the input stacks.
double loss_and_output_grad(const TensorStack& out, const TensorStack& inputs,
                            const TensorStack& target, TensorStack* gout) {
  if (out.ch != target.ch || out.h != target.h || out.w != target.w)
    throw std::invalid_argument("training: output/target shape mismatch");
  if (inputs.ch < out.ch || inputs.h != out.h || inputs.w != out.w)
    throw std::invalid_argument("training: input stack lacks reconstruction channels");
  const size_t n = out.v.size();
  double loss = 0.0;
  for (int c = 0; c < out.ch; ++c) {
    const double* op = out.plane(c);
    const double* rp = inputs.plane(c);
    const double* tp = target.plane(c);
    double* gp = gout ? gout->plane(c) : nullptr;
    for (size_t i = 0; i < static_cast<size_t>(out.h) * out.w; ++i) {
      const double e = op[i] + rp[i] - tp[i];
      loss += e * e;
      if (gp) gp[i] = 2.0 * e / static_cast<double>(n);
    }
  }
  return loss / static_cast<double>(n);
}

// Backward pass of conv_forward: gradients w.r.t. kernel, bias and input.
void conv_backward(const Layer& l, const TensorStack& in, const TensorStack& gout,
                   LayerGrads& g, TensorStack& gin) {
  const int k = l.ksize, r = k / 2;
  const int h = in.h, w = in.w;
  for (int oc = 0; oc < l.out_ch; ++oc) {
    const double* gp = gout.plane(oc);
    double gb = 0.0;
    for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) gb += gp[i];
    g.bias[oc] += gb;
    const size_t kbase = static_cast<size_t>(oc) * l.in_ch * k * k;
    for (int ic = 0; ic < l.in_ch; ++ic) {
      const double* ip = in.plane(ic);
      double* gip = gin.plane(ic);
      const float* kw = l.kernel.data() + kbase + static_cast<size_t>(ic) * k * k;
      double* gkw = g.kernel.data() + kbase + static_cast<size_t>(ic) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - r;
        const int y0 = dy < 0 ? -dy : 0;
        const int y1 = dy > 0 ? h - dy : h;
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - r;
          const int x0 = dx < 0 ? -dx : 0;
          const int x1 = dx > 0 ? w - dx : w;
          const double kv = kw[ky * k + kx];
          double gk = 0.0;
          for (int y = y0; y < y1; ++y) {
            const double* grow = gp + static_cast<size_t>(y) * w;
            const double* irow = ip + static_cast<size_t>(y + dy) * w + dx;
            double* girow = gip + static_cast<size_t>(y + dy) * w + dx;
            for (int x = x0; x < x1; ++x) {
              gk += grow[x] * irow[x];
              girow[x] += kv * grow[x];
            }
          }
          gkw[ky * k + kx] += gk;
        }
      }
    }
  }
}

void prelu_backward(const Layer& l, const TensorStack& in, const TensorStack& gout,
                    LayerGrads& g, TensorStack& gin) {
  for (int c = 0; c < in.ch; ++c) {
    const double a = l.slopes[c];
    const double* ip = in.plane(c);
    const double* gp = gout.plane(c);
    double* gip = gin.plane(c);
    double ga = 0.0;
    for (size_t i = 0; i < static_cast<size_t>(in.h) * in.w; ++i) {
      if (ip[i] > 0.0) {
        gip[i] += gp[i];
      } else {
        gip[i] += a * gp[i];
        ga += ip[i] * gp[i];
      }
    }
    g.slopes[c] += ga;
  }
}

}  // namespace

std::vector<LayerGrads> make_grad_buffers(const ModelWeights& model) {
  std::vector<LayerGrads> g(model.layers.size());
  for (size_t i = 0; i < model.layers.size(); ++i) {
    g[i].kernel.assign(model.layers[i].kernel.size(), 0.0);
    g[i].bias.assign(model.layers[i].bias.size(), 0.0);
    g[i].slopes.assign(model.layers[i].slopes.size(), 0.0);
  }
  return g;
}

void zero_grad_buffers(std::vector<LayerGrads>& grads) {
  for (auto& g : grads) {
    std::fill(g.kernel.begin(), g.kernel.end(), 0.0);
    std::fill(g.bias.begin(), g.bias.end(), 0.0);
    std::fill(g.slopes.begin(), g.slopes.end(), 0.0);
  }
}

double training_loss(const ModelWeights& model, const TrainPair& pair) {
  const TensorStack out = infer(model, pair.inputs);
  return loss_and_output_grad(out, pair.inputs, pair.target, nullptr);
}

double loss_and_gradients(const ModelWeights& model, const TrainPair& pair,
                          std::vector<LayerGrads>& grads) {
  if (grads.size() != model.layers.size())
    throw std::invalid_argument("training: gradient buffers do not match model");
  ForwardTrace trace = forward_pass(model, pair.inputs);
  const size_t nl = model.layers.size();
  const TensorStack& out = trace.acts[nl];

  // Gradient w.r.t. every activation; skip connections make some activations
  // feed two consumers, so each buffer accumulates until its producer runs.
  std::vector<TensorStack> gacts;
  gacts.reserve(trace.acts.size());
  for (const auto& a : trace.acts) gacts.push_back(zeros_like(a));
  const double loss = loss_and_output_grad(out, pair.inputs, pair.target, &gacts[nl]);

  for (size_t li = nl; li-- > 0;) {
    const Layer& l = model.layers[li];
    const TensorStack& gout = gacts[li + 1];
    switch (l.kind) {
      case LayerKind::kConv3x3:
      case LayerKind::kConv1x1:
        conv_backward(l, trace.acts[li], gout, grads[li], gacts[li]);
        break;
      case LayerKind::kPRelu:
        prelu_backward(l, trace.acts[li], gout, grads[li], gacts[li]);
        break;
      case LayerKind::kAddSkip: {
        TensorStack& gin = gacts[li];
        TensorStack& gskip = gacts[li - 3];
        for (size_t i = 0; i < gout.v.size(); ++i) {
          gin.v[i] += gout.v[i];
          gskip.v[i] += gout.v[i];
        }
        break;
      }
    }
  }
  return loss;
}

TensorStack crop_stack(const TensorStack& t, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w <= 0 || h <= 0 || x + w > t.w || y + h > t.h)
    throw std::invalid_argument("crop_stack: window outside the stack");
  TensorStack out(t.ch, h, w);
  for (int c = 0; c < t.ch; ++c) {
    const double* src = t.plane(c);
    double* dst = out.plane(c);
    for (int yy = 0; yy < h; ++yy)
      for (int xx = 0; xx < w; ++xx)
        dst[static_cast<size_t>(yy) * w + xx] =
            src[static_cast<size_t>(y + yy) * t.w + (x + xx)];
  }
  return out;
}

TensorStack target_from_planes(const std::vector<const PlaneBuffer*>& planes, int x, int y,
                               int w, int h) {
  if (planes.empty()) throw std::invalid_argument("target: no planes");
  TensorStack out(static_cast<int>(planes.size()), h, w);
  for (size_t c = 0; c < planes.size(); ++c) {
    const PlaneBuffer& p = *planes[c];
    if (x < 0 || y < 0 || x + w > p.width() || y + h > p.height())
      throw std::invalid_argument("target: window outside the plane");
    double* dst = out.plane(static_cast<int>(c));
    for (int yy = 0; yy < h; ++yy)
      for (int xx = 0; xx < w; ++xx)
        dst[static_cast<size_t>(yy) * w + xx] = p.at(x + xx, y + yy) / 255.0;
  }
  return out;
}

TrainResult train_model(ModelWeights& model, const std::vector<TrainPair>& data,
                        const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("training: empty data set");
  if (cfg.steps < 0 || cfg.batch <= 0 || !(cfg.lr > 0.0))
    throw std::invalid_argument("training: bad step/batch/lr configuration");

  std::mt19937 rng(cfg.seed);
  std::vector<LayerGrads> grads = make_grad_buffers(model);
  std::vector<LayerGrads> vel = make_grad_buffers(model);  // momentum state

  TrainResult result;
  result.loss_trace.reserve(static_cast<size_t>(cfg.steps));
  for (int step = 0; step < cfg.steps; ++step) {
    zero_grad_buffers(grads);
    double batch_loss = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const size_t idx = rng() % data.size();
      batch_loss += loss_and_gradients(model, data[idx], grads);
    }
    batch_loss /= cfg.batch;
    if (!std::isfinite(batch_loss))
      throw TrainingDiverged("training loss is not finite at step " + std::to_string(step));
    result.loss_trace.push_back(batch_loss);

    const double scale = 1.0 / cfg.batch;
    for (size_t li = 0; li < model.layers.size(); ++li) {
      Layer& l = model.layers[li];
      auto update = [&](std::vector<float>& w, const std::vector<double>& g,
                        std::vector<double>& v) {
        for (size_t i = 0; i < w.size(); ++i) {
          v[i] = cfg.momentum * v[i] - cfg.lr * g[i] * scale;
          w[i] = static_cast<float>(w[i] + v[i]);
        }
      };
      update(l.kernel, grads[li].kernel, vel[li].kernel);
      update(l.bias, grads[li].bias, vel[li].bias);
      update(l.slopes, grads[li].slopes, vel[li].slopes);
    }
  }
  return result;
}

}  // namespace uvc
