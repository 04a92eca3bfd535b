#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uvc/common.hpp"

namespace uvc {

// Channel-major real-valued plane stack (all planes share h x w).
struct TensorStack {
  int ch = 0, h = 0, w = 0;
  std::vector<double> v;

  TensorStack() = default;
  TensorStack(int ch_, int h_, int w_)
      : ch(ch_), h(h_), w(w_), v(static_cast<size_t>(ch_) * h_ * w_, 0.0) {}
  double& at(int c, int y, int x) {
    return v[(static_cast<size_t>(c) * h + y) * w + x];
  }
  double at(int c, int y, int x) const {
    return v[(static_cast<size_t>(c) * h + y) * w + x];
  }
  double* plane(int c) { return v.data() + static_cast<size_t>(c) * h * w; }
  const double* plane(int c) const { return v.data() + static_cast<size_t>(c) * h * w; }
};

enum class LayerKind : uint8_t { kConv3x3 = 0, kConv1x1 = 1, kPRelu = 2, kAddSkip = 3 };

// One network layer. Convolutions hold kernel (out,in,ky,kx order) and bias;
// PReLU holds per-channel slopes; add-skip holds nothing and adds the
// activation from four layers earlier (the residual-block input).
struct Layer {
  LayerKind kind = LayerKind::kConv3x3;
  int in_ch = 0, out_ch = 0, ksize = 0;
  std::vector<float> kernel;
  std::vector<float> bias;
  std::vector<float> slopes;
};

// Slice-type codes stored in weight files.
enum class ModelSliceType : uint8_t {
  kIntraLuma = 0,
  kInterLuma = 1,
  kIntraChroma = 2,
  kInterChroma = 3,
};

struct ModelWeights {
  ModelSliceType slice_type = ModelSliceType::kIntraLuma;
  std::vector<Layer> layers;

  int input_channels() const { return layers.empty() ? 0 : layers.front().in_ch; }
  int output_channels() const { return layers.empty() ? 0 : layers.back().out_ch; }
};

// Input plane counts: luma [recon, pred, bs, qp (+ partition mask when
// intra)], chroma [recon U, recon V, pred U, pred V, bs, qp (+ mask),
// downsampled luma recon].
int model_input_channels(ModelSliceType t);
int model_output_channels(ModelSliceType t);

// Residual CNN: 3x3 conv to 16 channels, PReLU, four residual blocks
// (conv-PReLU-conv plus skip) at width 16, final 3x3 conv to the output
// channel count. The final conv starts at zero so an untrained model is an
// exact no-op; other kernels get small seeded uniform values.
ModelWeights make_model(ModelSliceType t, uint32_t seed);

// Structural validation used by load_weights and the trainer; throws
// MalformedWeights on chain mismatches or malformed skip placement.
void validate_model(const ModelWeights& m);

void save_weights(const ModelWeights& m, const std::string& path);
ModelWeights load_weights(const std::string& path);

// FNV-1a of the file bytes; identifies models in the container header.
uint64_t weights_file_hash(const std::string& path);

}  // namespace uvc
