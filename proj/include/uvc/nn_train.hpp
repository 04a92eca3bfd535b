#pragma once

#include <cstdint>
#include <vector>

#include "uvc/nn_model.hpp"
#include "uvc/plane.hpp"

namespace uvc {

// One supervised example. `target` holds the pristine planes scaled to [0,1]
// with the same channel count as the model output; the reconstruction the
// residual is added to is read from the leading input channels (channel 0 for
// luma models, channels 0 and 1 for chroma models).
struct TrainPair {
  TensorStack inputs;
  TensorStack target;
};

struct TrainConfig {
  int steps = 200;
  double lr = 1e-3;
  int batch = 2;
  uint32_t seed = 1;
  double momentum = 0.9;
};

// Parameter gradients for one layer, in the same element order as the layer's
// kernel / bias / slopes arrays. Kept in double so batch accumulation does not
// lose precision before the update.
struct LayerGrads {
  std::vector<double> kernel;
  std::vector<double> bias;
  std::vector<double> slopes;
};

std::vector<LayerGrads> make_grad_buffers(const ModelWeights& model);
void zero_grad_buffers(std::vector<LayerGrads>& grads);

// Mean squared error of (residual + reconstruction) against the target,
// averaged over every output element.
double training_loss(const ModelWeights& model, const TrainPair& pair);

// Same loss, plus analytic parameter gradients accumulated (added) into
// `grads`, which must come from make_grad_buffers for this model.
double loss_and_gradients(const ModelWeights& model, const TrainPair& pair,
                          std::vector<LayerGrads>& grads);

struct TrainResult {
  std::vector<double> loss_trace;  // mean batch loss per step
};

// SGD with momentum over `data`, sampling `cfg.batch` pairs per step with a
// seeded generator. Updates `model` in place; weights are snapped back to
// float after every step. Throws TrainingDiverged if the loss stops being
// finite.
TrainResult train_model(ModelWeights& model, const std::vector<TrainPair>& data,
                        const TrainConfig& cfg);

// Training-data plumbing: axis-aligned crop of a channel stack, and a target
// stack built from pristine planes scaled to [0, 1].
TensorStack crop_stack(const TensorStack& t, int x, int y, int w, int h);
TensorStack target_from_planes(const std::vector<const PlaneBuffer*>& planes, int x, int y,
                               int w, int h);

}  // namespace uvc
