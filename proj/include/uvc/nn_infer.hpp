#pragma once

#include <vector>

#include "uvc/nn_model.hpp"
#include "uvc/plane.hpp"

namespace uvc {

// Activation record of a forward pass: acts[0] is the input stack and
// acts[k+1] the output of layer k. Kept double precision throughout; the
// trainer backpropagates through it.
struct ForwardTrace {
  std::vector<TensorStack> acts;
};

// Runs the network. Convolutions use zero padding, so outputs keep the input
// height/width. Throws std::invalid_argument if the stack's channel count
// does not match the first layer.
ForwardTrace forward_pass(const ModelWeights& m, const TensorStack& input);

// Forward pass returning just the output stack (the predicted residual in
// 1/255 units, one plane per output channel).
TensorStack infer(const ModelWeights& m, const TensorStack& input);

// recon' = clip(recon + round(255 * residual), 0, 255) with round half away
// from zero — the normative application rule. residual must match the plane
// dimensions.
void apply_residual_plane(PlaneBuffer& recon, const double* residual);

}  // namespace uvc
