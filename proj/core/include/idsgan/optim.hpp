#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "idsgan/tensor.hpp"

namespace idsgan {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates, one pair per parameter, plus the step count.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;
};

/// One bias-corrected Adam update of `params` from their current gradients.
/// Parameters without a gradient buffer are treated as having zero gradient.
/// The state is sized lazily on the first call.
void adam_step(std::span<Tensor> params, AdamState& state, const AdamConfig& config);

}  // namespace idsgan
