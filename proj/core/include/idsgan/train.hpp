#pragma once

#include <cstdint>

#include "idsgan/data.hpp"
#include "idsgan/history.hpp"
#include "idsgan/model.hpp"
#include "idsgan/optim.hpp"

namespace idsgan::nn {

enum class LossKind { automatic, binary_ce, categorical_ce };

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 128;
  AdamConfig optimizer;
  std::uint64_t seed = 0;
  /// automatic: binary CE for sigmoid heads, categorical CE for softmax heads.
  LossKind loss = LossKind::automatic;
  /// Record an inference-mode training loss before the first update.
  bool measure_initial_loss = true;
};

struct LossAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Loss for the model's head against dataset labels.
Tensor classification_loss(const Model& model, const Tensor& probs, std::span<const int> labels,
                           LossKind kind = LossKind::automatic);

/// Inference-mode loss and accuracy over a whole dataset.
LossAccuracy evaluate(const Model& model, const data::Dataset& dataset, LossKind kind,
                      std::size_t chunk = 1024);

/// Mini-batch Adam training. Each epoch visits the rows in a seeded shuffled
/// order, including the final short batch; train loss/accuracy are running
/// means over the epoch's batches, validation metrics are inference-mode.
TrainHistory train_classifier(Model& model, const data::Dataset& train,
                              const data::Dataset& val, const TrainConfig& config);

}  // namespace idsgan::nn
