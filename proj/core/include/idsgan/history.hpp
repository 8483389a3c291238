#pragma once

#include <cmath>
#include <vector>

namespace idsgan {

struct EpochRecord {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  /// Inference-mode loss on the training set before the first update; NaN when
  /// not measured. Gives the first epoch a predecessor for monotonicity checks.
  double initial_train_loss = std::nan("");
  std::vector<EpochRecord> epochs;

  std::size_t size() const { return epochs.size(); }
  bool empty() const { return epochs.empty(); }
};

}  // namespace idsgan
