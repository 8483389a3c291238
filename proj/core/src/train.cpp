#include "idsgan/train.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "idsgan/errors.hpp"
#include "idsgan/ops.hpp"
#include "idsgan/random.hpp"

namespace idsgan::nn {

namespace {

LossKind resolve_loss(const Model& model, LossKind kind) {
  if (kind != LossKind::automatic) return kind;
  return model.layers().back().activation == ops::ActivationKind::softmax
             ? LossKind::categorical_ce
             : LossKind::binary_ce;
}

void check_compatible(const Model& model, const data::Dataset& dataset, const char* what) {
  if (model.input_shape() != Shape{dataset.width, 1}) {
    throw ShapeError(std::string(what) + ": model expects input " +
                     shape_string(model.input_shape()) + " but rows have width " +
                     std::to_string(dataset.width));
  }
  const std::size_t width = model.output_width();
  const std::size_t needed = width == 1 ? 2 : width;
  if (dataset.class_count() > needed) {
    throw ShapeError(std::string(what) + ": " + std::to_string(dataset.class_count()) +
                     " classes do not fit a head of width " + std::to_string(width));
  }
}

std::size_t count_correct(const Tensor& probs, std::span<const int> labels) {
  const auto predicted = decide(probs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predicted[i] == labels[i];
  return correct;
}

}  // namespace

Tensor classification_loss(const Model& model, const Tensor& probs, std::span<const int> labels,
                           LossKind kind) {
  const std::size_t width = model.output_width();
  Tensor targets;
  if (width == 1) {
    std::vector<double> t(labels.begin(), labels.end());
    targets = Tensor({labels.size(), 1}, std::move(t));
  } else {
    targets = ops::one_hot(labels, width);
  }
  return resolve_loss(model, kind) == LossKind::categorical_ce
             ? ops::categorical_cross_entropy(probs, targets)
             : ops::binary_cross_entropy(probs, targets);
}

LossAccuracy evaluate(const Model& model, const data::Dataset& dataset, LossKind kind,
                      std::size_t chunk) {
  if (dataset.rows() == 0) throw UsageError("evaluate: empty dataset");
  check_compatible(model, dataset, "evaluate");
  NoTapeScope no_tape;
  const Tensor probs = predict_proba(model, dataset.as_tensor(), chunk);
  LossAccuracy out;
  out.loss = classification_loss(model, probs, dataset.labels, kind).item();
  out.accuracy = static_cast<double>(count_correct(probs, dataset.labels)) /
                 static_cast<double>(dataset.rows());
  return out;
}

TrainHistory train_classifier(Model& model, const data::Dataset& train, const data::Dataset& val,
                              const TrainConfig& config) {
  if (train.rows() == 0) throw UsageError("train_classifier: empty training set");
  if (val.rows() == 0) throw UsageError("train_classifier: empty validation set");
  if (config.batch_size == 0) throw UsageError("train_classifier: batch size must be >= 1");
  check_compatible(model, train, "train_classifier");
  check_compatible(model, val, "train_classifier");

  TrainHistory history;
  if (config.epochs == 0) return history;
  const LossKind kind = resolve_loss(model, config.loss);
  if (config.measure_initial_loss) history.initial_train_loss = evaluate(model, train, kind).loss;

  std::vector<Tensor> params = model.parameters();
  AdamState state;
  std::vector<std::size_t> order(train.rows());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  std::vector<int> batch_labels;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const std::uint64_t epoch_seed = derive_seed(config.seed, epoch);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t step = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++step) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      batch_labels.clear();
      for (std::size_t i : idx) batch_labels.push_back(train.labels[i]);

      Tape tape;
      Tensor probs, loss;
      {
        TapeScope scope(tape);
        probs = forward(model, train.batch(idx), true, derive_seed(epoch_seed, step));
        loss = classification_loss(model, probs, batch_labels, kind);
      }
      model.zero_grad();
      tape.backward(loss);
      adam_step(params, state, config.optimizer);

      loss_sum += loss.item() * static_cast<double>(idx.size());
      correct += count_correct(probs, batch_labels);
    }
    EpochRecord record;
    record.train_loss = loss_sum / static_cast<double>(train.rows());
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.rows());
    const LossAccuracy v = evaluate(model, val, kind);
    record.val_loss = v.loss;
    record.val_accuracy = v.accuracy;
    history.epochs.push_back(record);
  }
  return history;
}

}  // namespace idsgan::nn
