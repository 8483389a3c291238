#include <gtest/gtest.h>

#include <cmath>

#include "idsgan/errors.hpp"
#include "idsgan/model.hpp"
#include "idsgan/train.hpp"
#include "support.hpp"

namespace idsgan::nn {
namespace {

using idsgan::testing::separable_toy;

TrainConfig toy_config(std::uint64_t seed) {
  TrainConfig c;
  c.epochs = 10;
  c.batch_size = 32;
  c.seed = seed;
  return c;
}

std::vector<std::vector<double>> snapshot(const Model& m) {
  std::vector<std::vector<double>> out;
  for (const Tensor& t : m.parameters()) out.push_back(t.vector());
  return out;
}

TEST(SeparableToy, LinearOracleIsPerfect) {
  const auto d = separable_toy(200, 8, 3);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    double sum = 0.0;
    for (double v : d.row(i)) sum += v;
    correct += static_cast<std::size_t>((sum > 4.0) == (d.labels[i] == 1));
  }
  EXPECT_EQ(correct, d.rows());
}

TEST(Train, ZeroEpochsLeavesModelUntouched) {
  const auto d = separable_toy(40, 8, 1);
  Model m = build_cnn_attention(8, 1, 2);
  const auto before = snapshot(m);
  TrainConfig c = toy_config(0);
  c.epochs = 0;
  const TrainHistory h = train_classifier(m, d, d, c);
  EXPECT_TRUE(h.empty());
  EXPECT_EQ(snapshot(m), before);
}

TEST(Train, EmptyDatasetIsUsageError) {
  data::Dataset empty;
  empty.width = 8;
  empty.class_names = {"0", "1"};
  Model m = build_cnn_attention(8, 1, 2);
  EXPECT_THROW(train_classifier(m, empty, empty, toy_config(0)), UsageError);
}

TEST(Train, WidthMismatchIsShapeError) {
  const auto d = separable_toy(40, 8, 1);
  Model m = build_cnn_attention(9, 1, 2);
  EXPECT_THROW(train_classifier(m, d, d, toy_config(0)), ShapeError);
}

TEST(Train, SeparableToyReachesHighAccuracy) {
  const auto d = separable_toy(200, 8, 5);
  Model m = build_cnn_attention(8, 1, 6);
  const TrainHistory h = train_classifier(m, d, d, toy_config(7));
  ASSERT_EQ(h.size(), 10u);
  EXPECT_GE(h.epochs.back().train_accuracy, 0.95);
  for (const EpochRecord& e : h.epochs) {
    EXPECT_TRUE(std::isfinite(e.train_loss));
    EXPECT_TRUE(std::isfinite(e.val_loss));
    EXPECT_GE(e.train_accuracy, 0.0);
    EXPECT_LE(e.train_accuracy, 1.0);
    EXPECT_GE(e.val_accuracy, 0.0);
    EXPECT_LE(e.val_accuracy, 1.0);
  }
}

TEST(Train, IdenticalSeedsGiveIdenticalParameters) {
  const auto d = separable_toy(100, 8, 5);
  Model a = build_cnn_attention(8, 1, 6);
  Model b = build_cnn_attention(8, 1, 6);
  TrainConfig c = toy_config(9);
  c.epochs = 3;
  const TrainHistory ha = train_classifier(a, d, d, c);
  const TrainHistory hb = train_classifier(b, d, d, c);
  EXPECT_EQ(snapshot(a), snapshot(b));
  for (std::size_t i = 0; i < ha.size(); ++i) {
    EXPECT_EQ(ha.epochs[i].train_loss, hb.epochs[i].train_loss);
  }
}

TEST(Train, LossMostlyNonIncreasingAcrossSeeds) {
  const auto d = separable_toy(200, 8, 5);
  int monotone = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Model m = build_cnn_attention(8, 1, 100 + seed);
    const TrainHistory h = train_classifier(m, d, d, toy_config(seed));
    bool ok = h.epochs.front().train_loss <= h.initial_train_loss;
    for (std::size_t i = 1; i < h.size(); ++i) {
      ok = ok && h.epochs[i].train_loss <= h.epochs[i - 1].train_loss;
    }
    monotone += ok ? 1 : 0;
  }
  EXPECT_GE(monotone, 4);
}

TEST(Train, FinalShortBatchIsUsed) {
  // 33 rows with batch 32: the single leftover row must still move the weights.
  const auto d = separable_toy(33, 8, 5);
  Model full = build_cnn_attention(8, 1, 6);
  TrainConfig c = toy_config(1);
  c.epochs = 1;
  train_classifier(full, d, d, c);
  Model truncated = build_cnn_attention(8, 1, 6);
  const auto d32 = separable_toy(32, 8, 5);
  train_classifier(truncated, d32, d32, c);
  EXPECT_NE(snapshot(full), snapshot(truncated));
}

TEST(Train, MulticlassUsesCategoricalLoss) {
  auto d = separable_toy(60, 8, 5);
  d.class_names = {"a", "b", "c"};
  for (std::size_t i = 0; i < d.rows(); ++i) d.labels[i] = static_cast<int>(i % 3);
  Model m = build_cnn_attention(8, 3, 6);
  TrainConfig c = toy_config(1);
  c.epochs = 2;
  const TrainHistory h = train_classifier(m, d, d, c);
  EXPECT_EQ(h.size(), 2u);
  // Uniform three-way prediction starts near ln 3.
  EXPECT_NEAR(h.initial_train_loss, std::log(3.0), 0.3);
}

}  // namespace
}  // namespace idsgan::nn
