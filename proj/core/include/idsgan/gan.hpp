#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "idsgan/data.hpp"
#include "idsgan/model.hpp"
#include "idsgan/optim.hpp"

namespace idsgan::gan {

struct GanConfig {
  std::size_t noise_dim = 30;
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  double alpha = 0.01;
  AdamConfig generator_optimizer{.learning_rate = 0.002, .beta1 = 0.5};
  AdamConfig discriminator_optimizer{.learning_rate = 0.002, .beta1 = 0.5};
  std::uint64_t seed = 0;
};

struct GanEpochRecord {
  double d_loss = 0.0;
  double g_loss = 0.0;
  double d_real_accuracy = 0.0;  // real rows scored >= 0.5
  double d_fake_accuracy = 0.0;  // generated rows scored < 0.5
  double value = 0.0;            // empirical min-max objective on the epoch's batch
};

/// Generator, discriminator, and the per-epoch training record.
struct GanBundle {
  GanConfig config;
  std::size_t feature_len = 0;
  nn::Model generator;
  nn::Model discriminator;
  std::vector<GanEpochRecord> history;
};

/// noise[noise_dim] -> Dense(feature_len, leaky_relu) -> Reshape(feature_len, 1).
nn::Model build_generator(std::size_t noise_dim, std::size_t feature_len, double alpha,
                          std::uint64_t seed);

/// [L, 1] -> Conv1D(64, k3, stride 2, leaky_relu) -> Conv1D(32, k3, stride 2,
/// leaky_relu) -> Flatten -> Dense(1, sigmoid). Requires L >= 4.
nn::Model build_discriminator(std::size_t feature_len, double alpha, std::uint64_t seed);

/// mean(log D(x)) + mean(log(1 - D(G(z)))). Every probability must lie
/// strictly inside (0, 1); both lists must be non-empty.
double gan_value(std::span<const double> d_real, std::span<const double> d_fake);

/// Standard-normal noise, [n, noise_dim].
Tensor sample_noise(std::size_t n, std::size_t noise_dim, std::uint64_t seed);

/// Freshly initialised bundle with an empty history.
GanBundle make_gan(std::size_t feature_len, const GanConfig& config);

/// Alternating training on `real` ([N, L, 1], values expected in [0, 1]).
/// Each epoch makes one discriminator step on a real batch (target 1) plus a
/// generated batch (target 0), then one generator step through the frozen
/// discriminator with the non-saturating loss -log D(G(z)).
GanBundle train_gan(const Tensor& real, const GanConfig& config);

/// [n, L, 1] samples from the generator, clipped to [0, 1].
Tensor generate_synthetic(const GanBundle& bundle, std::size_t n, std::uint64_t seed);

/// Trains one GAN per class that has a positive count and real rows in
/// `train`. Each class uses a seed derived from config.seed and the label;
/// classes train concurrently when `parallel`.
std::map<int, GanBundle> train_per_class(const data::Dataset& train,
                                         const std::map<int, std::size_t>& counts,
                                         const GanConfig& config, bool parallel = true);

/// Draws counts[c] samples from each class's generator.
std::map<int, Tensor> synthesize_per_class(const std::map<int, GanBundle>& bundles,
                                           const std::map<int, std::size_t>& counts,
                                           std::uint64_t seed);

}  // namespace idsgan::gan
