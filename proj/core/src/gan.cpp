#include "idsgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>

#include "idsgan/errors.hpp"
#include "idsgan/ops.hpp"
#include "idsgan/random.hpp"

namespace idsgan::gan {

namespace {

// Seed streams inside one GAN run.
constexpr std::uint64_t kGeneratorInit = 1;
constexpr std::uint64_t kDiscriminatorInit = 2;
constexpr std::uint64_t kBatchSampling = 3;
constexpr std::uint64_t kNoiseBase = 1000;

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> idx) {
  const std::size_t per_row = x.size() / x.dim(0);
  std::vector<double> values;
  values.reserve(idx.size() * per_row);
  for (std::size_t i : idx) {
    const auto begin = x.values().begin() + static_cast<std::ptrdiff_t>(i * per_row);
    values.insert(values.end(), begin, begin + static_cast<std::ptrdiff_t>(per_row));
  }
  Shape shape = x.shape();
  shape[0] = idx.size();
  return Tensor(std::move(shape), std::move(values));
}

Tensor stack(const Tensor& a, const Tensor& b) {
  std::vector<double> values(a.values().begin(), a.values().end());
  values.insert(values.end(), b.values().begin(), b.values().end());
  Shape shape = a.shape();
  shape[0] += b.dim(0);
  return Tensor(std::move(shape), std::move(values));
}

double fraction(std::span<const double> probs, bool above) {
  std::size_t hits = 0;
  for (double p : probs) hits += above ? (p >= 0.5) : (p < 0.5);
  return static_cast<double>(hits) / static_cast<double>(probs.size());
}

}  // namespace

nn::Model build_generator(std::size_t noise_dim, std::size_t feature_len, double alpha,
                          std::uint64_t seed) {
  if (noise_dim == 0) throw UsageError("generator noise_dim must be >= 1");
  if (feature_len == 0) throw UsageError("generator feature_len must be >= 1");
  using nn::LayerSpec;
  return nn::Model({LayerSpec::make_input({noise_dim}),
                    LayerSpec::make_dense(feature_len, ops::ActivationKind::leaky_relu, alpha),
                    LayerSpec::make_reshape({feature_len, 1})},
                   seed);
}

nn::Model build_discriminator(std::size_t feature_len, double alpha, std::uint64_t seed) {
  if (feature_len < 4) throw UsageError("discriminator feature_len must be >= 4");
  using nn::LayerSpec;
  using ops::ActivationKind;
  return nn::Model({LayerSpec::make_input({feature_len, 1}),
                    LayerSpec::make_conv1d(64, 3, 2, ActivationKind::leaky_relu, alpha),
                    LayerSpec::make_conv1d(32, 3, 2, ActivationKind::leaky_relu, alpha),
                    LayerSpec::make_flatten(),
                    LayerSpec::make_dense(1, ActivationKind::sigmoid)},
                   seed);
}

double gan_value(std::span<const double> d_real, std::span<const double> d_fake) {
  if (d_real.empty() || d_fake.empty()) throw UsageError("gan_value: empty probability list");
  const auto check = [](double p) {
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("gan_value: probability " + std::to_string(p) + " outside (0, 1)");
    }
  };
  double real_term = 0.0, fake_term = 0.0;
  for (double p : d_real) {
    check(p);
    real_term += std::log(p);
  }
  for (double p : d_fake) {
    check(p);
    fake_term += std::log1p(-p);
  }
  return real_term / static_cast<double>(d_real.size()) +
         fake_term / static_cast<double>(d_fake.size());
}

Tensor sample_noise(std::size_t n, std::size_t noise_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(n * noise_dim);
  for (double& v : values) v = normal(rng);
  return Tensor({n, noise_dim}, std::move(values));
}

GanBundle make_gan(std::size_t feature_len, const GanConfig& config) {
  return GanBundle{
      config,
      feature_len,
      build_generator(config.noise_dim, feature_len, config.alpha,
                      derive_seed(config.seed, kGeneratorInit)),
      build_discriminator(feature_len, config.alpha, derive_seed(config.seed, kDiscriminatorInit)),
      {},
  };
}

GanBundle train_gan(const Tensor& real, const GanConfig& config) {
  if (real.rank() != 3 || real.dim(2) != 1) {
    throw ShapeError("train_gan: real data must be [N, L, 1], got " + shape_string(real.shape()));
  }
  if (real.dim(0) == 0) throw UsageError("train_gan: empty real dataset");
  if (config.batch_size == 0) throw UsageError("train_gan: batch size must be >= 1");
  const std::size_t n = real.dim(0);
  GanBundle bundle = make_gan(real.dim(1), config);
  if (config.epochs == 0) return bundle;

  const std::vector<Tensor> d_params = bundle.discriminator.parameters();
  const std::vector<Tensor> g_params = bundle.generator.parameters();
  std::vector<Tensor> d_step(d_params), g_step(g_params);
  AdamState d_state, g_state;
  std::mt19937_64 rng(derive_seed(config.seed, kBatchSampling));
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  const std::size_t batch = std::min(config.batch_size, n);

  std::vector<double> targets(2 * batch, 0.0);
  std::fill(targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(batch), 1.0);
  const Tensor d_targets({2 * batch, 1}, targets);
  const Tensor g_targets = Tensor::filled({batch, 1}, 1.0);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    // Partial Fisher-Yates: the first `batch` entries become this epoch's rows.
    for (std::size_t i = 0; i < batch; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    const Tensor real_batch = gather_rows(real, std::span(pool.data(), batch));
    const std::uint64_t noise_seed = derive_seed(config.seed, kNoiseBase + 2 * epoch);

    Tensor fake;
    {
      NoTapeScope no_tape;
      fake = bundle.generator.apply(sample_noise(batch, config.noise_dim, noise_seed), false, 0);
    }

    GanEpochRecord record;
    {
      Tape tape;
      Tensor probs, loss;
      {
        TapeScope scope(tape);
        probs = nn::forward(bundle.discriminator, stack(real_batch, fake), true, 0);
        loss = ops::binary_cross_entropy(probs, d_targets);
      }
      bundle.discriminator.zero_grad();
      tape.backward(loss);
      adam_step(d_step, d_state, config.discriminator_optimizer);

      const auto p = probs.values();
      const auto real_p = p.subspan(0, batch);
      const auto fake_p = p.subspan(batch, batch);
      record.d_loss = loss.item();
      record.d_real_accuracy = fraction(real_p, true);
      record.d_fake_accuracy = fraction(fake_p, false);
      record.value = gan_value(real_p, fake_p);
    }
    {
      Tape tape;
      Tensor loss;
      {
        TapeScope scope(tape);
        const Tensor z = sample_noise(batch, config.noise_dim, noise_seed + 1);
        const Tensor generated = bundle.generator.apply(z, true, 0);
        const Tensor probs = nn::forward(bundle.discriminator, generated, true, 0);
        loss = ops::binary_cross_entropy(probs, g_targets);
      }
      bundle.generator.zero_grad();
      tape.backward(loss);
      adam_step(g_step, g_state, config.generator_optimizer);
      bundle.discriminator.zero_grad();
      record.g_loss = loss.item();
    }
    bundle.history.push_back(record);
  }
  return bundle;
}

Tensor generate_synthetic(const GanBundle& bundle, std::size_t n, std::uint64_t seed) {
  const std::size_t len = bundle.feature_len;
  if (n == 0) return Tensor({0, len, 1}, {});
  NoTapeScope no_tape;
  Tensor out =
      bundle.generator.apply(sample_noise(n, bundle.config.noise_dim, seed), false, 0).clone();
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out.reshaped({n, len, 1});
}

std::map<int, GanBundle> train_per_class(const data::Dataset& train,
                                         const std::map<int, std::size_t>& counts,
                                         const GanConfig& config, bool parallel) {
  std::map<int, std::future<GanBundle>> pending;
  for (const auto& [label, count] : counts) {
    if (count == 0) continue;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < train.rows(); ++i) {
      if (train.labels[i] == label && train.provenance[i] == data::Provenance::real) {
        rows.push_back(i);
      }
    }
    if (rows.empty()) continue;
    GanConfig class_config = config;
    class_config.seed = derive_seed(config.seed, static_cast<std::uint64_t>(label));
    Tensor real = train.batch(rows);
    pending[label] = std::async(parallel ? std::launch::async : std::launch::deferred,
                                [real = std::move(real), class_config] {
                                  return train_gan(real, class_config);
                                });
  }
  std::map<int, GanBundle> bundles;
  for (auto& [label, future] : pending) bundles.emplace(label, future.get());
  return bundles;
}

std::map<int, Tensor> synthesize_per_class(const std::map<int, GanBundle>& bundles,
                                           const std::map<int, std::size_t>& counts,
                                           std::uint64_t seed) {
  std::map<int, Tensor> out;
  for (const auto& [label, count] : counts) {
    if (count == 0) continue;
    const auto it = bundles.find(label);
    if (it == bundles.end()) continue;
    out.emplace(label, generate_synthetic(it->second, count,
                                          derive_seed(seed, static_cast<std::uint64_t>(label))));
  }
  return out;
}

}  // namespace idsgan::gan
