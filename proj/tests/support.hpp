#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "idsgan/data.hpp"
#include "idsgan/gan.hpp"
#include "idsgan/metrics.hpp"
#include "idsgan/ops.hpp"
#include "idsgan/tensor.hpp"

namespace idsgan::testing {

inline Tensor random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0,
                            bool requires_grad = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(shape_size(shape));
  for (double& x : v) x = dist(rng);
  return Tensor(std::move(shape), std::move(v), requires_grad);
}

struct GradCheck {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  /// Coordinates whose +-eps probes changed a relu / leaky_relu sign; the
  /// central difference there is not a derivative, so they are not scored.
  std::size_t kinked = 0;
};

/// Compares tape gradients of loss() w.r.t. every element of `wrt` with
/// central differences. Relative error is |a - n| / max(|a|, |n|, floor).
inline GradCheck check_gradients(const std::function<Tensor()>& loss,
                                 const std::vector<Tensor>& wrt, double eps = 1e-3,
                                 double floor = 1e-6) {
  for (Tensor t : wrt) t.clear_grad();
  {
    Tape tape;
    Tensor value;
    {
      TapeScope scope(tape);
      value = loss();
    }
    tape.backward(value);
  }
  std::vector<bool> centre;
  {
    NoTapeScope no_tape;
    ops::ActivationPattern pattern;
    loss();
    centre = pattern.signs();
  }
  const auto probe = [&](bool& same) {
    ops::ActivationPattern pattern;
    const double v = loss().item();
    same = same && pattern.signs() == centre;
    return v;
  };
  GradCheck result;
  for (const Tensor& t : wrt) {
    Tensor handle = t;
    std::vector<double> analytic(handle.size(), 0.0);
    if (handle.has_grad()) analytic.assign(handle.grad().begin(), handle.grad().end());
    for (std::size_t i = 0; i < handle.size(); ++i) {
      const double saved = handle.values()[i];
      NoTapeScope no_tape;
      bool smooth = true;
      handle.values()[i] = saved + eps;
      const double up = probe(smooth);
      handle.values()[i] = saved - eps;
      const double down = probe(smooth);
      handle.values()[i] = saved;
      if (!smooth) {
        ++result.kinked;
        continue;
      }
      const double numeric = (up - down) / (2.0 * eps);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
      result.max_relative_error =
          std::max(result.max_relative_error, std::abs(analytic[i] - numeric) / denom);
      ++result.checked;
    }
  }
  return result;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("idsgan_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Two linearly separable classes: label 1 rows lie in [0.5 + margin/2, 1]^width,
/// label 0 rows in [0, 0.5 - margin/2]^width, so the feature sum separates them.
inline data::Dataset separable_toy(std::size_t rows, std::size_t width, std::uint64_t seed,
                                   double margin = 0.2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double span = 0.5 - margin / 2.0;
  data::Dataset d;
  d.width = width;
  d.class_names = {"0", "1"};
  for (std::size_t r = 0; r < rows; ++r) {
    const int label = static_cast<int>(r % 2);
    for (std::size_t c = 0; c < width; ++c) {
      const double u = unit(rng) * span;
      d.features.push_back(label == 1 ? 1.0 - u : u);
    }
    d.labels.push_back(label);
    d.provenance.push_back(data::Provenance::real);
    d.row_ids.push_back(r);
  }
  return d;
}

inline const std::vector<double>& single_point_target() {
  static const std::vector<double> point{0.2, 0.8, 0.5, 0.1, 0.9, 0.3, 0.7, 0.6};
  return point;
}

struct SinglePointRun {
  double linf = 0.0;          // |mean generated sample - target|_inf
  double late_fake_accuracy = 0.0;  // discriminator accuracy on fakes, last 50 epochs
  gan::GanBundle bundle;
};

/// Trains a GAN for 500 epochs on 64 copies of single_point_target().
inline SinglePointRun run_single_point_gan(std::uint64_t seed) {
  const auto& point = single_point_target();
  const std::size_t n = 64, len = point.size();
  std::vector<double> rows;
  for (std::size_t i = 0; i < n; ++i) rows.insert(rows.end(), point.begin(), point.end());
  gan::GanConfig config;
  config.epochs = 500;
  config.batch_size = 32;
  config.seed = seed;
  SinglePointRun run{0.0, 0.0, gan::train_gan(Tensor({n, len, 1}, std::move(rows)), config)};
  const std::size_t samples = 1000;
  const Tensor fake = gan::generate_synthetic(run.bundle, samples, seed + 17);
  for (std::size_t c = 0; c < len; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < samples; ++r) mean += fake.values()[r * len + c];
    mean /= static_cast<double>(samples);
    run.linf = std::max(run.linf, std::abs(mean - point[c]));
  }
  const auto& h = run.bundle.history;
  const std::size_t tail = std::min<std::size_t>(50, h.size());
  for (std::size_t i = h.size() - tail; i < h.size(); ++i) run.late_fake_accuracy += h[i].d_fake_accuracy;
  run.late_fake_accuracy /= static_cast<double>(tail);
  return run;
}

/// Largest deviation between the confusion-matrix metrics and a per-sample
/// counting oracle over `trials` random label/prediction vectors
/// (K in {2, 5}, N in [1, 200]).
inline double metrics_oracle_max_error(std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  const auto note = [&worst](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t k = trial % 2 == 0 ? 2 : 5;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
    std::uniform_int_distribution<int> label(0, static_cast<int>(k) - 1);
    std::vector<int> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = label(rng);
      // Bias toward correct predictions so metrics span a useful range.
      p[i] = std::bernoulli_distribution(0.6)(rng) ? y[i] : label(rng);
    }
    const metrics::ConfusionMatrix cm = metrics::confusion(y, p, k);
    const auto per = metrics::per_class(cm);

    double hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += y[i] == p[i] ? 1 : 0;
    note(metrics::accuracy(cm), hits / static_cast<double>(n));

    std::vector<double> op(k), orr(k), of(k), sup(k);
    for (std::size_t c = 0; c < k; ++c) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool truth = y[i] == static_cast<int>(c), pred = p[i] == static_cast<int>(c);
        tp += truth && pred ? 1 : 0;
        fp += !truth && pred ? 1 : 0;
        fn += truth && !pred ? 1 : 0;
      }
      op[c] = tp + fp > 0 ? tp / (tp + fp) : 0.0;
      orr[c] = tp + fn > 0 ? tp / (tp + fn) : 0.0;
      of[c] = op[c] + orr[c] > 0 ? 2 * op[c] * orr[c] / (op[c] + orr[c]) : 0.0;
      sup[c] = tp + fn;
      note(per[c].precision, op[c]);
      note(per[c].recall, orr[c]);
      note(per[c].f1, of[c]);
      note(static_cast<double>(per[c].support), sup[c]);
    }
    double mp = 0, mr = 0, mf = 0, wp = 0, wr = 0, wf = 0;
    for (std::size_t c = 0; c < k; ++c) {
      mp += op[c] / k;
      mr += orr[c] / k;
      mf += of[c] / k;
      wp += op[c] * sup[c] / n;
      wr += orr[c] * sup[c] / n;
      wf += of[c] * sup[c] / n;
    }
    const auto macro = metrics::aggregate(per, metrics::Average::macro);
    const auto weighted = metrics::aggregate(per, metrics::Average::weighted);
    note(macro.precision, mp);
    note(macro.recall, mr);
    note(macro.f1, mf);
    note(weighted.precision, wp);
    note(weighted.recall, wr);
    note(weighted.f1, wf);
  }
  return worst;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace idsgan::testing
