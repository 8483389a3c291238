#include "idsgan/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "idsgan/errors.hpp"

namespace idsgan::ops {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

// Marks `out` as a gradient-carrying node and hands its backward rule to the
// active tape. Callers check should_record() first.
template <typename Fn>
void record(const char* name, Tensor& out, Fn&& fn) {
  out.set_requires_grad(true);
  Tape::active()->record(name, out, std::forward<Fn>(fn));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()) + " differ");
  }
}

void require_finite(const Tensor& x, const char* op) {
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw DomainError(std::string(op) + ": non-finite input");
  }
}

template <typename Forward, typename Derivative>
Tensor elementwise(const char* name, const Tensor& x, Forward f, Derivative df) {
  std::vector<double> out_values(x.size());
  const auto in = x.values();
  std::transform(in.begin(), in.end(), out_values.begin(), f);
  Tensor out(x.shape(), std::move(out_values));
  if (should_record({&x})) {
    record(name, out, [x, out, df]() mutable {
      auto gx = x.grad_buffer();
      const auto gy = out.grad();
      const auto xv = x.values();
      const auto yv = out.values();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * df(xv[i], yv[i]);
    });
  }
  return out;
}

double stable_sigmoid(double x) {
  static const double lo = std::numeric_limits<double>::min();
  static const double hi = std::nextafter(1.0, 0.0);
  double y;
  if (x >= 0.0) {
    y = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    y = e / (1.0 + e);
  }
  return std::clamp(y, lo, hi);
}

}  // namespace

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::linear: return "linear";
    case ActivationKind::relu: return "relu";
    case ActivationKind::leaky_relu: return "leaky_relu";
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::softmax: return "softmax";
  }
  return "linear";
}

ActivationKind activation_from_string(std::string_view name) {
  for (auto kind : {ActivationKind::linear, ActivationKind::relu, ActivationKind::leaky_relu,
                    ActivationKind::sigmoid, ActivationKind::tanh, ActivationKind::softmax}) {
    if (to_string(kind) == name) return kind;
  }
  throw UsageError("unknown activation '" + std::string(name) + "'");
}

std::size_t conv1d_output_length(std::size_t length, std::size_t stride) {
  if (stride == 0) throw UsageError("conv1d: stride must be >= 1");
  return (length + stride - 1) / stride;
}

Tensor conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              std::size_t stride) {
  const bool batched = input.rank() == 3;
  if (!batched && input.rank() != 2) {
    throw ShapeError("conv1d: input must be [L, C] or [B, L, C], got " +
                     shape_string(input.shape()));
  }
  if (kernels.rank() != 3) {
    throw ShapeError("conv1d: kernels must be [C_out, C_in, k], got " +
                     shape_string(kernels.shape()));
  }
  const std::size_t batch = batched ? input.dim(0) : 1;
  const std::size_t length = input.dim(batched ? 1 : 0);
  const std::size_t c_in = input.dim(batched ? 2 : 1);
  const std::size_t c_out = kernels.dim(0);
  const std::size_t k = kernels.dim(2);
  if (kernels.dim(1) != c_in) {
    throw ShapeError("conv1d: input has " + std::to_string(c_in) + " channels but kernels expect " +
                     std::to_string(kernels.dim(1)));
  }
  if (k % 2 == 0) throw UsageError("conv1d: 'same' padding needs an odd kernel size");
  if (bias.shape() != Shape{c_out}) {
    throw ShapeError("conv1d: bias must be [" + std::to_string(c_out) + "], got " +
                     shape_string(bias.shape()));
  }
  const std::size_t out_len = conv1d_output_length(length, stride);
  const std::size_t pad = (k - 1) / 2;
  const std::size_t taps = c_in * k;
  const std::size_t rows = batch * out_len;

  // im2col: row (b, t) holds the receptive field in [ci][j] order, matching
  // the kernel layout so the convolution is cols * kernels^T.
  auto cols = std::make_shared<std::vector<double>>(rows * taps, 0.0);
  const auto in = input.values();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < out_len; ++t) {
      double* row = cols->data() + (b * out_len + t) * taps;
      for (std::size_t j = 0; j < k; ++j) {
        const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t * stride + j) -
                                   static_cast<std::ptrdiff_t>(pad);
        if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(length)) continue;
        const double* src = in.data() + (b * length + static_cast<std::size_t>(pos)) * c_in;
        for (std::size_t ci = 0; ci < c_in; ++ci) row[ci * k + j] = src[ci];
      }
    }
  }

  std::vector<double> out_values(rows * c_out);
  {
    ConstMap col_m(cols->data(), rows, taps);
    ConstMap ker_m(kernels.values().data(), c_out, taps);
    MutMap out_m(out_values.data(), rows, c_out);
    out_m.noalias() = col_m * ker_m.transpose();
    Eigen::Map<const Eigen::RowVectorXd> b_v(bias.values().data(), c_out);
    out_m.rowwise() += b_v;
  }
  Shape out_shape = batched ? Shape{batch, out_len, c_out} : Shape{out_len, c_out};
  Tensor out(std::move(out_shape), std::move(out_values));

  if (should_record({&input, &kernels, &bias})) {
    record("conv1d", out,
           [input, kernels, bias, out, cols, batch, length, c_in, c_out, k, stride, pad,
            out_len, taps, rows]() mutable {
             ConstMap dy(out.grad().data(), rows, c_out);
             ConstMap col_m(cols->data(), rows, taps);
             if (kernels.requires_grad()) {
               MutMap dk(kernels.grad_buffer().data(), c_out, taps);
               dk.noalias() += dy.transpose() * col_m;
             }
             if (bias.requires_grad()) {
               Eigen::Map<Eigen::RowVectorXd> db(bias.grad_buffer().data(), c_out);
               db += dy.colwise().sum();
             }
             if (input.requires_grad()) {
               ConstMap ker_m(kernels.values().data(), c_out, taps);
               RowMatrix dcols = dy * ker_m;
               auto dx = input.grad_buffer();
               for (std::size_t b = 0; b < batch; ++b) {
                 for (std::size_t t = 0; t < out_len; ++t) {
                   const double* row = dcols.data() + (b * out_len + t) * taps;
                   for (std::size_t j = 0; j < k; ++j) {
                     const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t * stride + j) -
                                                static_cast<std::ptrdiff_t>(pad);
                     if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(length)) continue;
                     double* dst =
                         dx.data() + (b * length + static_cast<std::size_t>(pos)) * c_in;
                     for (std::size_t ci = 0; ci < c_in; ++ci) dst[ci] += row[ci * k + j];
                   }
                 }
               }
             }
           });
  }
  return out;
}

Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  if (weight.rank() != 2) {
    throw ShapeError("dense: weight must be [d_in, d_out], got " + shape_string(weight.shape()));
  }
  const std::size_t d_in = weight.dim(0);
  const std::size_t d_out = weight.dim(1);
  if (input.rank() == 0 || input.shape().back() != d_in) {
    throw ShapeError("dense: input " + shape_string(input.shape()) + " does not end in d_in=" +
                     std::to_string(d_in));
  }
  if (bias.shape() != Shape{d_out}) {
    throw ShapeError("dense: bias must be [" + std::to_string(d_out) + "], got " +
                     shape_string(bias.shape()));
  }
  const std::size_t rows = input.size() / d_in;
  std::vector<double> out_values(rows * d_out);
  {
    ConstMap x(input.values().data(), rows, d_in);
    ConstMap w(weight.values().data(), d_in, d_out);
    MutMap y(out_values.data(), rows, d_out);
    y.noalias() = x * w;
    Eigen::Map<const Eigen::RowVectorXd> b(bias.values().data(), d_out);
    y.rowwise() += b;
  }
  Shape out_shape = input.shape();
  out_shape.back() = d_out;
  Tensor out(std::move(out_shape), std::move(out_values));

  if (should_record({&input, &weight, &bias})) {
    record("dense", out, [input, weight, bias, out, rows, d_in, d_out]() mutable {
      ConstMap dy(out.grad().data(), rows, d_out);
      if (weight.requires_grad()) {
        ConstMap x(input.values().data(), rows, d_in);
        MutMap dw(weight.grad_buffer().data(), d_in, d_out);
        dw.noalias() += x.transpose() * dy;
      }
      if (bias.requires_grad()) {
        Eigen::Map<Eigen::RowVectorXd> db(bias.grad_buffer().data(), d_out);
        db += dy.colwise().sum();
      }
      if (input.requires_grad()) {
        ConstMap w(weight.values().data(), d_in, d_out);
        MutMap dx(input.grad_buffer().data(), rows, d_in);
        dx.noalias() += dy * w.transpose();
      }
    });
  }
  return out;
}

namespace {
thread_local ActivationPattern* active_pattern = nullptr;
}  // namespace

ActivationPattern::ActivationPattern() : previous_(active_pattern) { active_pattern = this; }

ActivationPattern::~ActivationPattern() { active_pattern = previous_; }

void ActivationPattern::note(const Tensor& x) {
  if (active_pattern == nullptr) return;
  for (double v : x.values()) active_pattern->signs_.push_back(v > 0.0);
}

Tensor relu(const Tensor& x) {
  ActivationPattern::note(x);
  return elementwise(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& x, double alpha) {
  ActivationPattern::note(x);
  return elementwise(
      "leaky_relu", x, [alpha](double v) { return v > 0.0 ? v : alpha * v; },
      [alpha](double v, double) { return v > 0.0 ? 1.0 : alpha; });
}

Tensor sigmoid(const Tensor& x) {
  return elementwise(
      "sigmoid", x, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
  return elementwise(
      "tanh", x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor activation(ActivationKind kind, const Tensor& x, double alpha) {
  require_finite(x, "activation");
  switch (kind) {
    case ActivationKind::linear: return x;
    case ActivationKind::relu: return relu(x);
    case ActivationKind::leaky_relu: return leaky_relu(x, alpha);
    case ActivationKind::sigmoid: return sigmoid(x);
    case ActivationKind::tanh: return tanh(x);
    case ActivationKind::softmax: return softmax(x, -1);
  }
  throw UsageError("unhandled activation kind");
}

Tensor softmax(const Tensor& logits, int axis) {
  const int rank = static_cast<int>(logits.rank());
  if (rank == 0) throw ShapeError("softmax: needs at least one axis");
  const int ax = axis < 0 ? axis + rank : axis;
  if (ax < 0 || ax >= rank) throw ShapeError("softmax: axis out of range");
  const auto& shape = logits.shape();
  const std::size_t n = shape[static_cast<std::size_t>(ax)];
  if (n == 0) throw ShapeError("softmax: empty axis");
  std::size_t outer = 1, inner = 1;
  for (int i = 0; i < ax; ++i) outer *= shape[static_cast<std::size_t>(i)];
  for (int i = ax + 1; i < rank; ++i) inner *= shape[static_cast<std::size_t>(i)];

  const auto x = logits.values();
  std::vector<double> y(x.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * n * inner + in;
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) peak = std::max(peak, x[base + j * inner]);
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double e = std::exp(x[base + j * inner] - peak);
        y[base + j * inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < n; ++j) y[base + j * inner] /= total;
    }
  }
  Tensor out(shape, std::move(y));
  if (should_record({&logits})) {
    record("softmax", out, [logits, out, outer, inner, n]() mutable {
      auto gx = logits.grad_buffer();
      const auto gy = out.grad();
      const auto yv = out.values();
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
          const std::size_t base = o * n * inner + in;
          double dot = 0.0;
          for (std::size_t j = 0; j < n; ++j) dot += gy[base + j * inner] * yv[base + j * inner];
          for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = base + j * inner;
            gx[idx] += yv[idx] * (gy[idx] - dot);
          }
        }
      }
    });
  }
  return out;
}

Tensor global_avg_pool1d(const Tensor& x) {
  const bool batched = x.rank() == 3;
  if (!batched && x.rank() != 2) {
    throw ShapeError("global_avg_pool1d: input must be [L, C] or [B, L, C], got " +
                     shape_string(x.shape()));
  }
  const std::size_t batch = batched ? x.dim(0) : 1;
  const std::size_t length = x.dim(batched ? 1 : 0);
  const std::size_t channels = x.dim(batched ? 2 : 1);
  if (length == 0) throw ShapeError("global_avg_pool1d: empty length axis");
  std::vector<double> y(batch * channels, 0.0);
  const auto xv = x.values();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < length; ++t) {
      const double* src = xv.data() + (b * length + t) * channels;
      double* dst = y.data() + b * channels;
      for (std::size_t c = 0; c < channels; ++c) dst[c] += src[c];
    }
  }
  const double inv = 1.0 / static_cast<double>(length);
  for (double& v : y) v *= inv;
  Tensor out(batched ? Shape{batch, channels} : Shape{channels}, std::move(y));
  if (should_record({&x})) {
    record("global_avg_pool1d", out, [x, out, batch, length, channels, inv]() mutable {
      auto gx = x.grad_buffer();
      const auto gy = out.grad();
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t t = 0; t < length; ++t) {
          double* dst = gx.data() + (b * length + t) * channels;
          const double* src = gy.data() + b * channels;
          for (std::size_t c = 0; c < channels; ++c) dst[c] += src[c] * inv;
        }
      }
    });
  }
  return out;
}

Tensor dropout(const Tensor& x, double rate, bool training, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw UsageError("dropout: rate must lie in [0, 1)");
  if (!training || rate == 0.0) return x;
  auto mask = std::make_shared<std::vector<double>>(x.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& m : *mask) m = uniform(rng) < rate ? 0.0 : keep_scale;
  std::vector<double> y(x.size());
  const auto xv = x.values();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xv[i] * (*mask)[i];
  Tensor out(x.shape(), std::move(y));
  if (should_record({&x})) {
    record("dropout", out, [x, out, mask]() mutable {
      auto gx = x.grad_buffer();
      const auto gy = out.grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * (*mask)[i];
    });
  }
  return out;
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw ShapeError("reshape: cannot view " + shape_string(x.shape()) + " as " +
                     shape_string(shape));
  }
  Tensor out(std::move(shape), x.vector());
  if (should_record({&x})) {
    record("reshape", out, [x, out]() mutable {
      auto gx = x.grad_buffer();
      const auto gy = out.grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
    });
  }
  return out;
}

Tensor flatten(const Tensor& x) {
  if (x.rank() < 1) throw ShapeError("flatten: needs a batch axis");
  const std::size_t batch = x.dim(0);
  const std::size_t width = batch == 0 ? shape_size(Shape(x.shape().begin() + 1, x.shape().end()))
                                       : x.size() / batch;
  return reshape(x, {batch, width});
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> y(a.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.values()[i] + b.values()[i];
  Tensor out(a.shape(), std::move(y));
  if (should_record({&a, &b})) {
    record("add", out, [a, b, out]() mutable {
      const auto gy = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad_buffer();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gy[i];
      }
      if (b.requires_grad()) {
        auto gb = b.grad_buffer();
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gy[i];
      }
    });
  }
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> y(a.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.values()[i] * b.values()[i];
  Tensor out(a.shape(), std::move(y));
  if (should_record({&a, &b})) {
    record("mul", out, [a, b, out]() mutable {
      const auto gy = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad_buffer();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gy[i] * b.values()[i];
      }
      if (b.requires_grad()) {
        auto gb = b.grad_buffer();
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gy[i] * a.values()[i];
      }
    });
  }
  return out;
}

Tensor scale(const Tensor& x, const Tensor& s) {
  if (s.size() != 1) throw ShapeError("scale: factor must hold one value");
  const double factor = s.values()[0];
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x.values()[i] * factor;
  Tensor out(x.shape(), std::move(y));
  if (should_record({&x, &s})) {
    record("scale", out, [x, s, out, factor]() mutable {
      const auto gy = out.grad();
      if (x.requires_grad()) {
        auto gx = x.grad_buffer();
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * factor;
      }
      if (s.requires_grad()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < gy.size(); ++i) acc += gy[i] * x.values()[i];
        s.grad_buffer()[0] += acc;
      }
    });
  }
  return out;
}

Tensor square(const Tensor& x) {
  return elementwise(
      "square", x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  Tensor out = Tensor::scalar(total);
  if (should_record({&x})) {
    record("sum", out, [x, out]() mutable {
      const double g = out.grad()[0];
      for (double& gx : x.grad_buffer()) gx += g;
    });
  }
  return out;
}

Tensor mean(const Tensor& x) {
  if (x.size() == 0) throw ShapeError("mean: empty tensor");
  const double n = static_cast<double>(x.size());
  double total = 0.0;
  for (double v : x.values()) total += v;
  Tensor out = Tensor::scalar(total / n);
  if (should_record({&x})) {
    record("mean", out, [x, out, n]() mutable {
      const double g = out.grad()[0] / n;
      for (double& gx : x.grad_buffer()) gx += g;
    });
  }
  return out;
}

Tensor matmul_transposed(const Tensor& a, const Tensor& b) {
  if (a.rank() != 3 || b.rank() != 3 || a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2)) {
    throw ShapeError("matmul_transposed: incompatible shapes " + shape_string(a.shape()) +
                     " and " + shape_string(b.shape()));
  }
  const std::size_t batch = a.dim(0), m = a.dim(1), n = b.dim(1), k = a.dim(2);
  std::vector<double> y(batch * m * n);
  for (std::size_t bi = 0; bi < batch; ++bi) {
    ConstMap am(a.values().data() + bi * m * k, m, k);
    ConstMap bm(b.values().data() + bi * n * k, n, k);
    MutMap ym(y.data() + bi * m * n, m, n);
    ym.noalias() = am * bm.transpose();
  }
  Tensor out({batch, m, n}, std::move(y));
  if (should_record({&a, &b})) {
    record("matmul_transposed", out, [a, b, out, batch, m, n, k]() mutable {
      for (std::size_t bi = 0; bi < batch; ++bi) {
        ConstMap dy(out.grad().data() + bi * m * n, m, n);
        if (a.requires_grad()) {
          ConstMap bm(b.values().data() + bi * n * k, n, k);
          MutMap da(a.grad_buffer().data() + bi * m * k, m, k);
          da.noalias() += dy * bm;
        }
        if (b.requires_grad()) {
          ConstMap am(a.values().data() + bi * m * k, m, k);
          MutMap db(b.grad_buffer().data() + bi * n * k, n, k);
          db.noalias() += dy.transpose() * am;
        }
      }
    });
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 3 || b.rank() != 3 || a.dim(0) != b.dim(0) || a.dim(2) != b.dim(1)) {
    throw ShapeError("matmul: incompatible shapes " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()));
  }
  const std::size_t batch = a.dim(0), m = a.dim(1), n = a.dim(2), k = b.dim(2);
  std::vector<double> y(batch * m * k);
  for (std::size_t bi = 0; bi < batch; ++bi) {
    ConstMap am(a.values().data() + bi * m * n, m, n);
    ConstMap bm(b.values().data() + bi * n * k, n, k);
    MutMap ym(y.data() + bi * m * k, m, k);
    ym.noalias() = am * bm;
  }
  Tensor out({batch, m, k}, std::move(y));
  if (should_record({&a, &b})) {
    record("matmul", out, [a, b, out, batch, m, n, k]() mutable {
      for (std::size_t bi = 0; bi < batch; ++bi) {
        ConstMap dy(out.grad().data() + bi * m * k, m, k);
        if (a.requires_grad()) {
          ConstMap bm(b.values().data() + bi * n * k, n, k);
          MutMap da(a.grad_buffer().data() + bi * m * n, m, n);
          da.noalias() += dy * bm.transpose();
        }
        if (b.requires_grad()) {
          ConstMap am(a.values().data() + bi * m * n, m, n);
          MutMap db(b.grad_buffer().data() + bi * n * k, n, k);
          db.noalias() += am.transpose() * dy;
        }
      }
    });
  }
  return out;
}

Tensor additive_scores(const Tensor& q, const Tensor& v, const Tensor& w) {
  if (q.rank() != 3 || v.rank() != 3 || q.dim(0) != v.dim(0) || q.dim(2) != v.dim(2) ||
      w.shape() != Shape{q.dim(2)}) {
    throw ShapeError("additive_scores: incompatible shapes " + shape_string(q.shape()) + ", " +
                     shape_string(v.shape()) + ", " + shape_string(w.shape()));
  }
  const std::size_t batch = q.dim(0), tq = q.dim(1), tv = v.dim(1), width = q.dim(2);
  auto hidden = std::make_shared<std::vector<double>>(batch * tq * tv * width);
  std::vector<double> y(batch * tq * tv, 0.0);
  const auto qv = q.values();
  const auto vv = v.values();
  const auto wv = w.values();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < tq; ++i) {
      for (std::size_t j = 0; j < tv; ++j) {
        double acc = 0.0;
        double* h = hidden->data() + ((b * tq + i) * tv + j) * width;
        for (std::size_t a = 0; a < width; ++a) {
          h[a] = std::tanh(qv[(b * tq + i) * width + a] + vv[(b * tv + j) * width + a]);
          acc += wv[a] * h[a];
        }
        y[(b * tq + i) * tv + j] = acc;
      }
    }
  }
  Tensor out({batch, tq, tv}, std::move(y));
  if (should_record({&q, &v, &w})) {
    record("additive_scores", out, [q, v, w, out, hidden, batch, tq, tv, width]() mutable {
      const auto gy = out.grad();
      const auto wv = w.values();
      std::span<double> gq, gv, gw;
      if (q.requires_grad()) gq = q.grad_buffer();
      if (v.requires_grad()) gv = v.grad_buffer();
      if (w.requires_grad()) gw = w.grad_buffer();
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t i = 0; i < tq; ++i) {
          for (std::size_t j = 0; j < tv; ++j) {
            const double g = gy[(b * tq + i) * tv + j];
            const double* h = hidden->data() + ((b * tq + i) * tv + j) * width;
            for (std::size_t a = 0; a < width; ++a) {
              if (!gw.empty()) gw[a] += g * h[a];
              const double dpre = g * wv[a] * (1.0 - h[a] * h[a]);
              if (!gq.empty()) gq[(b * tq + i) * width + a] += dpre;
              if (!gv.empty()) gv[(b * tv + j) * width + a] += dpre;
            }
          }
        }
      }
    });
  }
  return out;
}

Tensor binary_cross_entropy(const Tensor& probs, const Tensor& targets, double epsilon) {
  require_same_shape(probs, targets, "binary_cross_entropy");
  if (probs.size() == 0) throw ShapeError("binary_cross_entropy: empty batch");
  const double n = static_cast<double>(probs.size());
  const auto p = probs.values();
  const auto y = targets.values();
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pc = std::clamp(p[i], epsilon, 1.0 - epsilon);
    total -= y[i] * std::log(pc) + (1.0 - y[i]) * std::log(1.0 - pc);
  }
  Tensor out = Tensor::scalar(total / n);
  if (should_record({&probs})) {
    record("binary_cross_entropy", out, [probs, targets, out, n, epsilon]() mutable {
      const double g = out.grad()[0] / n;
      auto gp = probs.grad_buffer();
      const auto p = probs.values();
      const auto y = targets.values();
      for (std::size_t i = 0; i < gp.size(); ++i) {
        if (p[i] < epsilon || p[i] > 1.0 - epsilon) continue;
        gp[i] += g * (-(y[i] / p[i]) + (1.0 - y[i]) / (1.0 - p[i]));
      }
    });
  }
  return out;
}

Tensor categorical_cross_entropy(const Tensor& probs, const Tensor& targets, double epsilon) {
  require_same_shape(probs, targets, "categorical_cross_entropy");
  if (probs.rank() != 2 || probs.dim(0) == 0) {
    throw ShapeError("categorical_cross_entropy: expects non-empty [B, K], got " +
                     shape_string(probs.shape()));
  }
  const double rows = static_cast<double>(probs.dim(0));
  const auto p = probs.values();
  const auto y = targets.values();
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i] == 0.0) continue;
    total -= y[i] * std::log(std::clamp(p[i], epsilon, 1.0 - epsilon));
  }
  Tensor out = Tensor::scalar(total / rows);
  if (should_record({&probs})) {
    record("categorical_cross_entropy", out, [probs, targets, out, rows, epsilon]() mutable {
      const double g = out.grad()[0] / rows;
      auto gp = probs.grad_buffer();
      const auto p = probs.values();
      const auto y = targets.values();
      for (std::size_t i = 0; i < gp.size(); ++i) {
        if (y[i] == 0.0 || p[i] < epsilon || p[i] > 1.0 - epsilon) continue;
        gp[i] -= g * y[i] / p[i];
      }
    });
  }
  return out;
}

Tensor one_hot(std::span<const int> labels, std::size_t classes) {
  std::vector<double> values(labels.size() * classes, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
      throw DomainError("one_hot: label " + std::to_string(labels[i]) + " outside [0, " +
                        std::to_string(classes) + ")");
    }
    values[i * classes + static_cast<std::size_t>(labels[i])] = 1.0;
  }
  return Tensor({labels.size(), classes}, std::move(values));
}

}  // namespace idsgan::ops
