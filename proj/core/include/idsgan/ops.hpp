#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "idsgan/tensor.hpp"

// Differentiable tensor operations. Every op is a pure function of its inputs
// (plus an explicit seed for dropout). When a Tape is active on the calling
// thread and an input requires gradients, the op records its backward rule.
namespace idsgan::ops {

enum class ActivationKind { linear, relu, leaky_relu, sigmoid, tanh, softmax };

std::string_view to_string(ActivationKind kind);
ActivationKind activation_from_string(std::string_view name);

/// 1-D convolution with 'same' zero padding.
///
/// input is [L, C_in] or [B, L, C_in]; kernels are [C_out, C_in, k] with odd k.
/// The output has length ceil(L / stride). Padding on the left is (k - 1) / 2;
/// taps past the right edge read zero.
Tensor conv1d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              std::size_t stride = 1);

std::size_t conv1d_output_length(std::size_t length, std::size_t stride);

/// Affine map over the last axis: [..., d_in] x [d_in, d_out] + [d_out].
Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias);

Tensor relu(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double alpha);

/// Records which side of zero every relu / leaky_relu input fell on, for the
/// calling thread, while alive. Two evaluations with equal patterns stayed on
/// the same linear piece of every piecewise-linear activation.
class ActivationPattern {
 public:
  ActivationPattern();
  ~ActivationPattern();
  ActivationPattern(const ActivationPattern&) = delete;
  ActivationPattern& operator=(const ActivationPattern&) = delete;

  const std::vector<bool>& signs() const { return signs_; }

  /// Appends x's signs to the innermost live pattern, if any.
  static void note(const Tensor& x);

 private:
  std::vector<bool> signs_;
  ActivationPattern* previous_;
};
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
/// Dispatches on kind; softmax normalizes the last axis. Rejects non-finite input.
Tensor activation(ActivationKind kind, const Tensor& x, double alpha = 0.01);

/// Numerically stable softmax along `axis` (negative counts from the end).
Tensor softmax(const Tensor& logits, int axis = -1);

/// Mean over the length axis: [L, C] -> [C], [B, L, C] -> [B, C].
Tensor global_avg_pool1d(const Tensor& x);

/// Inverted dropout. Identity when !training or rate == 0.
Tensor dropout(const Tensor& x, double rate, bool training, std::uint64_t seed);

Tensor reshape(const Tensor& x, Shape shape);
/// [B, ...] -> [B, prod(...)].
Tensor flatten(const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// x * s where s is a single-element tensor.
Tensor scale(const Tensor& x, const Tensor& s);
Tensor square(const Tensor& x);
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

/// Batched a * b^T: [B, M, K] x [B, N, K] -> [B, M, N].
Tensor matmul_transposed(const Tensor& a, const Tensor& b);
/// Batched a * b: [B, M, N] x [B, N, K] -> [B, M, K].
Tensor matmul(const Tensor& a, const Tensor& b);

/// Additive alignment scores e[b,i,j] = sum_a w[a] * tanh(q[b,i,a] + v[b,j,a]).
/// q is [B, T_q, A], v is [B, T_v, A], w is [A].
Tensor additive_scores(const Tensor& q, const Tensor& v, const Tensor& w);

inline constexpr double kProbabilityEpsilon = 1e-7;

/// Mean binary log-loss over all elements; probabilities are clamped to
/// [eps, 1 - eps].
Tensor binary_cross_entropy(const Tensor& probs, const Tensor& targets,
                            double epsilon = kProbabilityEpsilon);

/// Mean over rows of -sum(target * log p) for [B, K] probabilities and one-hot
/// (or soft) targets.
Tensor categorical_cross_entropy(const Tensor& probs, const Tensor& targets,
                                 double epsilon = kProbabilityEpsilon);

/// One-hot [B, K] targets from class indices.
Tensor one_hot(std::span<const int> labels, std::size_t classes);

}  // namespace idsgan::ops
