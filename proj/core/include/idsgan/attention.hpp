#pragma once

#include <string_view>

#include "idsgan/tensor.hpp"

namespace idsgan::nn {

enum class AttentionMode {
  /// scores = scale * q . v, one learned scalar.
  scaled_dot,
  /// scores = w . tanh(q W_q + b + v W_v), a feedforward alignment model.
  additive,
};

std::string_view to_string(AttentionMode mode);
AttentionMode attention_mode_from_string(std::string_view name);

/// Learned attention parameters. scaled_dot uses only `scale`; additive uses
/// the remaining four.
struct AttentionParams {
  Tensor scale;          // [1]
  Tensor query_kernel;   // [d, d]
  Tensor value_kernel;   // [d, d]
  Tensor bias;           // [d]
  Tensor score_kernel;   // [d]
};

struct AttentionResult {
  Tensor context;  // [T_q, d] or [B, T_q, d]
  Tensor weights;  // [T_q, T_v] or [B, T_q, T_v]; rows are softmax distributions
  Tensor scores;   // pre-softmax alignment scores, same shape as weights
};

/// Context vectors as softmax-weighted sums of value rows. query and value are
/// [T, d] or batched [B, T, d] and must agree on d (and B).
AttentionResult attention(const Tensor& query, const Tensor& value, AttentionMode mode,
                          const AttentionParams& params);

}  // namespace idsgan::nn
