#include "idsgan/attention.hpp"

#include "idsgan/errors.hpp"
#include "idsgan/ops.hpp"

namespace idsgan::nn {

std::string_view to_string(AttentionMode mode) {
  return mode == AttentionMode::additive ? "additive" : "scaled_dot";
}

AttentionMode attention_mode_from_string(std::string_view name) {
  if (name == "scaled_dot") return AttentionMode::scaled_dot;
  if (name == "additive") return AttentionMode::additive;
  throw UsageError("unknown attention mode '" + std::string(name) + "'");
}

AttentionResult attention(const Tensor& query, const Tensor& value, AttentionMode mode,
                          const AttentionParams& params) {
  const bool batched = query.rank() == 3;
  if (query.rank() != value.rank() || (query.rank() != 2 && query.rank() != 3)) {
    throw ShapeError("attention: query " + shape_string(query.shape()) + " and value " +
                     shape_string(value.shape()) + " must both be [T, d] or [B, T, d]");
  }
  const std::size_t d = query.shape().back();
  if (value.shape().back() != d) {
    throw ShapeError("attention: feature width mismatch " + std::to_string(d) + " vs " +
                     std::to_string(value.shape().back()));
  }
  if (batched && query.dim(0) != value.dim(0)) {
    throw ShapeError("attention: batch sizes differ");
  }
  const Tensor q = batched ? query : ops::reshape(query, {1, query.dim(0), d});
  const Tensor v = batched ? value : ops::reshape(value, {1, value.dim(0), d});

  Tensor scores;
  if (mode == AttentionMode::scaled_dot) {
    scores = ops::scale(ops::matmul_transposed(q, v), params.scale);
  } else {
    const Tensor no_bias = Tensor::zeros({params.value_kernel.dim(1)});
    const Tensor q_proj = ops::dense(q, params.query_kernel, params.bias);
    const Tensor v_proj = ops::dense(v, params.value_kernel, no_bias);
    scores = ops::additive_scores(q_proj, v_proj, params.score_kernel);
  }
  Tensor weights = ops::softmax(scores, -1);
  Tensor context = ops::matmul(weights, v);

  if (!batched) {
    const std::size_t tq = query.dim(0), tv = value.dim(0);
    return {ops::reshape(context, {tq, d}), ops::reshape(weights, {tq, tv}),
            ops::reshape(scores, {tq, tv})};
  }
  return {context, weights, scores};
}

}  // namespace idsgan::nn
