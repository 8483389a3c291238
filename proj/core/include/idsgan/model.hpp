#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "idsgan/attention.hpp"
#include "idsgan/ops.hpp"
#include "idsgan/tensor.hpp"

namespace idsgan::nn {

enum class LayerKind {
  input,
  conv1d,
  global_avg_pool,
  reshape,
  attention,
  dense,
  dropout,
  activation,
  flatten,
};

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

/// One row of a model summary. Only the fields relevant to `kind` are used.
struct LayerSpec {
  LayerKind kind = LayerKind::input;
  Shape shape;                  // input: per-sample shape; reshape: target shape
  std::size_t units = 0;        // dense units, conv1d filters
  std::size_t kernel_size = 0;  // conv1d
  std::size_t stride = 1;       // conv1d
  double rate = 0.0;            // dropout
  ops::ActivationKind activation = ops::ActivationKind::linear;
  double alpha = 0.01;          // leaky_relu slope
  AttentionMode attention_mode = AttentionMode::scaled_dot;

  static LayerSpec make_input(Shape shape);
  static LayerSpec make_conv1d(std::size_t filters, std::size_t kernel_size, std::size_t stride,
                               ops::ActivationKind activation, double alpha = 0.01);
  static LayerSpec make_global_avg_pool();
  static LayerSpec make_reshape(Shape target);
  static LayerSpec make_attention(AttentionMode mode = AttentionMode::scaled_dot);
  static LayerSpec make_dense(std::size_t units, ops::ActivationKind activation,
                              double alpha = 0.01);
  static LayerSpec make_dropout(double rate);
  static LayerSpec make_activation(ops::ActivationKind activation, double alpha = 0.01);
  static LayerSpec make_flatten();

  bool operator==(const LayerSpec&) const = default;
};

void to_json(nlohmann::json& j, const LayerSpec& spec);
void from_json(const nlohmann::json& j, LayerSpec& spec);

struct NamedParameter {
  std::size_t layer;
  std::string name;
  Tensor tensor;
};

struct ParamCount {
  std::vector<std::size_t> per_layer;
  std::size_t total = 0;
};

/// Ordered layer stack with its parameters.
///
/// Shapes exclude the batch axis. Copying a Model deep-copies its parameters.
class Model {
 public:
  /// Validates the stack, infers every layer's output shape, and initialises
  /// parameters: Glorot-uniform kernels, zero biases, unit attention scale.
  Model(std::vector<LayerSpec> layers, std::uint64_t init_seed);

  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const std::vector<LayerSpec>& layers() const { return layers_; }
  const std::vector<Shape>& output_shapes() const { return shapes_; }
  const Shape& input_shape() const { return shapes_.front(); }
  const Shape& output_shape() const { return shapes_.back(); }
  /// Width of the flattened per-sample output (1 for a sigmoid head).
  std::size_t output_width() const { return shape_size(output_shape()); }

  ParamCount param_count() const;
  std::vector<NamedParameter> named_parameters() const;
  std::vector<Tensor> parameters() const;
  Tensor parameter(std::size_t layer, std::string_view name) const;
  /// Replaces a parameter's values (shape must match).
  void set_parameter(std::size_t layer, std::string_view name, std::vector<double> values);
  void zero_grad();

  /// Runs the stack on a batch [B, input_shape...]. Dropout draws per-layer
  /// streams derived from `seed` and is active only when `training`.
  Tensor apply(const Tensor& batch, bool training, std::uint64_t seed) const;

 private:
  Tensor apply_layer(std::size_t index, const Tensor& x, bool training,
                     std::uint64_t seed) const;
  void initialise(std::uint64_t seed);

  std::vector<LayerSpec> layers_;
  std::vector<Shape> shapes_;
  std::vector<std::vector<std::pair<std::string, Tensor>>> params_;
};

/// Architecture switches for the CNN-attention classifier.
enum class HeadKind { automatic, sigmoid, softmax };
enum class AttentionPlacement { after_pool, before_pool };

struct ClassifierOptions {
  HeadKind head = HeadKind::automatic;
  AttentionMode attention_mode = AttentionMode::scaled_dot;
  AttentionPlacement placement = AttentionPlacement::after_pool;
};

/// Input -> Conv1D(32, k3, relu) -> Conv1D(64, k3, relu) -> GlobalAvgPool ->
/// Reshape(1, 64) -> Attention -> Dense(128, relu) -> Dropout(0.5) ->
/// Dense(class_count). The head is sigmoid for one output unit and softmax
/// otherwise unless `options.head` says so.
Model build_cnn_attention(std::size_t input_len, std::size_t class_count, std::uint64_t seed,
                          const ClassifierOptions& options = {});

ParamCount count_params(const Model& model);

/// Forward pass flattened to [B, output_width].
Tensor forward(const Model& model, const Tensor& batch, bool training, std::uint64_t seed);

/// Inference-mode probabilities in chunks of `chunk` rows: [B, output_width].
Tensor predict_proba(const Model& model, const Tensor& batch, std::size_t chunk = 1024);

/// Decision rule: single-unit heads predict 1 iff p >= 0.5; wider heads take
/// the argmax, ties going to the lowest index.
std::vector<int> decide(const Tensor& probs);
std::vector<int> predict_classes(const Model& model, const Tensor& batch);

}  // namespace idsgan::nn
