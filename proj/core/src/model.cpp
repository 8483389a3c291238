#include "idsgan/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "idsgan/errors.hpp"
#include "idsgan/random.hpp"

namespace idsgan::nn {

namespace {

constexpr std::pair<LayerKind, std::string_view> kLayerNames[] = {
    {LayerKind::input, "input"},
    {LayerKind::conv1d, "conv1d"},
    {LayerKind::global_avg_pool, "global_avg_pool"},
    {LayerKind::reshape, "reshape"},
    {LayerKind::attention, "attention"},
    {LayerKind::dense, "dense"},
    {LayerKind::dropout, "dropout"},
    {LayerKind::activation, "activation"},
    {LayerKind::flatten, "flatten"},
};

std::string layer_label(std::size_t index, const LayerSpec& spec) {
  return "layer " + std::to_string(index) + " (" + std::string(to_string(spec.kind)) + ")";
}

struct ParamShape {
  std::string name;
  Shape shape;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
};

// Output shape of one layer plus the parameters it owns.
Shape infer_layer(std::size_t index, const LayerSpec& spec, const Shape& in,
                  std::vector<ParamShape>& params) {
  const auto fail = [&](const std::string& why) {
    return ShapeError(layer_label(index, spec) + ": " + why + ", input " + shape_string(in));
  };
  switch (spec.kind) {
    case LayerKind::input:
      throw UsageError(layer_label(index, spec) + ": input layer must come first");
    case LayerKind::conv1d: {
      if (in.size() != 2) throw fail("expects [L, C]");
      if (spec.units == 0) throw UsageError(layer_label(index, spec) + ": zero filters");
      if (spec.kernel_size % 2 == 0) {
        throw UsageError(layer_label(index, spec) + ": kernel size must be odd");
      }
      const std::size_t c = in[1], k = spec.kernel_size;
      params.push_back({"kernel", {spec.units, c, k}, c * k, spec.units * k});
      params.push_back({"bias", {spec.units}});
      return {ops::conv1d_output_length(in[0], spec.stride), spec.units};
    }
    case LayerKind::global_avg_pool:
      if (in.size() != 2) throw fail("expects [L, C]");
      return {in[1]};
    case LayerKind::reshape:
      if (shape_size(spec.shape) != shape_size(in)) throw fail("cannot reshape to " +
                                                               shape_string(spec.shape));
      return spec.shape;
    case LayerKind::attention: {
      if (in.size() != 2) throw fail("expects [T, d]");
      const std::size_t d = in[1];
      if (spec.attention_mode == AttentionMode::scaled_dot) {
        params.push_back({"scale", {1}});
      } else {
        params.push_back({"query_kernel", {d, d}, d, d});
        params.push_back({"value_kernel", {d, d}, d, d});
        params.push_back({"bias", {d}});
        params.push_back({"score_kernel", {d}, d, 1});
      }
      return in;
    }
    case LayerKind::dense: {
      if (in.empty()) throw fail("expects a feature axis");
      if (spec.units == 0) throw UsageError(layer_label(index, spec) + ": zero units");
      const std::size_t d = in.back();
      params.push_back({"kernel", {d, spec.units}, d, spec.units});
      params.push_back({"bias", {spec.units}});
      Shape out = in;
      out.back() = spec.units;
      return out;
    }
    case LayerKind::dropout:
      if (!(spec.rate >= 0.0 && spec.rate < 1.0)) {
        throw UsageError(layer_label(index, spec) + ": rate must lie in [0, 1)");
      }
      return in;
    case LayerKind::activation:
      return in;
    case LayerKind::flatten:
      return {shape_size(in)};
  }
  throw UsageError("unhandled layer kind");
}

Shape with_batch(std::size_t batch, const Shape& shape) {
  Shape out{batch};
  out.insert(out.end(), shape.begin(), shape.end());
  return out;
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  for (const auto& [k, name] : kLayerNames) {
    if (k == kind) return name;
  }
  return "input";
}

LayerKind layer_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kLayerNames) {
    if (n == name) return k;
  }
  throw UsageError("unknown layer kind '" + std::string(name) + "'");
}

LayerSpec LayerSpec::make_input(Shape shape) {
  LayerSpec s;
  s.kind = LayerKind::input;
  s.shape = std::move(shape);
  return s;
}

LayerSpec LayerSpec::make_conv1d(std::size_t filters, std::size_t kernel_size, std::size_t stride,
                                 ops::ActivationKind activation, double alpha) {
  LayerSpec s;
  s.kind = LayerKind::conv1d;
  s.units = filters;
  s.kernel_size = kernel_size;
  s.stride = stride;
  s.activation = activation;
  s.alpha = alpha;
  return s;
}

LayerSpec LayerSpec::make_global_avg_pool() {
  LayerSpec s;
  s.kind = LayerKind::global_avg_pool;
  return s;
}

LayerSpec LayerSpec::make_reshape(Shape target) {
  LayerSpec s;
  s.kind = LayerKind::reshape;
  s.shape = std::move(target);
  return s;
}

LayerSpec LayerSpec::make_attention(AttentionMode mode) {
  LayerSpec s;
  s.kind = LayerKind::attention;
  s.attention_mode = mode;
  return s;
}

LayerSpec LayerSpec::make_dense(std::size_t units, ops::ActivationKind activation, double alpha) {
  LayerSpec s;
  s.kind = LayerKind::dense;
  s.units = units;
  s.activation = activation;
  s.alpha = alpha;
  return s;
}

LayerSpec LayerSpec::make_dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::make_activation(ops::ActivationKind activation, double alpha) {
  LayerSpec s;
  s.kind = LayerKind::activation;
  s.activation = activation;
  s.alpha = alpha;
  return s;
}

LayerSpec LayerSpec::make_flatten() {
  LayerSpec s;
  s.kind = LayerKind::flatten;
  return s;
}

void to_json(nlohmann::json& j, const LayerSpec& spec) {
  j = nlohmann::json{{"kind", to_string(spec.kind)},
                     {"shape", spec.shape},
                     {"units", spec.units},
                     {"kernel_size", spec.kernel_size},
                     {"stride", spec.stride},
                     {"rate", spec.rate},
                     {"activation", ops::to_string(spec.activation)},
                     {"alpha", spec.alpha},
                     {"attention_mode", to_string(spec.attention_mode)}};
}

void from_json(const nlohmann::json& j, LayerSpec& spec) {
  spec.kind = layer_kind_from_string(j.at("kind").get<std::string>());
  spec.shape = j.at("shape").get<Shape>();
  spec.units = j.at("units").get<std::size_t>();
  spec.kernel_size = j.at("kernel_size").get<std::size_t>();
  spec.stride = j.at("stride").get<std::size_t>();
  spec.rate = j.at("rate").get<double>();
  spec.activation = ops::activation_from_string(j.at("activation").get<std::string>());
  spec.alpha = j.at("alpha").get<double>();
  spec.attention_mode = attention_mode_from_string(j.at("attention_mode").get<std::string>());
}

Model::Model(std::vector<LayerSpec> layers, std::uint64_t init_seed) : layers_(std::move(layers)) {
  if (layers_.empty() || layers_.front().kind != LayerKind::input) {
    throw UsageError("model must start with an input layer");
  }
  const Shape& in = layers_.front().shape;
  if (in.empty() || std::any_of(in.begin(), in.end(), [](std::size_t e) { return e == 0; })) {
    throw UsageError("input shape must have positive extents, got " + shape_string(in));
  }
  shapes_.push_back(in);
  params_.emplace_back();
  std::vector<std::vector<ParamShape>> layouts(1);
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    std::vector<ParamShape> layout;
    shapes_.push_back(infer_layer(i, layers_[i], shapes_.back(), layout));
    layouts.push_back(std::move(layout));
  }
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    std::vector<std::pair<std::string, Tensor>> owned;
    for (const auto& p : layouts[i]) owned.emplace_back(p.name, Tensor::zeros(p.shape, true));
    params_.push_back(std::move(owned));
  }
  std::uint64_t ordinal = 0;
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    for (std::size_t p = 0; p < layouts[i].size(); ++p) {
      const ParamShape& layout = layouts[i][p];
      Tensor& t = params_[i][p].second;
      std::mt19937_64 rng(derive_seed(init_seed, ordinal++));
      if (layout.name == "scale") {
        std::fill(t.values().begin(), t.values().end(), 1.0);
      } else if (layout.fan_in + layout.fan_out > 0) {
        const double limit =
            std::sqrt(6.0 / static_cast<double>(layout.fan_in + layout.fan_out));
        std::uniform_real_distribution<double> uniform(-limit, limit);
        for (double& v : t.values()) v = uniform(rng);
      }
    }
  }
}

Model::Model(const Model& other)
    : layers_(other.layers_), shapes_(other.shapes_), params_(other.params_) {
  for (auto& layer : params_) {
    for (auto& [name, tensor] : layer) tensor = tensor.clone();
  }
}

Model& Model::operator=(const Model& other) {
  if (this != &other) {
    Model copy(other);
    *this = std::move(copy);
  }
  return *this;
}

ParamCount Model::param_count() const {
  ParamCount count;
  for (const auto& layer : params_) {
    std::size_t n = 0;
    for (const auto& [name, tensor] : layer) n += tensor.size();
    count.per_layer.push_back(n);
    count.total += n;
  }
  return count;
}

std::vector<NamedParameter> Model::named_parameters() const {
  std::vector<NamedParameter> out;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    for (const auto& [name, tensor] : params_[i]) out.push_back({i, name, tensor});
  }
  return out;
}

std::vector<Tensor> Model::parameters() const {
  std::vector<Tensor> out;
  for (const auto& layer : params_) {
    for (const auto& [name, tensor] : layer) out.push_back(tensor);
  }
  return out;
}

Tensor Model::parameter(std::size_t layer, std::string_view name) const {
  if (layer < params_.size()) {
    for (const auto& [n, tensor] : params_[layer]) {
      if (n == name) return tensor;
    }
  }
  throw UsageError("no parameter '" + std::string(name) + "' on layer " + std::to_string(layer));
}

void Model::set_parameter(std::size_t layer, std::string_view name, std::vector<double> values) {
  Tensor t = parameter(layer, name);
  if (values.size() != t.size()) {
    throw ShapeError("parameter '" + std::string(name) + "' on layer " + std::to_string(layer) +
                     " holds " + std::to_string(t.size()) + " values, got " +
                     std::to_string(values.size()));
  }
  std::copy(values.begin(), values.end(), t.values().begin());
}

void Model::zero_grad() {
  for (auto& layer : params_) {
    for (auto& [name, tensor] : layer) tensor.zero_grad();
  }
}

Tensor Model::apply_layer(std::size_t index, const Tensor& x, bool training,
                          std::uint64_t seed) const {
  const LayerSpec& spec = layers_[index];
  const auto& p = params_[index];
  const std::size_t batch = x.dim(0);
  switch (spec.kind) {
    case LayerKind::input:
      return x;
    case LayerKind::conv1d:
      return ops::activation(spec.activation,
                             ops::conv1d(x, p[0].second, p[1].second, spec.stride), spec.alpha);
    case LayerKind::global_avg_pool:
      return ops::global_avg_pool1d(x);
    case LayerKind::reshape:
      return ops::reshape(x, with_batch(batch, spec.shape));
    case LayerKind::attention: {
      AttentionParams ap;
      if (spec.attention_mode == AttentionMode::scaled_dot) {
        ap.scale = p[0].second;
      } else {
        ap.query_kernel = p[0].second;
        ap.value_kernel = p[1].second;
        ap.bias = p[2].second;
        ap.score_kernel = p[3].second;
      }
      return attention(x, x, spec.attention_mode, ap).context;
    }
    case LayerKind::dense:
      return ops::activation(spec.activation, ops::dense(x, p[0].second, p[1].second),
                             spec.alpha);
    case LayerKind::dropout:
      return ops::dropout(x, spec.rate, training, derive_seed(seed, index));
    case LayerKind::activation:
      return ops::activation(spec.activation, x, spec.alpha);
    case LayerKind::flatten:
      return ops::flatten(x);
  }
  throw UsageError("unhandled layer kind");
}

Tensor Model::apply(const Tensor& batch, bool training, std::uint64_t seed) const {
  const Shape& in = input_shape();
  const bool ok = batch.rank() == in.size() + 1 &&
                  std::equal(in.begin(), in.end(), batch.shape().begin() + 1);
  if (!ok) {
    throw ShapeError("model expects batches shaped [B, " +
                     shape_string(in).substr(1) + ", got " + shape_string(batch.shape()));
  }
  Tensor x = batch;
  for (std::size_t i = 1; i < layers_.size(); ++i) x = apply_layer(i, x, training, seed);
  return x;
}

Model build_cnn_attention(std::size_t input_len, std::size_t class_count, std::uint64_t seed,
                          const ClassifierOptions& options) {
  if (input_len < 3) throw UsageError("classifier input length must be >= 3");
  if (class_count < 1) throw UsageError("class count must be >= 1");
  using ops::ActivationKind;
  HeadKind head = options.head;
  if (head == HeadKind::automatic) head = class_count == 1 ? HeadKind::sigmoid : HeadKind::softmax;
  const ActivationKind head_activation =
      head == HeadKind::sigmoid ? ActivationKind::sigmoid : ActivationKind::softmax;

  std::vector<LayerSpec> layers{
      LayerSpec::make_input({input_len, 1}),
      LayerSpec::make_conv1d(32, 3, 1, ActivationKind::relu),
      LayerSpec::make_conv1d(64, 3, 1, ActivationKind::relu),
  };
  if (options.placement == AttentionPlacement::before_pool) {
    layers.push_back(LayerSpec::make_attention(options.attention_mode));
    layers.push_back(LayerSpec::make_global_avg_pool());
    layers.push_back(LayerSpec::make_reshape({1, 64}));
  } else {
    layers.push_back(LayerSpec::make_global_avg_pool());
    layers.push_back(LayerSpec::make_reshape({1, 64}));
    layers.push_back(LayerSpec::make_attention(options.attention_mode));
  }
  layers.push_back(LayerSpec::make_dense(128, ActivationKind::relu));
  layers.push_back(LayerSpec::make_dropout(0.5));
  layers.push_back(LayerSpec::make_dense(class_count, head_activation));
  return Model(std::move(layers), seed);
}

ParamCount count_params(const Model& model) { return model.param_count(); }

Tensor forward(const Model& model, const Tensor& batch, bool training, std::uint64_t seed) {
  Tensor out = model.apply(batch, training, seed);
  return ops::reshape(out, {out.dim(0), model.output_width()});
}

Tensor predict_proba(const Model& model, const Tensor& batch, std::size_t chunk) {
  NoTapeScope no_tape;
  const std::size_t rows = batch.rank() > 0 ? batch.dim(0) : 0;
  const std::size_t per_row = rows == 0 ? 0 : batch.size() / rows;
  const std::size_t width = model.output_width();
  std::vector<double> out;
  out.reserve(rows * width);
  Shape piece_shape = batch.shape();
  for (std::size_t start = 0; start < rows; start += chunk) {
    const std::size_t n = std::min(chunk, rows - start);
    piece_shape[0] = n;
    std::vector<double> piece(batch.values().begin() + static_cast<std::ptrdiff_t>(start * per_row),
                              batch.values().begin() +
                                  static_cast<std::ptrdiff_t>((start + n) * per_row));
    const Tensor probs = forward(model, Tensor(piece_shape, std::move(piece)), false, 0);
    out.insert(out.end(), probs.values().begin(), probs.values().end());
  }
  return Tensor({rows, width}, std::move(out));
}

std::vector<int> decide(const Tensor& probs) {
  if (probs.rank() != 2) throw ShapeError("decide: expects [B, K] probabilities");
  const std::size_t rows = probs.dim(0), width = probs.dim(1);
  std::vector<int> labels(rows);
  const auto p = probs.values();
  for (std::size_t i = 0; i < rows; ++i) {
    if (width == 1) {
      labels[i] = p[i] >= 0.5 ? 1 : 0;
      continue;
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < width; ++k) {
      if (p[i * width + k] > p[i * width + best]) best = k;
    }
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

std::vector<int> predict_classes(const Model& model, const Tensor& batch) {
  return decide(predict_proba(model, batch));
}

}  // namespace idsgan::nn
