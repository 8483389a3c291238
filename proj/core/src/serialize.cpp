#include "idsgan/serialize.hpp"

#include "idsgan/errors.hpp"

namespace idsgan::ckpt {

using nlohmann::json;

namespace {

const json& meta(const Archive& archive, const std::string& key) {
  const auto it = archive.header.find(key);
  if (it == archive.header.end()) throw CheckpointError("checkpoint has no entry '" + key + "'");
  return *it;
}

template <typename F>
auto guarded(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint entry '" + key + "' is malformed: " + e.what());
  }
}

std::string param_key(const std::string& key, std::size_t layer, const std::string& name) {
  return key + "/" + std::to_string(layer) + "/" + name;
}

}  // namespace

json to_json(const AdamConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"epsilon", c.epsilon}};
}

AdamConfig adam_from_json(const json& j) {
  AdamConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  return c;
}

json to_json(const gan::GanConfig& c) {
  return json{{"noise_dim", c.noise_dim},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"alpha", c.alpha},
              {"generator_optimizer", to_json(c.generator_optimizer)},
              {"discriminator_optimizer", to_json(c.discriminator_optimizer)},
              {"seed", c.seed}};
}

gan::GanConfig gan_config_from_json(const json& j) {
  gan::GanConfig c;
  c.noise_dim = j.value("noise_dim", c.noise_dim);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("generator_optimizer")) {
    c.generator_optimizer = adam_from_json(j.at("generator_optimizer"));
  }
  if (j.contains("discriminator_optimizer")) {
    c.discriminator_optimizer = adam_from_json(j.at("discriminator_optimizer"));
  }
  c.seed = j.value("seed", c.seed);
  return c;
}

void put_model(Archive& archive, const std::string& key, const nn::Model& model) {
  json params = json::array();
  for (const nn::NamedParameter& p : model.named_parameters()) {
    params.push_back({{"layer", p.layer}, {"name", p.name}, {"shape", p.tensor.shape()}});
    archive.put(param_key(key, p.layer, p.name), p.tensor.values());
  }
  archive.header[key] = {{"layers", model.layers()}, {"parameters", params}};
}

nn::Model get_model(const Archive& archive, const std::string& key) {
  const json& m = meta(archive, key);
  return guarded(key, [&] {
    nn::Model model(m.at("layers").get<std::vector<nn::LayerSpec>>(), 0);
    const auto expected = model.named_parameters();
    const json& params = m.at("parameters");
    if (params.size() != expected.size()) {
      throw CheckpointError("checkpoint model '" + key + "' has " +
                            std::to_string(params.size()) + " parameters, architecture needs " +
                            std::to_string(expected.size()));
    }
    for (const json& p : params) {
      const auto layer = p.at("layer").get<std::size_t>();
      const auto name = p.at("name").get<std::string>();
      const auto& values = archive.real(param_key(key, layer, name));
      if (values.size() != model.parameter(layer, name).size()) {
        throw CheckpointError("checkpoint parameter '" + param_key(key, layer, name) +
                              "' has the wrong size");
      }
      model.set_parameter(layer, name, values);
    }
    return model;
  });
}

void put_history(Archive& archive, const std::string& key, const TrainHistory& history) {
  std::vector<double> flat{history.initial_train_loss};
  for (const EpochRecord& e : history.epochs) {
    flat.insert(flat.end(), {e.train_loss, e.train_accuracy, e.val_loss, e.val_accuracy});
  }
  archive.put(key, flat);
}

TrainHistory get_history(const Archive& archive, const std::string& key) {
  const auto& flat = archive.real(key);
  if (flat.empty() || (flat.size() - 1) % 4 != 0) {
    throw CheckpointError("checkpoint history '" + key + "' has a bad length");
  }
  TrainHistory history;
  history.initial_train_loss = flat[0];
  for (std::size_t i = 1; i < flat.size(); i += 4) {
    history.epochs.push_back({flat[i], flat[i + 1], flat[i + 2], flat[i + 3]});
  }
  return history;
}

void put_gan(Archive& archive, const std::string& key, const gan::GanBundle& bundle) {
  put_model(archive, key + "/generator", bundle.generator);
  put_model(archive, key + "/discriminator", bundle.discriminator);
  std::vector<double> flat;
  for (const gan::GanEpochRecord& r : bundle.history) {
    flat.insert(flat.end(), {r.d_loss, r.g_loss, r.d_real_accuracy, r.d_fake_accuracy, r.value});
  }
  archive.put(key + "/history", flat);
  archive.header[key] = {{"config", to_json(bundle.config)}, {"feature_len", bundle.feature_len}};
}

gan::GanBundle get_gan(const Archive& archive, const std::string& key) {
  const json& m = meta(archive, key);
  const auto config = guarded(key, [&] { return gan_config_from_json(m.at("config")); });
  const auto feature_len = guarded(key, [&] { return m.at("feature_len").get<std::size_t>(); });
  const auto& flat = archive.real(key + "/history");
  if (flat.size() % 5 != 0) throw CheckpointError("checkpoint GAN history has a bad length");
  std::vector<gan::GanEpochRecord> history;
  for (std::size_t i = 0; i < flat.size(); i += 5) {
    history.push_back({flat[i], flat[i + 1], flat[i + 2], flat[i + 3], flat[i + 4]});
  }
  return gan::GanBundle{config, feature_len, get_model(archive, key + "/generator"),
                        get_model(archive, key + "/discriminator"), std::move(history)};
}

void put_dataset(Archive& archive, const std::string& key, const data::Dataset& dataset) {
  archive.header[key] = {{"width", dataset.width}, {"class_names", dataset.class_names}};
  archive.put(key + "/features", dataset.features);
  std::vector<std::int64_t> labels(dataset.labels.begin(), dataset.labels.end());
  archive.put(key + "/labels", labels);
  std::vector<std::int64_t> provenance;
  for (auto p : dataset.provenance) provenance.push_back(static_cast<std::int64_t>(p));
  archive.put(key + "/provenance", provenance);
  std::vector<std::int64_t> row_ids;
  for (std::size_t id : dataset.row_ids) {
    row_ids.push_back(id == data::Dataset::kSyntheticRow ? -1 : static_cast<std::int64_t>(id));
  }
  archive.put(key + "/row_ids", row_ids);
}

data::Dataset get_dataset(const Archive& archive, const std::string& key) {
  const json& m = meta(archive, key);
  data::Dataset d;
  guarded(key, [&] {
    d.width = m.at("width").get<std::size_t>();
    d.class_names = m.at("class_names").get<std::vector<std::string>>();
    return 0;
  });
  d.features = archive.real(key + "/features");
  for (auto v : archive.integer(key + "/labels")) d.labels.push_back(static_cast<int>(v));
  for (auto v : archive.integer(key + "/provenance")) {
    if (v != 0 && v != 1) throw CheckpointError("checkpoint dataset has a bad provenance tag");
    d.provenance.push_back(static_cast<data::Provenance>(v));
  }
  for (auto v : archive.integer(key + "/row_ids")) {
    d.row_ids.push_back(v < 0 ? data::Dataset::kSyntheticRow : static_cast<std::size_t>(v));
  }
  try {
    d.validate();
  } catch (const Error& e) {
    throw CheckpointError("checkpoint dataset '" + key + "' is inconsistent: " + e.what());
  }
  return d;
}

void put_encoders(Archive& archive, const std::string& key, const data::EncoderState& state) {
  json vocab = json::array();
  for (const auto& [column, values] : state.vocabularies) {
    vocab.push_back({{"column", column}, {"values", values}});
  }
  archive.header[key] = vocab;
}

data::EncoderState get_encoders(const Archive& archive, const std::string& key) {
  const json& m = meta(archive, key);
  return guarded(key, [&] {
    data::EncoderState state;
    for (const json& v : m) {
      state.vocabularies[v.at("column").get<std::size_t>()] =
          v.at("values").get<std::vector<std::string>>();
    }
    return state;
  });
}

void put_scaler(Archive& archive, const std::string& key, const data::ScalerState& state) {
  archive.put(key + "/min", state.min);
  archive.put(key + "/max", state.max);
}

data::ScalerState get_scaler(const Archive& archive, const std::string& key) {
  data::ScalerState state{archive.real(key + "/min"), archive.real(key + "/max")};
  if (state.min.size() != state.max.size()) {
    throw CheckpointError("checkpoint scaler bounds differ in length");
  }
  return state;
}

void put_selection(Archive& archive, const std::string& key,
                   const data::FeatureSelection& selection) {
  std::vector<std::int64_t> columns(selection.columns.begin(), selection.columns.end());
  archive.put(key + "/columns", columns);
  archive.put(key + "/variances", selection.variances);
  archive.header[key] = {{"source_width", selection.source_width}};
}

data::FeatureSelection get_selection(const Archive& archive, const std::string& key) {
  data::FeatureSelection s;
  s.source_width = guarded(key, [&] { return meta(archive, key).at("source_width").get<std::size_t>(); });
  for (auto c : archive.integer(key + "/columns")) {
    if (c < 0 || static_cast<std::size_t>(c) >= s.source_width) {
      throw CheckpointError("checkpoint selection column out of range");
    }
    s.columns.push_back(static_cast<std::size_t>(c));
  }
  s.variances = archive.real(key + "/variances");
  return s;
}

}  // namespace idsgan::ckpt
