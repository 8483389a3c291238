#include "idsgan/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "idsgan/checkpoint.hpp"
#include "idsgan/errors.hpp"
#include "idsgan/random.hpp"
#include "idsgan/serialize.hpp"

namespace idsgan::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --------------------------------------------------------------- config io --

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw UsageError("config: " + where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw UsageError("config: unknown key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& target, const std::string& where = "") {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    target = it->get<T>();
  } catch (const json::exception& e) {
    throw UsageError("config: key '" + where + key + "': " + e.what());
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p.lexically_normal();
  return (base / p).lexically_normal();
}

void read_adam(const json& j, AdamConfig& c, const std::string& where) {
  read(j, "learning_rate", c.learning_rate, where);
  read(j, "beta1", c.beta1, where);
  read(j, "beta2", c.beta2, where);
  read(j, "epsilon", c.epsilon, where);
}

json adam_json(const AdamConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"epsilon", c.epsilon}};
}

// ------------------------------------------------------------- stage plumbing --

fs::path artifact_path(const PipelineConfig& c, std::string_view name) {
  return c.output_dir / fs::path(std::string(name));
}

ckpt::Archive require(const PipelineConfig& c, std::string_view name, Stage producer) {
  const fs::path path = artifact_path(c, name);
  if (!fs::exists(path)) {
    throw UsageError("missing " + std::string(name) + " in " + c.output_dir.string() +
                     "; run '" + std::string(to_string(producer)) + "' first");
  }
  ckpt::Archive archive = ckpt::load(path);
  const std::string digest = config_digest(c);
  if (archive.header.value("config_digest", std::string()) != digest) {
    throw UsageError(std::string(name) + " was produced by a different configuration; rerun '" +
                     std::string(to_string(producer)) + "'");
  }
  return archive;
}

ckpt::Archive new_archive(const PipelineConfig& c, Stage stage) {
  ckpt::Archive archive;
  archive.header["config_digest"] = config_digest(c);
  archive.header["stage"] = std::string(to_string(stage));
  return archive;
}

void say(const Logger& log, const std::string& message) {
  if (log) log(message);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw IoError("failed writing " + path.string());
}

struct Prepared {
  data::Dataset train;
  data::Dataset test;
};

Prepared load_prepared(const PipelineConfig& c) {
  const auto archive = require(c, artifact::kPrepared, Stage::prepare);
  return {ckpt::get_dataset(archive, "train"), ckpt::get_dataset(archive, "test")};
}

std::string describe(const data::Composition& comp, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << comp.real << " real + " << comp.synthetic << " synthetic (";
  for (std::size_t c = 0; c < names.size(); ++c) {
    out << (c ? ", " : "") << names[c] << ": " << comp.real_per_class[c] << '+'
        << comp.synthetic_per_class[c];
  }
  out << ')';
  return out.str();
}

// ------------------------------------------------------------------ stages --

void stage_prepare(const PipelineConfig& c, const Logger& log) {
  data::RawTable table;
  for (std::size_t i = 0; i < c.inputs.size(); ++i) {
    say(log, "reading " + c.inputs[i].string());
    auto part = data::load_csv(c.inputs[i], c.header_row());
    if (i == 0) {
      table = std::move(part);
    } else {
      data::append_rows(table, std::move(part));
    }
  }
  std::optional<data::KddCategoryMap> custom_map;
  if (c.kdd_category_map) custom_map = data::KddCategoryMap::from_file(*c.kdd_category_map);

  data::PrepareOptions options;
  options.kind = c.dataset;
  options.feature_width = c.feature_width;
  options.split_ratio = c.split_ratio;
  options.seed = stage_seeds(c.seed).prepare;
  options.max_rows = c.max_rows;
  options.kdd_map = custom_map ? &*custom_map : &data::KddCategoryMap::builtin();
  const data::PreparedData p = data::prepare(table, options);

  if (p.train.class_count() < 2) {
    throw DataError("prepared data holds " + std::to_string(p.train.class_count()) +
                    " class(es); at least 2 are needed");
  }
  if (c.class_count != 0) {
    const std::size_t expected = c.class_count == 1 ? 2 : c.class_count;
    if (p.train.class_count() != expected) {
      throw DataError("config expects " + std::to_string(c.class_count) +
                      " classes but the data defines " + std::to_string(p.train.class_count()));
    }
  }
  for (const auto& w : p.warnings) say(log, "warning: " + w);
  say(log, "rows: " + std::to_string(p.stats.loaded_rows) + " loaded, " +
               std::to_string(p.stats.duplicate_rows) + " duplicates, " +
               std::to_string(p.stats.dropped_rows) + " dropped; train " +
               std::to_string(p.train.rows()) + ", test " + std::to_string(p.test.rows()) +
               ", features " + std::to_string(p.train.width));

  ckpt::Archive archive = new_archive(c, Stage::prepare);
  ckpt::put_dataset(archive, "train", p.train);
  ckpt::put_dataset(archive, "test", p.test);
  ckpt::put_encoders(archive, "encoders", p.encoders);
  ckpt::put_scaler(archive, "scaler", p.scaler);
  ckpt::put_selection(archive, "selection", p.selection);
  json audit = json::array();
  for (const auto& a : p.audit) {
    audit.push_back({{"stage", a.stage}, {"source", a.source}, {"rows", a.row_ids.size()}});
  }
  archive.header["feature_names"] = p.feature_names;
  archive.header["encoded_columns"] = p.encoded_columns;
  archive.header["audit"] = audit;
  archive.header["warnings"] = p.warnings;
  archive.header["stats"] = {{"loaded_rows", p.stats.loaded_rows},
                             {"duplicate_rows", p.stats.duplicate_rows},
                             {"subsampled_rows", p.stats.subsampled_rows},
                             {"dropped_rows", p.stats.dropped_rows},
                             {"test_values_out_of_range", p.stats.test_values_out_of_range}};
  ckpt::save(archive, artifact_path(c, artifact::kPrepared));
}

void stage_train(const PipelineConfig& c, const Logger& log) {
  const Prepared p = load_prepared(c);
  const StageSeeds seeds = stage_seeds(c.seed);
  nn::Model model = build_classifier(c, p.train, seeds.baseline_init);
  nn::TrainConfig tc = c.train;
  tc.seed = seeds.baseline_train;
  say(log, "training baseline on " + std::to_string(p.train.rows()) + " rows");
  const TrainHistory history = nn::train_classifier(model, p.train, p.test, tc);
  for (std::size_t e = 0; e < history.size(); ++e) {
    const auto& r = history.epochs[e];
    say(log, "epoch " + std::to_string(e + 1) + ": loss " + metrics::format_4dp(r.train_loss) +
                 " acc " + metrics::format_4dp(r.train_accuracy));
  }
  ckpt::Archive archive = new_archive(c, Stage::train);
  ckpt::put_model(archive, "model", model);
  ckpt::put_history(archive, "history", history);
  ckpt::save(archive, artifact_path(c, artifact::kBaseline));
}

void stage_gan(const PipelineConfig& c, const Logger& log) {
  const Prepared p = load_prepared(c);
  const auto plan = synthetic_plan(c, p.train);
  gan::GanConfig gc = c.gan;
  gc.seed = stage_seeds(c.seed).gan;
  for (const auto& [label, count] : plan) {
    if (count > 0) {
      say(log, "training GAN for class '" + p.train.class_names[static_cast<std::size_t>(label)] +
                   "' (" + std::to_string(count) + " rows planned)");
    }
  }
  const auto bundles = gan::train_per_class(p.train, plan, gc, c.parallel_gans);
  ckpt::Archive archive = new_archive(c, Stage::gan);
  std::vector<int> labels;
  for (const auto& [label, bundle] : bundles) {
    labels.push_back(label);
    ckpt::put_gan(archive, "gan/" + std::to_string(label), bundle);
  }
  archive.header["labels"] = labels;
  ckpt::save(archive, artifact_path(c, artifact::kGans));
}

void stage_synth(const PipelineConfig& c, const Logger& log) {
  const Prepared p = load_prepared(c);
  const auto archive = require(c, artifact::kGans, Stage::gan);
  std::map<int, gan::GanBundle> bundles;
  for (int label : archive.header.at("labels").get<std::vector<int>>()) {
    bundles.emplace(label, ckpt::get_gan(archive, "gan/" + std::to_string(label)));
  }
  const auto plan = synthetic_plan(c, p.train);
  for (const auto& [label, count] : plan) {
    if (count > 0 && !bundles.contains(label)) {
      throw UsageError("gans.ckpt has no generator for class " + std::to_string(label) +
                       "; rerun 'gan'");
    }
  }
  const auto synthetic = gan::synthesize_per_class(bundles, plan, stage_seeds(c.seed).synth);
  const data::Dataset augmented = data::augment(p.train, synthetic);
  say(log, "augmented training set: " + describe(augmented.composition(), augmented.class_names));
  ckpt::Archive out = new_archive(c, Stage::synth);
  ckpt::put_dataset(out, "augmented", augmented);
  ckpt::save(out, artifact_path(c, artifact::kSynthetic));
}

void stage_retrain(const PipelineConfig& c, const Logger& log) {
  const Prepared p = load_prepared(c);
  const data::Dataset augmented =
      ckpt::get_dataset(require(c, artifact::kSynthetic, Stage::synth), "augmented");
  const StageSeeds seeds = stage_seeds(c.seed);
  nn::Model model = c.retrain == RetrainMode::reuse
                        ? ckpt::get_model(require(c, artifact::kBaseline, Stage::train), "model")
                        : build_classifier(c, augmented, seeds.retrain_init);
  nn::TrainConfig tc = c.train;
  tc.seed = seeds.retrain_train;
  say(log, "retraining on " + std::to_string(augmented.rows()) + " rows");
  const TrainHistory history = nn::train_classifier(model, augmented, p.test, tc);
  ckpt::Archive archive = new_archive(c, Stage::retrain);
  ckpt::put_model(archive, "model", model);
  ckpt::put_history(archive, "history", history);
  ckpt::save(archive, artifact_path(c, artifact::kAugmented));
}

void stage_evaluate(const PipelineConfig& c, const Logger& log) {
  const Prepared p = load_prepared(c);
  const std::string digest = config_digest(c);
  const fs::path reports = artifact_path(c, artifact::kReports);

  const auto baseline_ckpt = require(c, artifact::kBaseline, Stage::train);
  const metrics::EvaluationReport baseline = evaluate_model(
      "baseline", ckpt::get_model(baseline_ckpt, "model"), p.test,
      ckpt::get_history(baseline_ckpt, "history"), digest, p.train.composition());
  metrics::render_report(baseline, reports);
  say(log, "baseline accuracy " + metrics::format_4dp(baseline.accuracy) + ", macro F1 " +
               metrics::format_4dp(baseline.macro.f1));

  if (!fs::exists(artifact_path(c, artifact::kAugmented))) {
    fs::remove(reports / "augmented_metrics.json");
    say(log, "no augmented model yet; comparison skipped");
    return;
  }
  const auto augmented_ckpt = require(c, artifact::kAugmented, Stage::retrain);
  const data::Dataset augmented_train =
      ckpt::get_dataset(require(c, artifact::kSynthetic, Stage::synth), "augmented");
  const metrics::EvaluationReport augmented = evaluate_model(
      "augmented", ckpt::get_model(augmented_ckpt, "model"), p.test,
      ckpt::get_history(augmented_ckpt, "history"), digest, augmented_train.composition());
  metrics::render_report(augmented, reports);
  metrics::render_comparison(baseline, augmented, reports);
  say(log, "augmented accuracy " + metrics::format_4dp(augmented.accuracy) + ", macro F1 " +
               metrics::format_4dp(augmented.macro.f1));
}

void stage_report(const PipelineConfig& c, const Logger& log) {
  const fs::path reports = artifact_path(c, artifact::kReports);
  const fs::path baseline_path = reports / "baseline_metrics.json";
  if (!fs::exists(baseline_path)) {
    throw UsageError("missing " + baseline_path.string() + "; run 'evaluate' first");
  }
  const auto baseline = metrics::load_report(baseline_path);
  metrics::render_report(baseline, reports);
  const fs::path augmented_path = reports / "augmented_metrics.json";
  if (fs::exists(augmented_path)) {
    const auto augmented = metrics::load_report(augmented_path);
    metrics::render_report(augmented, reports);
    metrics::render_comparison(baseline, augmented, reports);
  }
  say(log, "reports written to " + reports.string());
}

template <typename E>
[[noreturn]] void rethrow_as(Stage stage, const E& e) {
  const std::string prefix = "stage '" + std::string(to_string(stage)) + "': ";
  const std::string what = e.what();
  throw E(what.rfind("stage '", 0) == 0 ? what : prefix + what);
}

}  // namespace

// ------------------------------------------------------------------ config --

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
  reject_unknown(j,
                 {"dataset", "inputs", "has_header", "kdd_category_map", "max_rows",
                  "feature_width", "class_count", "split_ratio", "seed", "output_dir", "train",
                  "gan", "attention", "synthetic_per_class", "synthetic_counts",
                  "balance_classes", "retrain", "parallel_gans"},
                 "");
  PipelineConfig c;
  std::string text;
  if (j.contains("dataset")) {
    read(j, "dataset", text);
    c.dataset = data::dataset_kind_from_string(text);
  }
  std::vector<std::string> inputs;
  read(j, "inputs", inputs);
  for (const auto& in : inputs) c.inputs.push_back(resolve(base_dir, in));
  if (j.contains("has_header") && !j.at("has_header").is_null()) {
    bool header = true;
    read(j, "has_header", header);
    c.has_header = header;
  }
  if (j.contains("kdd_category_map") && !j.at("kdd_category_map").is_null()) {
    read(j, "kdd_category_map", text);
    c.kdd_category_map = resolve(base_dir, text);
  }
  read(j, "max_rows", c.max_rows);
  read(j, "feature_width", c.feature_width);
  read(j, "class_count", c.class_count);
  read(j, "split_ratio", c.split_ratio);
  read(j, "seed", c.seed);
  if (j.contains("output_dir")) {
    read(j, "output_dir", text);
    c.output_dir = resolve(base_dir, text);
  } else {
    c.output_dir = resolve(base_dir, c.output_dir);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t, {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon"},
                   "train.");
    read(t, "epochs", c.train.epochs, "train.");
    read(t, "batch_size", c.train.batch_size, "train.");
    read_adam(t, c.train.optimizer, "train.");
  }
  if (j.contains("gan")) {
    const json& g = j.at("gan");
    reject_unknown(g,
                   {"noise_dim", "epochs", "batch_size", "alpha", "learning_rate", "beta1",
                    "beta2", "epsilon"},
                   "gan.");
    read(g, "noise_dim", c.gan.noise_dim, "gan.");
    read(g, "epochs", c.gan.epochs, "gan.");
    read(g, "batch_size", c.gan.batch_size, "gan.");
    read(g, "alpha", c.gan.alpha, "gan.");
    read_adam(g, c.gan.generator_optimizer, "gan.");
    c.gan.discriminator_optimizer = c.gan.generator_optimizer;
  }
  if (j.contains("attention")) {
    read(j, "attention", text);
    c.attention = nn::attention_mode_from_string(text);
  }
  read(j, "synthetic_per_class", c.synthetic_per_class);
  read(j, "synthetic_counts", c.synthetic_counts);
  read(j, "balance_classes", c.balance_classes);
  if (j.contains("retrain")) {
    read(j, "retrain", text);
    if (text == "reinitialize") {
      c.retrain = RetrainMode::reinitialize;
    } else if (text == "reuse") {
      c.retrain = RetrainMode::reuse;
    } else {
      throw UsageError("config: retrain must be 'reinitialize' or 'reuse', got '" + text + "'");
    }
  }
  read(j, "parallel_gans", c.parallel_gans);
  validate(c);
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

json to_json(const PipelineConfig& c) {
  std::vector<std::string> inputs;
  for (const auto& p : c.inputs) inputs.push_back(p.generic_string());
  json train = adam_json(c.train.optimizer);
  train["epochs"] = c.train.epochs;
  train["batch_size"] = c.train.batch_size;
  json gan = adam_json(c.gan.generator_optimizer);
  gan["noise_dim"] = c.gan.noise_dim;
  gan["epochs"] = c.gan.epochs;
  gan["batch_size"] = c.gan.batch_size;
  gan["alpha"] = c.gan.alpha;
  return json{
      {"dataset", std::string(data::to_string(c.dataset))},
      {"inputs", inputs},
      {"has_header", c.header_row()},
      {"kdd_category_map",
       c.kdd_category_map ? json(c.kdd_category_map->generic_string()) : json(nullptr)},
      {"max_rows", c.max_rows},
      {"feature_width", c.feature_width},
      {"class_count", c.class_count},
      {"split_ratio", c.split_ratio},
      {"seed", c.seed},
      {"output_dir", c.output_dir.generic_string()},
      {"train", train},
      {"gan", gan},
      {"attention", std::string(nn::to_string(c.attention))},
      {"synthetic_per_class", c.synthetic_per_class},
      {"synthetic_counts", c.synthetic_counts},
      {"balance_classes", c.balance_classes},
      {"retrain", c.retrain == RetrainMode::reuse ? "reuse" : "reinitialize"},
      {"parallel_gans", c.parallel_gans},
  };
}

void validate(const PipelineConfig& c) {
  if (c.inputs.empty()) throw UsageError("config: 'inputs' must list at least one file");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) {
    throw UsageError("config: split_ratio must lie in (0, 1)");
  }
  if (c.train.batch_size == 0) throw UsageError("config: train.batch_size must be >= 1");
  if (c.gan.batch_size == 0) throw UsageError("config: gan.batch_size must be >= 1");
  if (c.gan.noise_dim == 0) throw UsageError("config: gan.noise_dim must be >= 1");
  if (!(c.train.optimizer.learning_rate > 0.0) || !(c.gan.generator_optimizer.learning_rate > 0.0)) {
    throw UsageError("config: learning rates must be positive");
  }
  const std::size_t default_width = data::default_feature_width(c.dataset);
  if (default_width != 0 && c.feature_width != 0 && c.feature_width != default_width) {
    throw UsageError("config: " + std::string(data::to_string(c.dataset)) +
                     " data uses feature_width " + std::to_string(default_width) + ", got " +
                     std::to_string(c.feature_width));
  }
  if (c.dataset == data::DatasetKind::kdd && c.class_count != 0 && c.class_count != 5) {
    throw UsageError("config: kdd data has 5 classes, got class_count " +
                     std::to_string(c.class_count));
  }
  if (c.dataset == data::DatasetKind::cicids && c.class_count > 2) {
    throw UsageError("config: cicids data is binary, got class_count " +
                     std::to_string(c.class_count));
  }
  if (c.output_dir.empty()) throw UsageError("config: output_dir must not be empty");
}

std::string config_digest(const PipelineConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");
  return ckpt::hex64(ckpt::fnv1a64(j.dump()));
}

StageSeeds stage_seeds(std::uint64_t master) {
  return StageSeeds{derive_seed(master, 1), derive_seed(master, 2), derive_seed(master, 3),
                    derive_seed(master, 4), derive_seed(master, 5), derive_seed(master, 6),
                    derive_seed(master, 7)};
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::prepare: return "prepare";
    case Stage::train: return "train";
    case Stage::gan: return "gan";
    case Stage::synth: return "synth";
    case Stage::retrain: return "retrain";
    case Stage::evaluate: return "evaluate";
    case Stage::report: return "report";
  }
  return "unknown";
}

// ----------------------------------------------------------------- helpers --

std::map<int, std::size_t> synthetic_plan(const PipelineConfig& c, const data::Dataset& train) {
  for (const auto& [name, count] : c.synthetic_counts) {
    if (std::find(train.class_names.begin(), train.class_names.end(), name) ==
        train.class_names.end()) {
      throw UsageError("config: synthetic_counts names unknown class '" + name + "'");
    }
  }
  const auto counts = train.class_counts();
  const std::size_t largest = *std::max_element(counts.begin(), counts.end());
  std::map<int, std::size_t> plan;
  for (std::size_t label = 0; label < train.class_count(); ++label) {
    std::size_t n = c.balance_classes ? largest - counts[label] : c.synthetic_per_class;
    if (const auto it = c.synthetic_counts.find(train.class_names[label]);
        it != c.synthetic_counts.end()) {
      n = it->second;
    }
    if (counts[label] == 0) n = 0;
    plan[static_cast<int>(label)] = n;
  }
  return plan;
}

nn::Model build_classifier(const PipelineConfig& c, const data::Dataset& train,
                           std::uint64_t seed) {
  const std::size_t classes = train.class_count();
  nn::ClassifierOptions options;
  options.attention_mode = c.attention;
  return nn::build_cnn_attention(train.width, classes == 2 ? 1 : classes, seed, options);
}

metrics::EvaluationReport evaluate_model(const std::string& run, const nn::Model& model,
                                         const data::Dataset& test, const TrainHistory& history,
                                         const std::string& digest,
                                         const data::Composition& composition) {
  if (model.input_shape() != Shape{test.width, 1}) {
    throw ShapeError("model expects input " + shape_string(model.input_shape()) +
                     " but the test split has width " + std::to_string(test.width));
  }
  const std::size_t width = model.output_width();
  if (test.class_count() > (width == 1 ? 2 : width)) {
    throw ShapeError("model head of width " + std::to_string(width) + " cannot score " +
                     std::to_string(test.class_count()) + " classes");
  }
  const auto predicted = nn::predict_classes(model, test.as_tensor());
  const auto cm =
      metrics::confusion(test.labels, predicted, test.class_count(), test.class_names);
  return metrics::make_report(run, cm, history, digest, composition);
}

// ------------------------------------------------------------------ running --

void run_stage(Stage stage, const PipelineConfig& config, const Logger& log) {
  validate(config);
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (!fs::is_directory(config.output_dir)) {
    throw IoError("cannot create output directory " + config.output_dir.string());
  }
  write_text(artifact_path(config, artifact::kEffectiveConfig), to_json(config).dump(2) + "\n");
  const fs::path marker = artifact_path(config, artifact::kIncomplete);
  write_text(marker, std::string(to_string(stage)) + "\n");
  say(log, "stage " + std::string(to_string(stage)));
  try {
    switch (stage) {
      case Stage::prepare: stage_prepare(config, log); break;
      case Stage::train: stage_train(config, log); break;
      case Stage::gan: stage_gan(config, log); break;
      case Stage::synth: stage_synth(config, log); break;
      case Stage::retrain: stage_retrain(config, log); break;
      case Stage::evaluate: stage_evaluate(config, log); break;
      case Stage::report: stage_report(config, log); break;
    }
  } catch (const UsageError& e) {
    rethrow_as(stage, e);
  } catch (const IoError& e) {
    rethrow_as(stage, e);
  } catch (const ParseError& e) {
    rethrow_as(stage, e);
  } catch (const DataError& e) {
    rethrow_as(stage, e);
  } catch (const ShapeError& e) {
    rethrow_as(stage, e);
  } catch (const DomainError& e) {
    rethrow_as(stage, e);
  } catch (const CheckpointError& e) {
    rethrow_as(stage, e);
  } catch (const Error& e) {
    rethrow_as(stage, e);
  }
  fs::remove(marker);
}

RunResult run_all(const PipelineConfig& config, const Logger& log) {
  for (Stage s : {Stage::prepare, Stage::train, Stage::gan, Stage::synth, Stage::retrain,
                  Stage::evaluate}) {
    run_stage(s, config, log);
  }
  const fs::path reports = artifact_path(config, artifact::kReports);
  RunResult result;
  result.baseline = metrics::load_report(reports / "baseline_metrics.json");
  result.augmented = metrics::load_report(reports / "augmented_metrics.json");
  result.comparison = metrics::compare(*result.baseline, *result.augmented);
  return result;
}

}  // namespace idsgan::pipeline
