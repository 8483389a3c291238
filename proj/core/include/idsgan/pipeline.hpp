#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "idsgan/data.hpp"
#include "idsgan/gan.hpp"
#include "idsgan/metrics.hpp"
#include "idsgan/model.hpp"
#include "idsgan/train.hpp"

namespace idsgan::pipeline {

enum class RetrainMode { reinitialize, reuse };

struct PipelineConfig {
  data::DatasetKind dataset = data::DatasetKind::generic;
  std::vector<std::filesystem::path> inputs;
  /// Unset: kdd files are headerless, everything else has a header row.
  std::optional<bool> has_header;
  std::optional<std::filesystem::path> kdd_category_map;
  std::size_t max_rows = 0;       // 0 = no subsampling
  std::size_t feature_width = 0;  // 0 = dataset default (kdd 30, cicids 78, generic all)
  std::size_t class_count = 0;    // 0 = whatever the data holds
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  nn::TrainConfig train;
  gan::GanConfig gan;
  nn::AttentionMode attention = nn::AttentionMode::scaled_dot;
  /// Synthetic rows per class; `synthetic_counts` entries (by class name)
  /// override it. With `balance_classes`, each class is topped up to the
  /// largest class instead.
  std::size_t synthetic_per_class = 0;
  std::map<std::string, std::size_t> synthetic_counts;
  bool balance_classes = false;
  RetrainMode retrain = RetrainMode::reinitialize;
  bool parallel_gans = true;

  bool header_row() const { return has_header.value_or(dataset != data::DatasetKind::kdd); }
};

/// Parses the JSON schema documented in the README. Relative paths resolve
/// against `base_dir`. Unknown keys and inconsistent values throw UsageError.
PipelineConfig config_from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);
/// Throws UsageError on values that cannot run (empty inputs, bad ratio, ...).
void validate(const PipelineConfig& config);
/// FNV-1a of the canonical config JSON without output_dir.
std::string config_digest(const PipelineConfig& config);

/// Stage seeds, each derive_seed(master, offset) with the offset in brackets.
struct StageSeeds {
  std::uint64_t prepare;         // [1] subsample + split
  std::uint64_t baseline_init;   // [2]
  std::uint64_t baseline_train;  // [3]
  std::uint64_t gan;             // [4] per-class GANs derive from this
  std::uint64_t synth;           // [5]
  std::uint64_t retrain_init;    // [6]
  std::uint64_t retrain_train;   // [7]
};
StageSeeds stage_seeds(std::uint64_t master);

/// Output directory layout.
namespace artifact {
inline constexpr std::string_view kEffectiveConfig = "effective_config.json";
inline constexpr std::string_view kIncomplete = "INCOMPLETE";
inline constexpr std::string_view kPrepared = "prepared.ckpt";
inline constexpr std::string_view kBaseline = "baseline.ckpt";
inline constexpr std::string_view kGans = "gans.ckpt";
inline constexpr std::string_view kSynthetic = "synthetic.ckpt";
inline constexpr std::string_view kAugmented = "augmented.ckpt";
inline constexpr std::string_view kReports = "reports";
}  // namespace artifact

enum class Stage { prepare, train, gan, synth, retrain, evaluate, report };
std::string_view to_string(Stage stage);

using Logger = std::function<void(std::string_view)>;

struct RunResult {
  std::optional<metrics::EvaluationReport> baseline;
  std::optional<metrics::EvaluationReport> augmented;
  std::vector<metrics::ComparisonRow> comparison;
};

/// Runs one stage against config.output_dir. Each stage reads its
/// prerequisites from disk; a missing one throws UsageError naming the stage
/// to run first. While a stage runs, output_dir/INCOMPLETE names it; the
/// marker is removed when the stage finishes. Errors are rethrown with the
/// stage name prefixed, keeping their type.
void run_stage(Stage stage, const PipelineConfig& config, const Logger& log = {});

/// prepare -> train -> gan -> synth -> retrain -> evaluate.
RunResult run_all(const PipelineConfig& config, const Logger& log = {});

/// Synthetic row count per class label for a training set.
std::map<int, std::size_t> synthetic_plan(const PipelineConfig& config,
                                          const data::Dataset& train);

/// Classifier matching the prepared data (one sigmoid unit for two classes).
nn::Model build_classifier(const PipelineConfig& config, const data::Dataset& train,
                           std::uint64_t seed);

/// Confusion-matrix report for `model` on `test`.
metrics::EvaluationReport evaluate_model(const std::string& run, const nn::Model& model,
                                         const data::Dataset& test, const TrainHistory& history,
                                         const std::string& digest,
                                         const data::Composition& composition);

}  // namespace idsgan::pipeline
