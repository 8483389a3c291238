#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idsgan/tensor.hpp"

// Tabular ingestion and preprocessing for network-flow corpora: CSV loading,
// duplicate removal, categorical encoding, min-max scaling, stratified
// splitting, label taxonomies, variance-based feature selection, and
// augmentation with synthetic rows.
namespace idsgan::data {

struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return columns.size(); }
  /// Index of the column whose trimmed name matches case-insensitively.
  std::optional<std::size_t> find_column(std::string_view name) const;
};

/// Reads comma-separated text. Without a header, columns are named c0..cN-1.
/// Throws IoError when the file cannot be opened and ParseError (naming the
/// line) for empty input or ragged rows.
RawTable load_csv(const std::filesystem::path& path, bool has_header);
RawTable parse_csv(std::istream& in, bool has_header, const std::string& source = "<stream>");

/// Appends `more` to `table`; headers must agree.
void append_rows(RawTable& table, RawTable more);

/// Keeps the first occurrence of every exact-duplicate row, preserving order.
RawTable dedupe(const RawTable& table);

std::string_view trim(std::string_view s);
std::optional<double> parse_number(std::string_view cell);

// ---------------------------------------------------------------- encoders --

/// Per categorical column, the sorted distinct categories. A category's code
/// is its position in that list.
struct EncoderState {
  std::map<std::size_t, std::vector<std::string>> vocabularies;

  int encode(std::size_t column, std::string_view value) const;
  const std::string& decode(std::size_t column, int code) const;
  bool is_categorical(std::size_t column) const { return vocabularies.contains(column); }
};

EncoderState fit_label_encoders(const RawTable& table, std::span<const std::size_t> columns);

/// Numeric view of selected feature columns.
struct NumericTable {
  std::vector<std::string> columns;
  std::size_t width = 0;
  std::vector<double> values;             // row-major, rows() x width
  std::vector<std::size_t> source_rows;   // row index in the input RawTable
  std::size_t dropped_rows = 0;           // rows with a non-numeric numeric cell

  std::size_t rows() const { return width == 0 ? 0 : values.size() / width; }
};

/// Encodes categorical columns through `state` and parses the rest. Rows with
/// a non-numeric or non-finite cell in a numeric column are dropped and
/// counted. An unseen category throws DomainError naming column and value.
NumericTable apply_label_encoders(const RawTable& table, const EncoderState& state,
                                  std::span<const std::size_t> feature_columns);

// ------------------------------------------------------------------ scaler --

struct ScalerState {
  std::vector<double> min;
  std::vector<double> max;
  std::size_t width() const { return min.size(); }
};

/// Fits per-feature bounds on a row-major matrix with `width` columns.
ScalerState fit_minmax(std::span<const double> values, std::size_t width);
/// (x - min) / (max - min); constant features map to 0. Values outside the
/// fitted range are kept as-is (not clipped).
std::vector<double> apply_minmax(std::span<const double> values, const ScalerState& state);

// ------------------------------------------------------------------- split --

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;
};

/// Stratified split: each class sends round(ratio * n_c) rows to train after
/// a seeded shuffle within the class. Classes with fewer than two rows go to
/// train with a warning. Both index lists come back sorted.
SplitIndices stratified_split(std::span<const int> labels, double ratio, std::uint64_t seed);

/// Proportional per-class subsample down to at most `max_rows` rows (each
/// present class keeps at least one). Returns sorted indices.
std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t max_rows,
                                              std::uint64_t seed);

// ---------------------------------------------------------------- taxonomy --

inline constexpr int kKddClassCount = 5;

/// Attack-name to KDD category mapping: normal=0, DoS=1, U2R=2, Probe=3, R2L=4.
class KddCategoryMap {
 public:
  static const std::vector<std::string>& category_names();

  /// Parses "<attack_name> <category>" lines; '#' starts a comment.
  static KddCategoryMap parse(std::string_view text, const std::string& source = "<text>");
  static KddCategoryMap from_file(const std::filesystem::path& path);
  /// The taxonomy shipped with the library.
  static const KddCategoryMap& builtin();

  /// Category index for a raw label; a trailing period and surrounding
  /// whitespace are ignored. Unknown names throw DomainError.
  int category(std::string_view raw_label) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::map<std::string, int, std::less<>> names_;
};

int map_kdd_label(std::string_view raw_label, const KddCategoryMap& map = KddCategoryMap::builtin());

/// 0 for benign (case-insensitive, trimmed), 1 for anything else.
int binarize_cicids_label(std::string_view raw_label);

// ------------------------------------------------------- feature selection --

struct FeatureSelection {
  std::vector<std::size_t> columns;   // kept columns, ascending
  std::vector<double> variances;      // variance of every candidate column
  std::size_t source_width = 0;
};

/// Keeps the `target_dim` highest-variance columns (ties favour the lower
/// index). Throws UsageError when target_dim exceeds `width`.
FeatureSelection fit_variance_selection(std::span<const double> values, std::size_t width,
                                        std::size_t target_dim);
std::vector<double> apply_selection(std::span<const double> values,
                                    const FeatureSelection& selection);

// ----------------------------------------------------------------- dataset --

enum class Provenance : std::uint8_t { real = 0, synthetic = 1 };

struct Composition {
  std::size_t real = 0;
  std::size_t synthetic = 0;
  std::vector<std::size_t> real_per_class;
  std::vector<std::size_t> synthetic_per_class;
};

/// Scaled features with integer labels. Row i occupies
/// features[i * width, (i + 1) * width).
struct Dataset {
  std::size_t width = 0;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<Provenance> provenance;
  /// Source row id for real rows (index after dedupe); synthetic rows hold
  /// kSyntheticRow.
  std::vector<std::size_t> row_ids;

  static constexpr std::size_t kSyntheticRow = static_cast<std::size_t>(-1);

  std::size_t rows() const { return labels.size(); }
  std::size_t class_count() const { return class_names.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * width, width);
  }
  /// Throws if any invariant (sizes, label range) is broken.
  void validate() const;
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Rows as a [N, width, 1] tensor.
  Tensor as_tensor() const;
  /// Rows `indices` as a [n, width, 1] tensor.
  Tensor batch(std::span<const std::size_t> indices) const;
  std::vector<std::size_t> class_counts() const;
  Composition composition() const;
};

/// Appends synthetic rows (each tensor [n_c, width] or [n_c, width, 1]) labelled
/// with their map key. Throws ShapeError on a width mismatch.
Dataset augment(const Dataset& train, const std::map<int, Tensor>& synthetic_per_class);

// ---------------------------------------------------------------- pipeline --

enum class DatasetKind { kdd, cicids, generic };

std::string_view to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(std::string_view name);
std::size_t default_feature_width(DatasetKind kind);

struct PrepareOptions {
  DatasetKind kind = DatasetKind::generic;
  /// 0 keeps every feature (kdd and cicids substitute their defaults).
  std::size_t feature_width = 0;
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  /// 0 means no limit; otherwise a stratified subsample after dedupe.
  std::size_t max_rows = 0;
  const KddCategoryMap* kdd_map = nullptr;
};

/// Which rows a fitted state was derived from.
struct AuditEntry {
  std::string stage;
  std::string source;
  std::vector<std::size_t> row_ids;
};

struct PrepareStats {
  std::size_t loaded_rows = 0;
  std::size_t duplicate_rows = 0;
  std::size_t subsampled_rows = 0;
  std::size_t dropped_rows = 0;
  /// Test-split feature values that fall outside [0, 1] after scaling.
  std::size_t test_values_out_of_range = 0;
};

struct PreparedData {
  Dataset train;
  Dataset test;
  std::vector<std::string> feature_names;  // after selection
  std::vector<std::string> encoded_columns; // feature columns before selection
  EncoderState encoders;
  ScalerState scaler;
  FeatureSelection selection;
  PrepareStats stats;
  std::vector<AuditEntry> audit;
  std::vector<std::string> warnings;
};

/// dedupe -> label mapping -> categorical encoding -> stratified split ->
/// min-max fit on train -> variance selection on train.
PreparedData prepare(const RawTable& table, const PrepareOptions& options);

}  // namespace idsgan::data
