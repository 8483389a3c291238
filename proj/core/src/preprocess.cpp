#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "idsgan/data.hpp"
#include "idsgan/errors.hpp"
#include "idsgan/random.hpp"

namespace idsgan::data {

// ---------------------------------------------------------------- encoders --

int EncoderState::encode(std::size_t column, std::string_view value) const {
  const auto it = vocabularies.find(column);
  if (it == vocabularies.end()) {
    throw UsageError("column " + std::to_string(column) + " has no fitted encoder");
  }
  const auto& vocab = it->second;
  const auto pos = std::lower_bound(vocab.begin(), vocab.end(), value);
  if (pos == vocab.end() || *pos != value) {
    throw DomainError("unseen category '" + std::string(value) + "' in column " +
                      std::to_string(column));
  }
  return static_cast<int>(pos - vocab.begin());
}

const std::string& EncoderState::decode(std::size_t column, int code) const {
  const auto it = vocabularies.find(column);
  if (it == vocabularies.end()) {
    throw UsageError("column " + std::to_string(column) + " has no fitted encoder");
  }
  if (code < 0 || static_cast<std::size_t>(code) >= it->second.size()) {
    throw DomainError("code " + std::to_string(code) + " outside vocabulary of column " +
                      std::to_string(column));
  }
  return it->second[static_cast<std::size_t>(code)];
}

EncoderState fit_label_encoders(const RawTable& table, std::span<const std::size_t> columns) {
  EncoderState state;
  for (std::size_t col : columns) {
    if (col >= table.column_count()) {
      throw UsageError("categorical column " + std::to_string(col) + " out of range");
    }
    std::set<std::string, std::less<>> distinct;
    for (const auto& row : table.rows) distinct.emplace(trim(row[col]));
    state.vocabularies[col] = std::vector<std::string>(distinct.begin(), distinct.end());
  }
  return state;
}

NumericTable apply_label_encoders(const RawTable& table, const EncoderState& state,
                                  std::span<const std::size_t> feature_columns) {
  NumericTable out;
  out.width = feature_columns.size();
  for (std::size_t col : feature_columns) {
    if (col >= table.column_count()) {
      throw UsageError("feature column " + std::to_string(col) + " out of range");
    }
    out.columns.push_back(std::string(trim(table.columns[col])));
  }
  out.values.reserve(table.row_count() * out.width);
  std::vector<double> row_values(out.width);
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const auto& row = table.rows[r];
    bool ok = true;
    for (std::size_t i = 0; i < feature_columns.size() && ok; ++i) {
      const std::size_t col = feature_columns[i];
      if (state.is_categorical(col)) {
        row_values[i] = state.encode(col, trim(row[col]));
      } else if (auto v = parse_number(row[col])) {
        row_values[i] = *v;
      } else {
        ok = false;
      }
    }
    if (!ok) {
      ++out.dropped_rows;
      continue;
    }
    out.values.insert(out.values.end(), row_values.begin(), row_values.end());
    out.source_rows.push_back(r);
  }
  return out;
}

// ------------------------------------------------------------------ scaler --

ScalerState fit_minmax(std::span<const double> values, std::size_t width) {
  if (width == 0 || values.size() % width != 0) {
    throw ShapeError("fit_minmax: " + std::to_string(values.size()) +
                     " values do not form rows of width " + std::to_string(width));
  }
  if (values.empty()) throw UsageError("fit_minmax: no rows to fit");
  ScalerState state;
  state.min.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(width));
  state.max = state.min;
  for (std::size_t i = width; i < values.size(); ++i) {
    const std::size_t c = i % width;
    state.min[c] = std::min(state.min[c], values[i]);
    state.max[c] = std::max(state.max[c], values[i]);
  }
  return state;
}

std::vector<double> apply_minmax(std::span<const double> values, const ScalerState& state) {
  const std::size_t width = state.width();
  if (width == 0 || values.size() % width != 0) {
    throw ShapeError("apply_minmax: values do not match scaler width " + std::to_string(width));
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t c = i % width;
    const double range = state.max[c] - state.min[c];
    out[i] = range > 0.0 ? (values[i] - state.min[c]) / range : 0.0;
  }
  return out;
}

// ------------------------------------------------------------------- split --

namespace {

std::map<int, std::vector<std::size_t>> group_by_label(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

SplitIndices stratified_split(std::span<const int> labels, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw UsageError("split ratio must lie in (0, 1)");
  SplitIndices out;
  std::mt19937_64 rng(seed);
  for (auto& [label, members] : group_by_label(labels)) {
    if (members.size() < 2) {
      out.warnings.push_back("class " + std::to_string(label) + " has " +
                             std::to_string(members.size()) + " row(s); kept in train");
      out.train.insert(out.train.end(), members.begin(), members.end());
      continue;
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(members.size())));
    out.train.insert(out.train.end(), members.begin(),
                     members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train),
                    members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t max_rows,
                                              std::uint64_t seed) {
  std::vector<std::size_t> all(labels.size());
  std::iota(all.begin(), all.end(), 0);
  if (max_rows == 0 || labels.size() <= max_rows) return all;

  auto groups = group_by_label(labels);
  const double fraction = static_cast<double>(max_rows) / static_cast<double>(labels.size());
  std::map<int, std::size_t> quota;
  std::size_t total = 0;
  for (const auto& [label, members] : groups) {
    const auto q = std::max<std::size_t>(
        1, static_cast<std::size_t>(fraction * static_cast<double>(members.size())));
    quota[label] = std::min(q, members.size());
    total += quota[label];
  }
  // Tiny classes are lifted to one row; take the excess back from the largest.
  while (total > max_rows) {
    auto largest = std::max_element(quota.begin(), quota.end(), [](const auto& a, const auto& b) {
      return a.second < b.second;
    });
    if (largest->second <= 1) break;
    --largest->second;
    --total;
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> kept;
  kept.reserve(total);
  for (auto& [label, members] : groups) {
    std::shuffle(members.begin(), members.end(), rng);
    kept.insert(kept.end(), members.begin(),
                members.begin() + static_cast<std::ptrdiff_t>(quota[label]));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// ------------------------------------------------------- feature selection --

FeatureSelection fit_variance_selection(std::span<const double> values, std::size_t width,
                                        std::size_t target_dim) {
  if (width == 0 || values.size() % width != 0) {
    throw ShapeError("feature selection: values do not form rows of width " +
                     std::to_string(width));
  }
  if (target_dim == 0 || target_dim > width) {
    throw UsageError("feature selection: cannot keep " + std::to_string(target_dim) + " of " +
                     std::to_string(width) + " features");
  }
  const std::size_t rows = values.size() / width;
  FeatureSelection sel;
  sel.source_width = width;
  sel.variances.assign(width, 0.0);
  if (rows > 0) {
    std::vector<double> mean(width, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) mean[i % width] += values[i];
    for (double& m : mean) m /= static_cast<double>(rows);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - mean[i % width];
      sel.variances[i % width] += d * d;
    }
    for (double& v : sel.variances) v /= static_cast<double>(rows);
  }
  std::vector<std::size_t> order(width);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sel.variances[a] > sel.variances[b];
  });
  sel.columns.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(target_dim));
  std::sort(sel.columns.begin(), sel.columns.end());
  return sel;
}

std::vector<double> apply_selection(std::span<const double> values,
                                    const FeatureSelection& selection) {
  const std::size_t width = selection.source_width;
  if (width == 0 || values.size() % width != 0) {
    throw ShapeError("apply_selection: values do not form rows of width " +
                     std::to_string(width));
  }
  const std::size_t rows = values.size() / width;
  std::vector<double> out;
  out.reserve(rows * selection.columns.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c : selection.columns) out.push_back(values[r * width + c]);
  }
  return out;
}

// ----------------------------------------------------------------- dataset --

void Dataset::validate() const {
  if (width == 0 && !labels.empty()) throw ShapeError("dataset: zero feature width");
  if (features.size() != labels.size() * width) {
    throw ShapeError("dataset: " + std::to_string(features.size()) + " feature values for " +
                     std::to_string(labels.size()) + " rows of width " + std::to_string(width));
  }
  if (provenance.size() != labels.size() || row_ids.size() != labels.size()) {
    throw ShapeError("dataset: per-row metadata length mismatch");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= class_names.size()) {
      throw DomainError("dataset: label " + std::to_string(y) + " outside [0, " +
                        std::to_string(class_names.size()) + ")");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.width = width;
  out.class_names = class_names;
  out.features.reserve(indices.size() * width);
  for (std::size_t i : indices) {
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
    out.provenance.push_back(provenance[i]);
    out.row_ids.push_back(row_ids[i]);
  }
  return out;
}

Tensor Dataset::as_tensor() const { return Tensor({rows(), width, 1}, features); }

Tensor Dataset::batch(std::span<const std::size_t> indices) const {
  std::vector<double> values;
  values.reserve(indices.size() * width);
  for (std::size_t i : indices) {
    const auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return Tensor({indices.size(), width, 1}, std::move(values));
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

Composition Dataset::composition() const {
  Composition c;
  c.real_per_class.assign(class_names.size(), 0);
  c.synthetic_per_class.assign(class_names.size(), 0);
  for (std::size_t i = 0; i < rows(); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    if (provenance[i] == Provenance::real) {
      ++c.real;
      ++c.real_per_class[y];
    } else {
      ++c.synthetic;
      ++c.synthetic_per_class[y];
    }
  }
  return c;
}

Dataset augment(const Dataset& train, const std::map<int, Tensor>& synthetic_per_class) {
  Dataset out = train;
  for (const auto& [label, samples] : synthetic_per_class) {
    if (label < 0 || static_cast<std::size_t>(label) >= train.class_count()) {
      throw DomainError("augment: synthetic class " + std::to_string(label) + " outside [0, " +
                        std::to_string(train.class_count()) + ")");
    }
    const bool ok_shape =
        (samples.rank() == 2 && samples.dim(1) == train.width) ||
        (samples.rank() == 3 && samples.dim(1) == train.width && samples.dim(2) == 1);
    if (!ok_shape) {
      throw ShapeError("augment: synthetic samples " + shape_string(samples.shape()) +
                       " do not match feature width " + std::to_string(train.width));
    }
    const std::size_t n = samples.dim(0);
    out.features.insert(out.features.end(), samples.values().begin(), samples.values().end());
    out.labels.insert(out.labels.end(), n, label);
    out.provenance.insert(out.provenance.end(), n, Provenance::synthetic);
    out.row_ids.insert(out.row_ids.end(), n, Dataset::kSyntheticRow);
  }
  return out;
}

// ---------------------------------------------------------------- pipeline --

namespace {

std::size_t label_column(const RawTable& table, DatasetKind kind) {
  if (table.column_count() < 2) throw DataError("table needs at least one feature and a label");
  const std::size_t last = table.column_count() - 1;
  if (kind == DatasetKind::kdd) return last;
  return table.find_column("label").value_or(last);
}

std::vector<std::size_t> categorical_columns(const RawTable& table, DatasetKind kind,
                                             std::span<const std::size_t> features) {
  if (kind == DatasetKind::kdd) {
    // protocol_type, service, flag
    return {1, 2, 3};
  }
  if (kind == DatasetKind::cicids) return {};
  std::vector<std::size_t> cols;
  for (std::size_t col : features) {
    const bool text = std::any_of(table.rows.begin(), table.rows.end(), [col](const auto& row) {
      return !trim(row[col]).empty() && !parse_number(row[col]);
    });
    if (text) cols.push_back(col);
  }
  return cols;
}

}  // namespace

PreparedData prepare(const RawTable& input, const PrepareOptions& options) {
  PreparedData out;
  out.stats.loaded_rows = input.row_count();
  RawTable table = dedupe(input);
  out.stats.duplicate_rows = input.row_count() - table.row_count();
  if (table.row_count() == 0) throw DataError("no data rows");
  if (options.kind == DatasetKind::kdd && table.column_count() < 5) {
    throw DataError("KDD records need at least 5 columns, found " +
                    std::to_string(table.column_count()));
  }

  const std::size_t label_col = label_column(table, options.kind);
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    if (c != label_col) feature_cols.push_back(c);
  }

  // Labels and class names.
  std::vector<int> labels(table.row_count());
  std::vector<std::string> class_names;
  switch (options.kind) {
    case DatasetKind::kdd: {
      const KddCategoryMap& map = options.kdd_map ? *options.kdd_map : KddCategoryMap::builtin();
      for (std::size_t r = 0; r < table.row_count(); ++r) {
        labels[r] = map.category(table.rows[r][label_col]);
      }
      class_names = KddCategoryMap::category_names();
      break;
    }
    case DatasetKind::cicids:
      for (std::size_t r = 0; r < table.row_count(); ++r) {
        labels[r] = binarize_cicids_label(table.rows[r][label_col]);
      }
      class_names = {"BENIGN", "ATTACK"};
      break;
    case DatasetKind::generic: {
      std::set<std::string, std::less<>> distinct;
      for (const auto& row : table.rows) distinct.emplace(trim(row[label_col]));
      class_names.assign(distinct.begin(), distinct.end());
      for (std::size_t r = 0; r < table.row_count(); ++r) {
        const auto it = distinct.find(trim(table.rows[r][label_col]));
        labels[r] = static_cast<int>(std::distance(distinct.begin(), it));
      }
      break;
    }
  }

  // Optional stratified slice; ids index the deduplicated table.
  std::vector<std::size_t> ids =
      stratified_subsample(labels, options.max_rows, derive_seed(options.seed, 1));
  out.stats.subsampled_rows = table.row_count() - ids.size();
  if (ids.size() != table.row_count()) {
    RawTable slice;
    slice.columns = table.columns;
    std::vector<int> slice_labels;
    for (std::size_t id : ids) {
      slice.rows.push_back(table.rows[id]);
      slice_labels.push_back(labels[id]);
    }
    table = std::move(slice);
    labels = std::move(slice_labels);
  }

  const auto cat_cols = categorical_columns(table, options.kind, feature_cols);
  out.encoders = fit_label_encoders(table, cat_cols);
  out.audit.push_back({"label_encoder_fit", "all", ids});

  NumericTable numeric = apply_label_encoders(table, out.encoders, feature_cols);
  out.stats.dropped_rows = numeric.dropped_rows;
  if (numeric.dropped_rows > 0) {
    out.warnings.push_back(std::to_string(numeric.dropped_rows) +
                           " row(s) dropped for non-numeric values in numeric columns");
  }
  out.encoded_columns = numeric.columns;
  const std::size_t width = numeric.width;
  std::vector<int> kept_labels;
  std::vector<std::size_t> kept_ids;
  for (std::size_t r : numeric.source_rows) {
    kept_labels.push_back(labels[r]);
    kept_ids.push_back(ids[r]);
  }
  if (kept_labels.empty()) throw DataError("no usable rows after numeric conversion");

  SplitIndices split = stratified_split(kept_labels, options.split_ratio,
                                        derive_seed(options.seed, 2));
  for (auto& w : split.warnings) out.warnings.push_back(std::move(w));
  if (split.test.empty()) throw DataError("split produced an empty test set");

  auto gather = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> v;
    v.reserve(idx.size() * width);
    for (std::size_t i : idx) {
      v.insert(v.end(), numeric.values.begin() + static_cast<std::ptrdiff_t>(i * width),
               numeric.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
    }
    return v;
  };
  auto ids_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> v;
    v.reserve(idx.size());
    for (std::size_t i : idx) v.push_back(kept_ids[i]);
    return v;
  };
  const std::vector<double> train_raw = gather(split.train);
  const std::vector<double> test_raw = gather(split.test);
  const auto train_ids = ids_of(split.train);
  const auto test_ids = ids_of(split.test);

  out.scaler = fit_minmax(train_raw, width);
  out.audit.push_back({"scaler_fit", "train", train_ids});
  const std::vector<double> train_scaled = apply_minmax(train_raw, out.scaler);
  const std::vector<double> test_scaled = apply_minmax(test_raw, out.scaler);

  std::size_t target = options.feature_width;
  if (target == 0) target = default_feature_width(options.kind);
  if (target == 0) target = width;
  out.selection = fit_variance_selection(train_scaled, width, target);
  out.audit.push_back({"feature_selection_fit", "train", train_ids});
  for (std::size_t c : out.selection.columns) out.feature_names.push_back(numeric.columns[c]);

  auto build = [&](const std::vector<double>& scaled, const std::vector<std::size_t>& idx,
                   const std::vector<std::size_t>& row_ids) {
    Dataset d;
    d.width = out.selection.columns.size();
    d.features = apply_selection(scaled, out.selection);
    for (std::size_t i : idx) d.labels.push_back(kept_labels[i]);
    d.class_names = class_names;
    d.provenance.assign(idx.size(), Provenance::real);
    d.row_ids = row_ids;
    d.validate();
    return d;
  };
  out.train = build(train_scaled, split.train, train_ids);
  out.test = build(test_scaled, split.test, test_ids);
  out.stats.test_values_out_of_range = static_cast<std::size_t>(
      std::count_if(out.test.features.begin(), out.test.features.end(),
                    [](double v) { return v < 0.0 || v > 1.0; }));
  return out;
}

}  // namespace idsgan::data
