#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "idsgan/data.hpp"
#include "idsgan/history.hpp"

namespace idsgan::metrics {

/// counts[i * classes + j] = samples of true class i predicted as j.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;
  std::vector<std::string> class_names;

  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * classes + predicted];
  }
  std::uint64_t total() const;
  std::uint64_t true_positives(std::size_t c) const { return at(c, c); }
  std::uint64_t false_positives(std::size_t c) const;
  std::uint64_t false_negatives(std::size_t c) const;
  std::uint64_t true_negatives(std::size_t c) const;
  /// Row sum: number of samples whose true class is c.
  std::uint64_t support(std::size_t c) const;
};

/// Class names default to "0".."K-1". Labels outside [0, K) throw DomainError;
/// length mismatch throws UsageError.
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          std::size_t classes, std::vector<std::string> class_names = {});

/// trace / total. An empty matrix throws UsageError.
double accuracy(const ConfusionMatrix& cm);

/// One-vs-rest TP / (TP + FP); 0 when nothing was predicted as `c`.
double precision(const ConfusionMatrix& cm, std::size_t c);
/// One-vs-rest TP / (TP + FN); 0 when `c` never occurs.
double recall(const ConfusionMatrix& cm, std::size_t c);
/// 2pr / (p + r); 0 when p + r == 0.
double f1(double precision, double recall);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  /// Set when a zero denominator forced precision or recall to 0.
  bool undefined = false;
};

std::vector<ClassMetrics> per_class(const ConfusionMatrix& cm);

enum class Average { macro, weighted };

/// Macro: unweighted mean. Weighted: support-weighted mean (all-zero support
/// gives zeros). The result's support is the summed support. An empty list
/// throws UsageError.
ClassMetrics aggregate(std::span<const ClassMetrics> per_class, Average mode);

struct EvaluationReport {
  std::string run;  // "baseline", "augmented", ...
  ConfusionMatrix confusion;
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  ClassMetrics macro;
  ClassMetrics weighted;
  TrainHistory history;
  std::string config_digest;
  data::Composition composition;  // of the training set
  std::vector<std::string> warnings;
};

EvaluationReport make_report(std::string run, const ConfusionMatrix& cm, TrainHistory history,
                             std::string config_digest, data::Composition composition);

nlohmann::json to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);

struct ComparisonRow {
  std::string metric;
  double before = 0.0;
  double after = 0.0;
  double delta() const { return after - before; }
};

/// accuracy, macro/weighted precision/recall/f1, then per-class recall and f1.
std::vector<ComparisonRow> compare(const EvaluationReport& before, const EvaluationReport& after);

/// Writes into `dir` (created if needed), each file prefixed with report.run:
///   <run>_confusion.csv   header "true\\predicted,<names...>", one row per class
///   <run>_metrics.json    full-precision report
///   <run>_metrics.txt     aligned table at 4 decimals
///   <run>_curves.csv      epoch,train_loss,train_accuracy,val_loss,val_accuracy
/// Returns the written paths. Failures throw IoError.
std::vector<std::filesystem::path> render_report(const EvaluationReport& report,
                                                 const std::filesystem::path& dir);

/// comparison.csv: metric,before,after,delta with full precision, plus
/// comparison.txt at 4 decimals.
std::vector<std::filesystem::path> render_comparison(const EvaluationReport& before,
                                                     const EvaluationReport& after,
                                                     const std::filesystem::path& dir);

/// Reads a metrics.json written by render_report.
EvaluationReport load_report(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_exact(double value);
/// Fixed notation with 4 decimals.
std::string format_4dp(double value);

}  // namespace idsgan::metrics
