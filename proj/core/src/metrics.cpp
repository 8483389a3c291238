#include "idsgan/metrics.hpp"

#include <numeric>

#include "idsgan/errors.hpp"

namespace idsgan::metrics {

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::false_positives(std::size_t c) const {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < classes; ++i) {
    if (i != c) sum += at(i, c);
  }
  return sum;
}

std::uint64_t ConfusionMatrix::false_negatives(std::size_t c) const {
  std::uint64_t sum = 0;
  for (std::size_t j = 0; j < classes; ++j) {
    if (j != c) sum += at(c, j);
  }
  return sum;
}

std::uint64_t ConfusionMatrix::true_negatives(std::size_t c) const {
  return total() - true_positives(c) - false_positives(c) - false_negatives(c);
}

std::uint64_t ConfusionMatrix::support(std::size_t c) const {
  return true_positives(c) + false_negatives(c);
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          std::size_t classes, std::vector<std::string> class_names) {
  if (y_true.size() != y_pred.size()) {
    throw UsageError("confusion: " + std::to_string(y_true.size()) + " true labels vs " +
                     std::to_string(y_pred.size()) + " predictions");
  }
  if (classes == 0) throw UsageError("confusion: class count must be >= 1");
  if (class_names.empty()) {
    for (std::size_t c = 0; c < classes; ++c) class_names.push_back(std::to_string(c));
  } else if (class_names.size() != classes) {
    throw UsageError("confusion: " + std::to_string(class_names.size()) + " names for " +
                     std::to_string(classes) + " classes");
  }
  ConfusionMatrix cm{classes, std::vector<std::uint64_t>(classes * classes, 0),
                     std::move(class_names)};
  const auto check = [classes](int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw DomainError("confusion: label " + std::to_string(label) + " outside [0, " +
                        std::to_string(classes) + ")");
    }
    return static_cast<std::size_t>(label);
  };
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++cm.counts[check(y_true[i]) * classes + check(y_pred[i])];
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw UsageError("accuracy: empty confusion matrix");
  std::uint64_t trace = 0;
  for (std::size_t c = 0; c < cm.classes; ++c) trace += cm.at(c, c);
  return static_cast<double>(trace) / static_cast<double>(total);
}

double precision(const ConfusionMatrix& cm, std::size_t c) {
  if (c >= cm.classes) throw UsageError("precision: class index out of range");
  const std::uint64_t denom = cm.true_positives(c) + cm.false_positives(c);
  return denom == 0 ? 0.0 : static_cast<double>(cm.true_positives(c)) / static_cast<double>(denom);
}

double recall(const ConfusionMatrix& cm, std::size_t c) {
  if (c >= cm.classes) throw UsageError("recall: class index out of range");
  const std::uint64_t denom = cm.true_positives(c) + cm.false_negatives(c);
  return denom == 0 ? 0.0 : static_cast<double>(cm.true_positives(c)) / static_cast<double>(denom);
}

double f1(double p, double r) {
  const double sum = p + r;
  return sum == 0.0 ? 0.0 : 2.0 * p * r / sum;
}

std::vector<ClassMetrics> per_class(const ConfusionMatrix& cm) {
  std::vector<ClassMetrics> out;
  out.reserve(cm.classes);
  for (std::size_t c = 0; c < cm.classes; ++c) {
    ClassMetrics m;
    m.precision = precision(cm, c);
    m.recall = recall(cm, c);
    m.f1 = f1(m.precision, m.recall);
    m.support = cm.support(c);
    m.undefined = cm.true_positives(c) + cm.false_positives(c) == 0 || m.support == 0;
    out.push_back(m);
  }
  return out;
}

ClassMetrics aggregate(std::span<const ClassMetrics> per_class, Average mode) {
  if (per_class.empty()) throw UsageError("aggregate: empty metric list");
  ClassMetrics out;
  double weight_sum = 0.0;
  for (const ClassMetrics& m : per_class) {
    const double w = mode == Average::macro ? 1.0 : static_cast<double>(m.support);
    out.precision += w * m.precision;
    out.recall += w * m.recall;
    out.f1 += w * m.f1;
    out.support += m.support;
    out.undefined = out.undefined || m.undefined;
    weight_sum += w;
  }
  if (weight_sum == 0.0) return ClassMetrics{0.0, 0.0, 0.0, 0, out.undefined};
  out.precision /= weight_sum;
  out.recall /= weight_sum;
  out.f1 /= weight_sum;
  return out;
}

EvaluationReport make_report(std::string run, const ConfusionMatrix& cm, TrainHistory history,
                             std::string config_digest, data::Composition composition) {
  EvaluationReport report;
  report.run = std::move(run);
  report.confusion = cm;
  report.per_class = per_class(cm);
  report.accuracy = accuracy(cm);
  report.macro = aggregate(report.per_class, Average::macro);
  report.weighted = aggregate(report.per_class, Average::weighted);
  report.history = std::move(history);
  report.config_digest = std::move(config_digest);
  report.composition = std::move(composition);
  for (std::size_t c = 0; c < cm.classes; ++c) {
    if (report.per_class[c].undefined) {
      report.warnings.push_back("class '" + cm.class_names[c] +
                                "': zero denominator, precision/recall reported as 0");
    }
  }
  return report;
}

std::vector<ComparisonRow> compare(const EvaluationReport& before, const EvaluationReport& after) {
  if (before.confusion.class_names != after.confusion.class_names) {
    throw UsageError("compare: reports cover different classes");
  }
  std::vector<ComparisonRow> rows{
      {"accuracy", before.accuracy, after.accuracy},
      {"macro_precision", before.macro.precision, after.macro.precision},
      {"macro_recall", before.macro.recall, after.macro.recall},
      {"macro_f1", before.macro.f1, after.macro.f1},
      {"weighted_precision", before.weighted.precision, after.weighted.precision},
      {"weighted_recall", before.weighted.recall, after.weighted.recall},
      {"weighted_f1", before.weighted.f1, after.weighted.f1},
  };
  const auto& names = before.confusion.class_names;
  for (std::size_t c = 0; c < names.size(); ++c) {
    rows.push_back({"recall[" + names[c] + "]", before.per_class[c].recall,
                    after.per_class[c].recall});
    rows.push_back({"f1[" + names[c] + "]", before.per_class[c].f1, after.per_class[c].f1});
  }
  return rows;
}

}  // namespace idsgan::metrics
