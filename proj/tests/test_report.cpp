#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <sstream>

#include "idsgan/errors.hpp"
#include "idsgan/metrics.hpp"
#include "support.hpp"

namespace idsgan::metrics {
namespace {

using idsgan::testing::read_file;
using idsgan::testing::scratch_dir;

EvaluationReport sample_report(const std::string& run, std::uint64_t seed, std::size_t epochs) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> label(0, 2);
  std::vector<int> y(90), p(90);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = label(rng);
    p[i] = i % 3 == 0 ? label(rng) : y[i];
  }
  TrainHistory h;
  h.initial_train_loss = 1.1 + 1.0 / 3.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t e = 0; e < epochs; ++e) h.epochs.push_back({u(rng), u(rng), u(rng), u(rng)});
  data::Composition c{120, 30, {40, 40, 40}, {0, 0, 30}};
  return make_report(run, confusion(y, p, 3, {"normal", "dos", "probe, slow"}), h, "abc123", c);
}

std::vector<std::vector<std::string>> read_csv_lines(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double number(const std::string& s) {
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

TEST(Report, JsonRoundTripIsExact) {
  const EvaluationReport r = sample_report("baseline", 1, 4);
  const auto dir = scratch_dir("report_roundtrip");
  render_report(r, dir);
  const EvaluationReport back = load_report(dir / "baseline_metrics.json");
  EXPECT_EQ(to_json(back), to_json(r));
  EXPECT_EQ(back.accuracy, r.accuracy);
  EXPECT_EQ(back.macro.f1, r.macro.f1);
  EXPECT_EQ(back.per_class[2].precision, r.per_class[2].precision);
  EXPECT_EQ(back.history.epochs[3].val_loss, r.history.epochs[3].val_loss);
  EXPECT_EQ(back.history.initial_train_loss, r.history.initial_train_loss);
  EXPECT_EQ(back.confusion.counts, r.confusion.counts);
}

TEST(Report, NanSurvivesRoundTrip) {
  EvaluationReport r = sample_report("baseline", 1, 1);
  r.history.initial_train_loss = std::nan("");
  const EvaluationReport back = report_from_json(to_json(r));
  EXPECT_TRUE(std::isnan(back.history.initial_train_loss));
}

TEST(Report, MalformedJsonIsParseError) {
  EXPECT_THROW(report_from_json(nlohmann::json{{"run", "x"}}), ParseError);
  const auto dir = scratch_dir("report_malformed");
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(load_report(dir / "bad.json"), ParseError);
  EXPECT_THROW(load_report(dir / "missing.json"), IoError);
}

TEST(Report, FilesWritten) {
  const auto dir = scratch_dir("report_files");
  const auto written = render_report(sample_report("augmented", 2, 3), dir);
  EXPECT_EQ(written.size(), 4u);
  for (const auto& path : written) EXPECT_TRUE(std::filesystem::exists(path)) << path;
  const std::string txt = read_file(dir / "augmented_metrics.txt");
  EXPECT_NE(txt.find("macro avg"), std::string::npos);
  EXPECT_NE(txt.find("weighted avg"), std::string::npos);
}

TEST(Report, ConfusionCsvLayout) {
  const EvaluationReport r = sample_report("baseline", 3, 1);
  const auto dir = scratch_dir("report_confusion");
  render_report(r, dir);
  const std::string text = read_file(dir / "baseline_confusion.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "true\\predicted,normal,dos,\"probe, slow\"");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, "normal," + std::to_string(r.confusion.at(0, 0)) + "," +
                      std::to_string(r.confusion.at(0, 1)) + "," +
                      std::to_string(r.confusion.at(0, 2)));
}

TEST(Report, CurveRowsEqualEpochs) {
  for (std::size_t epochs : {0u, 1u, 10u}) {
    const auto dir = scratch_dir("report_curves");
    render_report(sample_report("baseline", 4, epochs), dir);
    const auto rows = read_csv_lines(dir / "baseline_curves.csv");
    ASSERT_EQ(rows.size(), epochs + 1);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"epoch", "train_loss", "train_accuracy",
                                                 "val_loss", "val_accuracy"}));
  }
}

TEST(Report, UnwritableDirectoryIsIoError) {
  const auto dir = scratch_dir("report_unwritable");
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(render_report(sample_report("baseline", 1, 1), dir / "file" / "sub"), IoError);
}

TEST(Comparison, DeltaIsAfterMinusBefore) {
  const EvaluationReport before = sample_report("baseline", 5, 2);
  const EvaluationReport after = sample_report("augmented", 6, 2);
  const auto dir = scratch_dir("report_comparison");
  render_comparison(before, after, dir);
  const auto rows = read_csv_lines(dir / "comparison.csv");
  const auto expected = compare(before, after);
  ASSERT_EQ(rows.size(), expected.size() + 1);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"metric", "before", "after", "delta"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const double b = number(row[row.size() - 3]);
    const double a = number(row[row.size() - 2]);
    const double d = number(row[row.size() - 1]);
    EXPECT_EQ(b, expected[i - 1].before);
    EXPECT_EQ(a, expected[i - 1].after);
    EXPECT_EQ(d, a - b);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "comparison.txt"));
}

TEST(Comparison, RowsCoverAggregatesAndEveryClass) {
  const auto rows = compare(sample_report("a", 1, 1), sample_report("b", 2, 1));
  EXPECT_EQ(rows.size(), 7u + 2u * 3u);
  EXPECT_EQ(rows[0].metric, "accuracy");
  EXPECT_EQ(rows[7].metric, "recall[normal]");
}

TEST(Comparison, DifferentClassesRejected) {
  EvaluationReport other = sample_report("b", 2, 1);
  other.confusion.class_names[0] = "benign";
  EXPECT_THROW(compare(sample_report("a", 1, 1), other), UsageError);
}

TEST(Format, FourDecimalsAndExact) {
  EXPECT_EQ(format_4dp(0.97886), "0.9789");
  EXPECT_EQ(format_4dp(1.0), "1.0000");
  EXPECT_EQ(number(format_exact(0.1 + 0.2)), 0.1 + 0.2);
}

}  // namespace
}  // namespace idsgan::metrics
