#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "idsgan/errors.hpp"
#include "idsgan/metrics.hpp"

namespace idsgan::metrics {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json optional_number(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double number_or_nan(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

json to_json(const ClassMetrics& m) {
  return json{{"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"support", m.support},
              {"undefined", m.undefined}};
}

ClassMetrics class_metrics_from_json(const json& j) {
  return ClassMetrics{j.at("precision").get<double>(), j.at("recall").get<double>(),
                      j.at("f1").get<double>(), j.at("support").get<std::uint64_t>(),
                      j.at("undefined").get<bool>()};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_exact(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

std::string format_4dp(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

json to_json(const EvaluationReport& r) {
  json history_epochs = json::array();
  for (const EpochRecord& e : r.history.epochs) {
    history_epochs.push_back({{"train_loss", optional_number(e.train_loss)},
                              {"train_accuracy", optional_number(e.train_accuracy)},
                              {"val_loss", optional_number(e.val_loss)},
                              {"val_accuracy", optional_number(e.val_accuracy)}});
  }
  json per_class = json::array();
  for (const ClassMetrics& m : r.per_class) per_class.push_back(to_json(m));
  return json{
      {"run", r.run},
      {"class_names", r.confusion.class_names},
      {"confusion", r.confusion.counts},
      {"accuracy", r.accuracy},
      {"per_class", per_class},
      {"macro", to_json(r.macro)},
      {"weighted", to_json(r.weighted)},
      {"history",
       {{"initial_train_loss", optional_number(r.history.initial_train_loss)},
        {"epochs", history_epochs}}},
      {"config_digest", r.config_digest},
      {"composition",
       {{"real", r.composition.real},
        {"synthetic", r.composition.synthetic},
        {"real_per_class", r.composition.real_per_class},
        {"synthetic_per_class", r.composition.synthetic_per_class}}},
      {"warnings", r.warnings},
  };
}

EvaluationReport report_from_json(const json& j) {
  try {
    EvaluationReport r;
    r.run = j.at("run").get<std::string>();
    r.confusion.class_names = j.at("class_names").get<std::vector<std::string>>();
    r.confusion.classes = r.confusion.class_names.size();
    r.confusion.counts = j.at("confusion").get<std::vector<std::uint64_t>>();
    if (r.confusion.counts.size() != r.confusion.classes * r.confusion.classes) {
      throw ParseError("report: confusion matrix size does not match class count");
    }
    r.accuracy = j.at("accuracy").get<double>();
    for (const json& m : j.at("per_class")) r.per_class.push_back(class_metrics_from_json(m));
    r.macro = class_metrics_from_json(j.at("macro"));
    r.weighted = class_metrics_from_json(j.at("weighted"));
    const json& h = j.at("history");
    r.history.initial_train_loss = number_or_nan(h.at("initial_train_loss"));
    for (const json& e : h.at("epochs")) {
      r.history.epochs.push_back({number_or_nan(e.at("train_loss")),
                                  number_or_nan(e.at("train_accuracy")),
                                  number_or_nan(e.at("val_loss")),
                                  number_or_nan(e.at("val_accuracy"))});
    }
    r.config_digest = j.at("config_digest").get<std::string>();
    const json& c = j.at("composition");
    r.composition.real = c.at("real").get<std::size_t>();
    r.composition.synthetic = c.at("synthetic").get<std::size_t>();
    r.composition.real_per_class = c.at("real_per_class").get<std::vector<std::size_t>>();
    r.composition.synthetic_per_class =
        c.at("synthetic_per_class").get<std::vector<std::size_t>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

std::vector<fs::path> render_report(const EvaluationReport& r, const fs::path& dir) {
  ensure_dir(dir);
  const auto& names = r.confusion.class_names;
  std::vector<fs::path> written;

  std::ostringstream cm;
  cm << "true\\predicted";
  for (const auto& n : names) cm << ',' << csv_cell(n);
  cm << '\n';
  for (std::size_t i = 0; i < r.confusion.classes; ++i) {
    cm << csv_cell(names[i]);
    for (std::size_t j = 0; j < r.confusion.classes; ++j) cm << ',' << r.confusion.at(i, j);
    cm << '\n';
  }
  written.push_back(dir / (r.run + "_confusion.csv"));
  write_file(written.back(), cm.str());

  written.push_back(dir / (r.run + "_metrics.json"));
  write_file(written.back(), to_json(r).dump(2) + "\n");

  std::size_t name_width = 12;
  for (const auto& n : names) name_width = std::max(name_width, n.size());
  const auto pad = [](std::string s, std::size_t width) {
    s.resize(std::max(width, s.size()), ' ');
    return s;
  };
  std::ostringstream txt;
  txt << "run: " << r.run << "\nconfig digest: " << r.config_digest
      << "\naccuracy: " << format_4dp(r.accuracy) << "\ntraining rows: " << r.composition.real
      << " real, " << r.composition.synthetic << " synthetic\n\n";
  txt << pad("class", name_width) << "  precision  recall     f1         support\n";
  const auto line = [&](const std::string& name, const ClassMetrics& m) {
    txt << pad(name, name_width) << "  " << pad(format_4dp(m.precision), 9) << "  "
        << pad(format_4dp(m.recall), 9) << "  " << pad(format_4dp(m.f1), 9) << "  " << m.support
        << '\n';
  };
  for (std::size_t c = 0; c < names.size(); ++c) line(names[c], r.per_class[c]);
  line("macro avg", r.macro);
  line("weighted avg", r.weighted);
  for (const auto& w : r.warnings) txt << "warning: " << w << '\n';
  written.push_back(dir / (r.run + "_metrics.txt"));
  write_file(written.back(), txt.str());

  std::ostringstream curves;
  curves << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
  for (std::size_t e = 0; e < r.history.epochs.size(); ++e) {
    const EpochRecord& rec = r.history.epochs[e];
    curves << e + 1 << ',' << format_exact(rec.train_loss) << ','
           << format_exact(rec.train_accuracy) << ',' << format_exact(rec.val_loss) << ','
           << format_exact(rec.val_accuracy) << '\n';
  }
  written.push_back(dir / (r.run + "_curves.csv"));
  write_file(written.back(), curves.str());
  return written;
}

std::vector<fs::path> render_comparison(const EvaluationReport& before,
                                        const EvaluationReport& after, const fs::path& dir) {
  ensure_dir(dir);
  const auto rows = compare(before, after);
  std::ostringstream csv, txt;
  csv << "metric,before,after,delta\n";
  txt << "comparison: " << before.run << " -> " << after.run << "\n\n";
  for (const ComparisonRow& row : rows) {
    csv << csv_cell(row.metric) << ',' << format_exact(row.before) << ','
        << format_exact(row.after) << ',' << format_exact(row.delta()) << '\n';
    std::string name = row.metric;
    name.resize(std::max<std::size_t>(28, name.size()), ' ');
    txt << name << ' ' << format_4dp(row.before) << "  " << format_4dp(row.after) << "  "
        << (row.delta() >= 0 ? "+" : "") << format_4dp(row.delta()) << '\n';
  }
  std::vector<fs::path> written{dir / "comparison.csv", dir / "comparison.txt"};
  write_file(written[0], csv.str());
  write_file(written[1], txt.str());
  return written;
}

EvaluationReport load_report(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return report_from_json(j);
}

}  // namespace idsgan::metrics
