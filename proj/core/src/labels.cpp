#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "idsgan/data.hpp"
#include "idsgan/errors.hpp"

namespace idsgan::data {

namespace detail {
extern const std::string_view kBuiltinKddCategories;
}

namespace {

std::string normalize_label(std::string_view raw) {
  std::string_view s = trim(raw);
  if (!s.empty() && s.back() == '.') s.remove_suffix(1);
  std::string out(trim(s));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

const std::vector<std::string>& KddCategoryMap::category_names() {
  static const std::vector<std::string> names{"normal", "DoS", "U2R", "Probe", "R2L"};
  return names;
}

KddCategoryMap KddCategoryMap::parse(std::string_view text, const std::string& source) {
  KddCategoryMap map;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  const auto& categories = category_names();
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name, category, extra;
    if (!(fields >> name)) continue;
    if (!(fields >> category) || (fields >> extra)) {
      throw ParseError(source + ":" + std::to_string(line_no) +
                       ": expected '<label> <category>'");
    }
    const auto it = std::find(categories.begin(), categories.end(), category);
    if (it == categories.end()) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": unknown category '" +
                       category + "'");
    }
    map.names_[normalize_label(name)] = static_cast<int>(it - categories.begin());
  }
  if (map.names_.empty()) throw ParseError(source + ": no label mappings");
  return map;
}

KddCategoryMap KddCategoryMap::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

const KddCategoryMap& KddCategoryMap::builtin() {
  static const KddCategoryMap map = parse(detail::kBuiltinKddCategories, "<builtin>");
  return map;
}

int KddCategoryMap::category(std::string_view raw_label) const {
  const std::string key = normalize_label(raw_label);
  const auto it = names_.find(key);
  if (it == names_.end()) {
    throw DomainError("unknown KDD label '" + std::string(trim(raw_label)) + "'");
  }
  return it->second;
}

int map_kdd_label(std::string_view raw_label, const KddCategoryMap& map) {
  return map.category(raw_label);
}

int binarize_cicids_label(std::string_view raw_label) {
  return normalize_label(raw_label) == "benign" ? 0 : 1;
}

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kdd: return "kdd";
    case DatasetKind::cicids: return "cicids";
    case DatasetKind::generic: return "generic";
  }
  return "generic";
}

DatasetKind dataset_kind_from_string(std::string_view name) {
  for (auto kind : {DatasetKind::kdd, DatasetKind::cicids, DatasetKind::generic}) {
    if (to_string(kind) == name) return kind;
  }
  throw UsageError("unknown dataset kind '" + std::string(name) + "' (kdd, cicids, generic)");
}

std::size_t default_feature_width(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kdd: return 30;
    case DatasetKind::cicids: return 78;
    case DatasetKind::generic: return 0;
  }
  return 0;
}

}  // namespace idsgan::data
