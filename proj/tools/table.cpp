#include "table.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace fermibath::cli {

std::string csv_field(const std::string& s) {
  const bool quote = s.find_first_of(",\"\r\n") != std::string::npos ||
                     (!s.empty() && (s.front() == ' ' || s.back() == ' '));
  if (!quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string meta_text(const nlohmann::ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_number(v.get<double>());
  return v.dump();
}

}  // namespace

void write_csv(std::ostream& os, const Table& t) {
  for (const auto& [key, value] : t.meta.items()) os << "# " << key << ": " << meta_text(value) << "\n";
  if (!t.config.empty()) {
    os << "# config:\n";
    std::istringstream lines(t.config);
    std::string line;
    while (std::getline(lines, line)) os << "#   " << line << "\n";
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << "\n";
  }
}

void write_json(std::ostream& os, const Table& t) {
  nlohmann::ordered_json doc;
  doc["meta"] = t.meta;
  if (!t.config.empty()) doc["meta"]["config"] = t.config;
  doc["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
      if (std::isfinite(row[i]))
        r[t.columns[i]] = row[i];
      else
        r[t.columns[i]] = nullptr;
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << "\n";
}

}  // namespace fermibath::cli
