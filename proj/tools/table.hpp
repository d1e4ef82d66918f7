#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fermibath::cli {

// A result table: ordered metadata, fixed column order, numeric rows.
struct Table {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  std::string config;  // canonical configuration echoed into the header
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// RFC 4180 field quoting
std::string csv_field(const std::string& s);
std::string format_number(double v);

// '#'-prefixed metadata and configuration lines, header row, one line per row.
void write_csv(std::ostream& os, const Table& t);
// {"meta": {..., "config": "..."}, "columns": [...], "rows": [{column: value}]}; NaN as null.
void write_json(std::ostream& os, const Table& t);

}  // namespace fermibath::cli
