#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "table.hpp"

namespace fermibath::cli {

// A library call failed for numerical reasons; what() names the operation.
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct NamedTable {
  std::vector<std::string> label;  // varying model keys, empty for a single run
  Table table;
};

std::vector<NamedTable> run_evolve(const RunConfig& c);
std::vector<NamedTable> run_scan(const RunConfig& c);
std::vector<NamedTable> run_oracle_compare(const RunConfig& c);
std::vector<NamedTable> run_kernel_dump(const RunConfig& c);

std::vector<NamedTable> run_command(const std::string& command, const RunConfig& c);

// Writes one table to output.path (or stdout for "-"); several tables go into
// the directory output.path as <command>_<label>.<format>. Returns the files written.
std::vector<std::string> write_outputs(const std::string& command, const RunConfig& c,
                                       const std::vector<NamedTable>& tables);

}  // namespace fermibath::cli
