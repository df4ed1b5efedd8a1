#pragma once

#include <string>
#include <vector>

namespace mcqmc {

/// Plain comma-separated table: '#' lines are kept as comments, the first
/// other line is the header. No quoting.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Throws Config if the file is missing or a row has the wrong width.
CsvTable read_csv(const std::string& path);
double parse_double(const std::string& field, const std::string& context);

}  // namespace mcqmc
