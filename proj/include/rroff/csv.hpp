#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace rroff::csv {

// Shortest round-trip decimal form; identical input always yields identical text.
std::string format(double v);

std::vector<std::string> split(std::string_view line);

double parse_double(std::string_view field);

// Header plus rows; blank lines are skipped, '#' lines are comments.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws std::invalid_argument naming the column when absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;
};

Table read(std::istream& is);

}  // namespace rroff::csv
