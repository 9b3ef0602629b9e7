#include "rroff/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace rroff::csv {

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("csv::format: conversion failed");
  return std::string(buf.data(), ptr);
}

std::vector<std::string> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field) {
  if (field == "inf") return INFINITY;
  if (field == "-inf") return -INFINITY;
  if (field == "nan") return NAN;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
    throw std::invalid_argument("not a number: '" + std::string(field) + "'");
  return v;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::invalid_argument("no column named '" + std::string(name) + "'");
}

std::vector<double> Table::numeric_column(std::string_view name) const {
  const auto c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (c >= rows[r].size())
      throw std::invalid_argument("row " + std::to_string(r + 2) + " is missing column '" + std::string(name) + "'");
    out.push_back(parse_double(rows[r][c]));
  }
  return out;
}

Table read(std::istream& is) {
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    if (!have_header) {
      t.header = split(line);
      have_header = true;
    } else {
      t.rows.push_back(split(line));
    }
  }
  if (!have_header) throw std::invalid_argument("empty CSV input");
  return t;
}

}  // namespace rroff::csv
