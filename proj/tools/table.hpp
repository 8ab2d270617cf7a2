#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace nlspin::cli {

inline constexpr const char* kToolVersion = "nlspin 1.0.0";

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::string> units;  // one per column
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

// Everything written ahead of the rows.
struct Document {
  std::string command;
  nlohmann::ordered_json config;
  std::vector<std::string> notes;  // extra "# key: value" lines
  Table table;
};

enum class Format { Csv, Json };

std::string render(const Document& doc, Format format, const std::string& timestamp);

// Writes to path via a temporary sibling and renames on success; the
// temporary is removed if anything fails. An empty path writes to stdout.
void write_document(const Document& doc, Format format, const std::string& path);

}  // namespace nlspin::cli
