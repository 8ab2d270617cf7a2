#include "table.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace nlspin::cli {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string render(const Document& doc, Format format, const std::string& timestamp) {
  const auto& t = doc.table;
  std::ostringstream os;
  if (format == Format::Json) {
    nlohmann::ordered_json out;
    out["metadata"]["tool"] = kToolVersion;
    out["metadata"]["generated"] = timestamp;
    out["metadata"]["command"] = doc.command;
    out["metadata"]["config"] = doc.config;
    out["metadata"]["notes"] = doc.notes;
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      out["metadata"]["units"][t.columns[c]] = t.units[c];
    out["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = json_cell(row[c]);
      out["rows"].push_back(std::move(obj));
    }
    os << out.dump(2) << '\n';
    return os.str();
  }

  os << "# tool: " << kToolVersion << '\n';
  os << "# generated: " << timestamp << '\n';
  os << "# command: " << doc.command << '\n';
  os << "# config: " << doc.config.dump() << '\n';
  os << "# units:";
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    os << (c ? "; " : " ") << t.columns[c] << " [" << t.units[c] << "]";
  os << '\n';
  for (const auto& note : doc.notes) os << "# " << note << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c]);
    os << '\n';
  }
  return os.str();
}

void write_document(const Document& doc, Format format, const std::string& path) {
  const std::string text = render(doc, format, utc_now());
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".partial";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
      out << text;
      out.flush();
      if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

}  // namespace nlspin::cli
