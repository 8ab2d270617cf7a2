#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "table.hpp"

namespace nlspin::cli {

// Invalid or inconsistent command-line configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string command;
  std::vector<double> j{1000.0};
  double lambda = 10.0;
  double energy = 1.0;
  std::vector<double> phi{0.0};
  std::vector<double> energies;  // portrait orbit energies; empty means defaults
  std::string observable = "jx";
  double t_start = 500.0;
  double duration = 500.0;
  std::optional<double> dt;  // dynamics step; derived from the state when empty
  std::size_t window = 21;
  std::size_t points = 401;
  std::string table = "ewf";
  std::string out;
  Format format = Format::Csv;
  unsigned threads = 1;

  // Throws ConfigError on the first violated rule.
  void validate() const;

  // Resolved configuration as written into every output header.
  nlohmann::ordered_json to_json() const;
};

}  // namespace nlspin::cli
