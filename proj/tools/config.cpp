#include "config.hpp"

#include <cmath>

#include "nlspin/classical.hpp"

namespace nlspin::cli {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!j.empty(), "--J needs at least one value");
  for (double v : j) {
    require(std::isfinite(v) && v >= 0.5, "--J values must be >= 1/2");
    require(std::abs(2.0 * v - std::round(2.0 * v)) < 1e-9, "--J values must be integers or half-integers");
    require(v <= 20000.0, "--J values above 20000 are not supported");
  }
  require(std::isfinite(lambda) && lambda > 1.0, "--lambda must be > 1");
  require(std::isfinite(energy), "--energy must be finite");
  require(energy >= -1.0 && energy <= classical_energy_max(lambda),
          "--energy must lie in the classical band [-1, lambda/2 + 1/(2 lambda)]");
  require(!phi.empty(), "--phi needs at least one value");
  for (double p : phi) require(std::isfinite(p), "--phi values must be finite");
  for (double e : energies)
    require(e > -1.0 && e < classical_energy_max(lambda) && e != 1.0,
            "--energies must lie inside the open band and avoid the separatrix E = 1");
  require(observable == "jx" || observable == "jz", "--observable must be jx or jz");
  require(std::isfinite(t_start) && t_start >= 0.0, "--t must be >= 0");
  require(std::isfinite(duration) && duration > 0.0, "--T must be > 0");
  if (dt) require(std::isfinite(*dt) && *dt > 0.0, "--dt must be > 0");
  require(window >= 1, "--window must be >= 1");
  require(points >= 2, "--points must be >= 2");
  require(table == "ewf" || table == "levels", "--table must be ewf or levels");
  require(threads >= 1, "--threads must be >= 1");
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json c;
  c["command"] = command;
  c["J"] = j;
  c["lambda"] = lambda;
  c["energy"] = energy;
  c["phi"] = phi;
  c["energies"] = energies;
  c["observable"] = observable;
  c["t"] = t_start;
  c["T"] = duration;
  c["dt"] = dt ? nlohmann::ordered_json(*dt) : nlohmann::ordered_json("auto");
  c["window"] = window;
  c["points"] = points;
  c["table"] = table;
  c["format"] = format == Format::Csv ? "csv" : "json";
  return c;
}

}  // namespace nlspin::cli
