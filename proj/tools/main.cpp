#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "json.hpp"
#include "nlspin/errors.hpp"

namespace {

using nlspin::cli::ExperimentConfig;

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kOutOfRegime = 4 };

int report(int code, const char* kind, const std::string& message) {
  nlohmann::ordered_json line;
  line["error"]["code"] = code;
  line["error"]["kind"] = kind;
  line["error"]["message"] = message;
  std::cerr << line.dump() << '\n';
  return code;
}

void add_common(CLI::App* sub, ExperimentConfig& cfg, std::string& format) {
  sub->add_option("--J", cfg.j, "Spin sizes (integer or half-integer)")->delimiter(',');
  sub->add_option("--lambda", cfg.lambda, "Interaction strength, > 1");
  sub->add_option("--energy", cfg.energy, "Per-spin energy E = H/J");
  sub->add_option("--phi", cfg.phi, "Initial phases phi'")->delimiter(',');
  sub->add_option("--threads", cfg.threads, "Worker threads across grid cells");
  sub->add_option("--out", cfg.out, "Output file (stdout when omitted)");
  sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and semiclassical long-time averages of the nonlinear spin model"};
  app.require_subcommand(1);
  ExperimentConfig cfg;
  std::string format = "csv";
  std::optional<double> dt;

  auto* spectrum = app.add_subcommand("spectrum", "Per-level energies and observables");
  auto* portrait = app.add_subcommand("portrait", "Classical orbits and the separatrix");
  auto* ensemble = app.add_subcommand("ensemble", "Diagonal vs microcanonical averages over (J, phi')");
  auto* dynamics = app.add_subcommand("dynamics", "Time series of an observable");
  auto* scaling = app.add_subcommand("scaling", "jx on the separatrix against 1/sqrt(J ln J)");
  auto* semiclassics = app.add_subcommand("semiclassics", "omega(E), EWF observables, WKB levels");
  for (auto* sub : {spectrum, portrait, ensemble, dynamics, scaling, semiclassics})
    add_common(sub, cfg, format);

  portrait->add_option("--energies", cfg.energies, "Orbit energies")->delimiter(',');
  portrait->add_option("--points", cfg.points, "Separatrix samples per branch");
  ensemble->add_option("--window", cfg.window, "Microcanonical window size (states)");
  dynamics->add_option("--observable", cfg.observable, "jx or jz");
  dynamics->add_option("--t", cfg.t_start, "Start of the averaging window");
  dynamics->add_option("--T", cfg.duration, "Length of the averaging window");
  dynamics->add_option("--dt", dt, "Sampling step (derived from the state when omitted)");
  semiclassics->add_option("--table", cfg.table, "ewf or levels");
  semiclassics->add_option("--points", cfg.points, "Energy samples across the band");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(kConfig, "config", e.what());
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = format == "json" ? nlspin::cli::Format::Json : nlspin::cli::Format::Csv;
  cfg.dt = dt;

  try {
    cfg.validate();
    const auto doc = nlspin::cli::run(cfg);
    nlspin::cli::write_document(doc, cfg.format, cfg.out);
    return kOk;
  } catch (const nlspin::cli::ConfigError& e) {
    return report(kConfig, "config", e.what());
  } catch (const nlspin::OutOfRegimeError& e) {
    return report(kOutOfRegime, "out_of_regime", e.what());
  } catch (const nlspin::NonConvergenceError& e) {
    return report(kNumerical, "numerical", e.what());
  } catch (const nlspin::DomainError& e) {
    return report(kConfig, "domain", e.what());
  } catch (const std::invalid_argument& e) {
    return report(kConfig, "config", e.what());
  } catch (const std::exception& e) {
    return report(kNumerical, "numerical", e.what());
  }
}
