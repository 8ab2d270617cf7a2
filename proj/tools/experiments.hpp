#pragma once

#include "config.hpp"
#include "table.hpp"

namespace nlspin::cli {

Document run_spectrum(const ExperimentConfig& cfg);
Document run_portrait(const ExperimentConfig& cfg);
Document run_ensemble(const ExperimentConfig& cfg);
Document run_dynamics(const ExperimentConfig& cfg);
Document run_scaling(const ExperimentConfig& cfg);
Document run_semiclassics(const ExperimentConfig& cfg);

// Dispatches on cfg.command. Throws ConfigError for an unknown command.
Document run(const ExperimentConfig& cfg);

}  // namespace nlspin::cli
