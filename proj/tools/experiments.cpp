#include "experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>

#include "nlspin/classical.hpp"
#include "nlspin/ensembles.hpp"
#include "nlspin/errors.hpp"
#include "nlspin/scaling.hpp"
#include "nlspin/semiclassics.hpp"
#include "nlspin/states.hpp"
#include "parallel.hpp"

namespace nlspin::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Plus: return "+";
    case Branch::Minus: return "-";
    default: return "0";
  }
}

const char* class_name(OrbitClass c) {
  switch (c) {
    case OrbitClass::Josephson: return "josephson";
    case OrbitClass::SelfTrapped: return "self_trapped";
    default: return "separatrix";
  }
}

Observable observable_of(const ExperimentConfig& cfg) {
  return cfg.observable == "jz" ? Observable::Jz : Observable::Jx;
}

SpinModel model_for(double j, double lambda) { return SpinModel::from_spin(j, lambda); }

// One branched eigenbasis per J, solved in parallel.
std::vector<std::unique_ptr<BranchedEigenstates>> solve_all(const ExperimentConfig& cfg) {
  std::vector<std::unique_ptr<BranchedEigenstates>> out(cfg.j.size());
  parallel_for(cfg.j.size(), cfg.threads, [&](std::size_t i) {
    out[i] = std::make_unique<BranchedEigenstates>(solve_branched(model_for(cfg.j[i], cfg.lambda)));
  });
  return out;
}

Branch state_branch(double energy) { return energy > 1.0 ? Branch::Plus : Branch::None; }

std::string fmt(const char* key, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%.15g", key, v);
  return buf;
}

Document start(const ExperimentConfig& cfg) {
  Document doc;
  doc.command = cfg.command;
  doc.config = cfg.to_json();
  return doc;
}

}  // namespace

Document run_spectrum(const ExperimentConfig& cfg) {
  auto doc = start(cfg);
  doc.table.columns = {"J", "n", "E_abs", "E_per_spin", "parity", "branch", "jx", "jz"};
  doc.table.units = {"spin", "index", "coupling", "E/J", "+1/-1, 0 for doublet", "sign of z",
                     "<Jx>/J", "<Jz>/J"};
  const auto eigs = solve_all(cfg);
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    const auto& eig = *eigs[i];
    const auto jx = state_expectations(eig, Observable::Jx);
    const auto jz = state_expectations(eig, Observable::Jz);
    for (std::size_t k = 0; k < eig.states.size(); ++k) {
      const auto& s = eig.states[k];
      const std::int64_t parity = s.is_doublet() ? 0 : eig.parity[s.first];
      doc.table.add({cfg.j[i], static_cast<std::int64_t>(k), s.energy * eig.model.j(), s.energy,
                     parity, std::string(branch_name(s.branch)), jx[k], jz[k]});
    }
  }
  return doc;
}

Document run_portrait(const ExperimentConfig& cfg) {
  auto doc = start(cfg);
  doc.table.columns = {"kind", "energy", "branch", "t", "z", "phi"};
  doc.table.units = {"orbit|separatrix", "E/J", "sign of z", "1/coupling", "Jz/J", "rad"};
  const double lambda = cfg.lambda;
  const double emax = classical_energy_max(lambda);
  std::vector<double> energies = cfg.energies;
  if (energies.empty()) {
    for (double e : {-0.9, -0.5, 0.0, 0.5, 0.9, 1.1, 2.0, 3.0, 4.0}) energies.push_back(e);
    energies.push_back(0.5 * (0.5 * lambda + emax));
  }

  struct Job {
    double energy;
    Branch branch;
  };
  std::vector<Job> jobs;
  for (double e : energies) {
    if (e < 1.0) {
      jobs.push_back({e, Branch::None});
    } else {
      jobs.push_back({e, Branch::Plus});
      jobs.push_back({e, Branch::Minus});
    }
  }
  std::vector<ClassicalOrbit> orbits(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const auto [e, b] = jobs[i];
    double phi = 0.0;
    auto roots = contour_abs_z(e, phi, lambda);
    if (roots.empty() || roots.front() >= 1.0) {
      phi = std::numbers::pi;
      roots = contour_abs_z(e, phi, lambda);
    }
    if (roots.empty() || roots.front() >= 1.0)
      throw NonConvergenceError("portrait: no starting point on the contour");
    const double z = (b == Branch::Minus ? -1.0 : 1.0) * roots.front();
    const double period = orbit_period(e, lambda);
    const std::size_t steps = 2000;
    orbits[i] = integrate_orbit({z, phi}, lambda, period / static_cast<double>(steps), steps);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& o = orbits[i];
    for (std::size_t k = 0; k < o.samples.size(); ++k)
      doc.table.add({std::string("orbit"), jobs[i].energy, std::string(branch_name(jobs[i].branch)),
                     o.times[k], o.samples[k].z, o.samples[k].phi});
  }

  for (int sign : {1, -1}) {
    for (std::size_t k = 0; k < cfg.points; ++k) {
      const double phi = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) /
                                                 static_cast<double>(cfg.points - 1);
      for (double r : contour_abs_z(1.0, phi, lambda)) {
        if (r >= 1.0) continue;
        doc.table.add({std::string("separatrix"), 1.0, std::string(sign > 0 ? "+" : "-"), kNaN,
                       sign * r, phi});
        break;
      }
    }
  }
  return doc;
}

Document run_ensemble(const ExperimentConfig& cfg) {
  auto doc = start(cfg);
  doc.table.columns = {"J", "phi", "status", "z0", "energy_spread", "jx_diag", "jz_diag",
                       "jx_micro", "jz_micro"};
  doc.table.units = {"spin", "rad", "ok|unreachable|pole", "Jz/J", "E/J", "<Jx>/J", "<Jz>/J",
                     "<Jx>/J", "<Jz>/J"};
  const auto eigs = solve_all(cfg);
  const std::size_t np = cfg.phi.size();
  std::vector<std::vector<Cell>> rows(cfg.j.size() * np);
  MicrocanonicalWindow window;
  window.count = cfg.window;
  window.branch = cfg.energy > 1.0 ? BranchFilter::Plus : BranchFilter::Both;
  parallel_for(rows.size(), cfg.threads, [&](std::size_t idx) {
    const auto& eig = *eigs[idx / np];
    const double j = cfg.j[idx / np];
    const double phi = cfg.phi[idx % np];
    const double jx_micro = microcanonical_average(eig, Observable::Jx, cfg.energy, window);
    const double jz_micro = microcanonical_average(eig, Observable::Jz, cfg.energy, window);
    try {
      const auto cs = coherent_state_for_energy(eig.model, cfg.energy, phi, state_branch(cfg.energy));
      const auto ens = diagonal_ensemble(cs.state, eig);
      rows[idx] = {j, phi, std::string("ok"), cs.z, energy_spread(eig.model, cs.state),
                   diagonal_average(ens, eig, Observable::Jx),
                   diagonal_average(ens, eig, Observable::Jz), jx_micro, jz_micro};
    } catch (const PoleBoundaryError&) {
      rows[idx] = {j, phi, std::string("pole"), kNaN, kNaN, kNaN, kNaN, jx_micro, jz_micro};
    } catch (const UnreachableEnergyError&) {
      rows[idx] = {j, phi, std::string("unreachable"), kNaN, kNaN, kNaN, kNaN, jx_micro, jz_micro};
    }
  });
  doc.table.rows = std::move(rows);
  return doc;
}

Document run_dynamics(const ExperimentConfig& cfg) {
  auto doc = start(cfg);
  doc.table.columns = {"J", "phi", "t", "value"};
  doc.table.units = {"spin", "rad", "1/coupling", cfg.observable == "jz" ? "<Jz>/J" : "<Jx>/J"};
  const auto which = observable_of(cfg);
  const auto eigs = solve_all(cfg);
  const std::size_t np = cfg.phi.size();
  const std::size_t cells = cfg.j.size() * np;
  std::vector<TimeSeries> series(cells);
  std::vector<std::string> summaries(cells);
  parallel_for(cells, cfg.threads, [&](std::size_t idx) {
    const auto& eig = *eigs[idx / np];
    const double phi = cfg.phi[idx % np];
    const auto cs = coherent_state_for_energy(eig.model, cfg.energy, phi, state_branch(cfg.energy));
    const double dt = cfg.dt ? *cfg.dt : dephasing_time_step(cs.state, eig, which);
    const auto times = uniform_times(0.0, cfg.t_start + cfg.duration, dt);
    series[idx] = evolve_expectation(cs.state, eig, which, times);
    const double avg = time_average(series[idx], cfg.t_start, cfg.duration);
    const double diag = diagonal_average(diagonal_ensemble(cs.state, eig), eig, which);
    summaries[idx] = "summary: " + fmt("J", cfg.j[idx / np]) + " " + fmt("phi", phi) + " " +
                     fmt("dt", dt) + " " + fmt("time_average", avg) + " " + fmt("diagonal", diag);
  });
  for (std::size_t idx = 0; idx < cells; ++idx) {
    doc.notes.push_back(summaries[idx]);
    for (std::size_t k = 0; k < series[idx].times.size(); ++k)
      doc.table.add({cfg.j[idx / np], cfg.phi[idx % np], series[idx].times[k], series[idx].values[k]});
  }
  return doc;
}

Document run_scaling(const ExperimentConfig& cfg) {
  if (std::abs(cfg.energy - 1.0) > 1e-12)
    throw OutOfRegimeError("scaling: the sqrt(J ln J) law is defined on the separatrix, use --energy 1");
  if (cfg.j.size() < 2) throw ConfigError("scaling: --J needs at least two values");
  for (double j : cfg.j)
    if (j < 2.0) throw ConfigError("scaling: --J values must be >= 2 so that ln J > 0");
  auto doc = start(cfg);
  doc.table.columns = {"J", "phi", "jx_diag_exact", "jx_diag_predicted", "F_fit", "F_sigma",
                       "jx_sigma", "slope", "intercept", "r2"};
  doc.table.units = {"spin", "rad", "<Jx>/J", "<Jx>/J", "1", "1", "<Jx>/J", "<Jx>/J per unit x",
                     "<Jx>/J", "1"};
  // Regime check up front so no decomposition is wasted.
  for (double phi : cfg.phi)
    for (double j : cfg.j) (void)predict_lto(model_for(j, cfg.lambda), phi);

  const auto eigs = solve_all(cfg);
  const std::size_t np = cfg.phi.size();
  std::vector<std::vector<double>> jx(cfg.j.size(), std::vector<double>(np));
  parallel_for(cfg.j.size() * np, cfg.threads, [&](std::size_t idx) {
    jx[idx / np][idx % np] = separatrix_jx(*eigs[idx / np], cfg.phi[idx % np]);
  });
  const auto fits = fit_scaling(cfg.lambda, cfg.j, cfg.phi, jx);
  for (const auto& s : fits) {
    for (std::size_t i = 0; i < s.j.size(); ++i) {
      const double analytic = predict_lto(model_for(s.j[i], cfg.lambda), s.phi).jx;
      doc.table.add({s.j[i], s.phi, s.jx[i], s.predicted(s.j[i]), s.fitted_f, s.analytic_f, analytic,
                     s.fit.slope, s.fit.intercept, s.fit.r_squared});
    }
  }
  return doc;
}

Document run_semiclassics(const ExperimentConfig& cfg) {
  auto doc = start(cfg);
  const double lambda = cfg.lambda;
  if (cfg.table == "levels") {
    if (cfg.j.size() != 1) throw ConfigError("semiclassics --table levels takes a single --J");
    doc.table.columns = {"n", "quantum_number", "class", "branch", "E_wkb", "E_exact", "error",
                         "near_separatrix", "resolved"};
    doc.table.units = {"index", "area quanta", "orbit class", "sign of z", "E/J", "E/J", "E/J",
                       "0/1", "0/1"};
    const auto model = model_for(cfg.j.front(), lambda);
    const auto levels = wkb_energies(model);
    const auto exact = solve_branched(model);
    const std::size_t n = std::min(levels.size(), exact.energies.size());
    if (levels.size() != exact.energies.size())
      doc.notes.push_back("level counts differ: wkb=" + std::to_string(levels.size()) +
                          " exact=" + std::to_string(exact.energies.size()));
    for (std::size_t k = 0; k < n; ++k) {
      const auto& l = levels[k];
      doc.table.add({static_cast<std::int64_t>(k), static_cast<std::int64_t>(l.quantum_number),
                     std::string(class_name(l.orbit_class)), std::string(branch_name(l.branch)),
                     l.energy, exact.energies[k], l.energy - exact.energies[k],
                     static_cast<std::int64_t>(l.near_separatrix), static_cast<std::int64_t>(l.resolved)});
    }
    return doc;
  }

  doc.table.columns = {"energy", "branch", "omega", "period", "jx", "jz"};
  doc.table.units = {"E/J", "sign of z", "coupling", "1/coupling", "<Jx>/J", "<Jz>/J"};
  const double emax = classical_energy_max(lambda);
  struct Job {
    double energy;
    Branch branch;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < cfg.points; ++k) {
    const double e = -1.0 + (emax + 1.0) * (static_cast<double>(k) + 0.5) / static_cast<double>(cfg.points);
    if (std::abs(e - 1.0) <= 1e-12) continue;
    if (e < 1.0) {
      jobs.push_back({e, Branch::None});
    } else {
      jobs.push_back({e, Branch::Plus});
      jobs.push_back({e, Branch::Minus});
    }
  }
  std::vector<std::vector<Cell>> rows(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const auto [e, b] = jobs[i];
    rows[i] = {e, std::string(branch_name(b)), omega_norm(e, lambda), orbit_period(e, lambda),
               ewf_observable(e, b, lambda, EwfObservable::Jx),
               ewf_observable(e, b, lambda, EwfObservable::Jz)};
  });
  doc.table.rows = std::move(rows);
  return doc;
}

Document run(const ExperimentConfig& cfg) {
  if (cfg.command == "spectrum") return run_spectrum(cfg);
  if (cfg.command == "portrait") return run_portrait(cfg);
  if (cfg.command == "ensemble") return run_ensemble(cfg);
  if (cfg.command == "dynamics") return run_dynamics(cfg);
  if (cfg.command == "scaling") return run_scaling(cfg);
  if (cfg.command == "semiclassics") return run_semiclassics(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace nlspin::cli
