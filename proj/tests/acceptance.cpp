// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nlspin/classical.hpp"
#include "nlspin/eigensolver.hpp"
#include "nlspin/ensembles.hpp"
#include "nlspin/scaling.hpp"
#include "nlspin/semiclassics.hpp"
#include "nlspin/states.hpp"
#include "support/dense_oracle.hpp"

using namespace nlspin;

namespace {

constexpr double kLambda = 10.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

void verdict(bool ok, const char* name, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const BranchedEigenstates& basis_1000() {
  static const BranchedEigenstates eig = solve_branched(SpinModel(2000, kLambda));
  return eig;
}

const std::vector<double>& phase_grid() {
  static const std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  return grid;
}

Branch branch_for(double energy) { return energy > 1.0 ? Branch::Plus : Branch::None; }

// Dense H = -Jx + L/(2J) Jz^2 written from the angular-momentum formulas.
oracle::Dense dense_hamiltonian(int two_j, double lambda) {
  const double j = 0.5 * two_j;
  const std::size_t n = static_cast<std::size_t>(two_j) + 1;
  oracle::Dense h{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t a = 0; a < n; ++a) {
    const double m = -j + static_cast<double>(a);
    h(a, a) = lambda / (2.0 * j) * m * m;
    if (a + 1 < n) {
      const double up = -0.5 * std::sqrt(j * (j + 1.0) - m * (m + 1.0));
      h(a, a + 1) = up;
      h(a + 1, a) = up;
    }
  }
  return h;
}

void dense_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> lam(1.0, 20.0);
  std::uniform_int_distribution<int> size(1, 64);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    double lambda = lam(rng);
    while (!(lambda > 1.0)) lambda = lam(rng);
    const int two_j = size(rng);
    const auto fast = eigvalsh_tridiagonal(build_hamiltonian(SpinModel(two_j, lambda)));
    const auto ref = oracle::jacobi_eigh(dense_hamiltonian(two_j, lambda));
    for (std::size_t k = 0; k < fast.size(); ++k) worst = std::max(worst, std::abs(fast[k] - ref.values[k]));
  }
  const double elapsed = seconds_since(t0);
  verdict(worst <= 1e-11 && elapsed < 10.0, "exact-spectrum fidelity",
          format("max |dE| = %.2e over 100 random (L, J<=32) (tol 1e-11), %.2f s (limit 10 s)", worst, elapsed));
}

void separatrix_localization() {
  const auto t0 = std::chrono::steady_clock::now();
  const SpinModel model(2000, kLambda);
  const auto h = build_hamiltonian(model);
  const auto eig = eigh_tridiagonal(h);
  const auto jx_op = observable_matrix(model, Observable::Jx);
  double min_jx = kInf;
  std::size_t at = 0;
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    const auto v = eig.vector(k);
    const double jx = matrix_element(v, jx_op, v) / model.j();
    if (jx < min_jx) {
      min_jx = jx;
      at = k;
    }
  }
  const double e_min = eig.values[at] / model.j();
  const double spacing = local_mean_spacing(basis_1000(), 1.0);
  const double offset = std::abs(e_min - 1.0) / spacing;
  const double elapsed = seconds_since(t0);
  verdict(offset <= 3.0 && min_jx < -0.95 && elapsed < 60.0, "separatrix localization",
          format("min <Jx>/J = %.4f at E = %.5f (%.2f spacings from 1; need <= 3 and min < -0.95), %.1f s",
                 min_jx, e_min, offset, elapsed));
}

void thermalization() {
  const auto& eig = basis_1000();
  bool ok = true;
  std::string detail;
  for (double e : {0.5, 3.0}) {
    MicrocanonicalWindow window;
    window.branch = e > 1.0 ? BranchFilter::Plus : BranchFilter::Both;
    const double micro = microcanonical_average(eig, Observable::Jx, e, window);
    double lo = kInf, hi = -kInf, dev = 0.0;
    int used = 0, skipped = 0;
    for (double phi : phase_grid()) {
      try {
        const auto cs = coherent_state_for_energy(eig.model, e, phi, branch_for(e));
        const double jx = diagonal_average(diagonal_ensemble(cs.state, eig), eig, Observable::Jx);
        lo = std::min(lo, jx);
        hi = std::max(hi, jx);
        dev = std::max(dev, std::abs(jx - micro));
        ++used;
      } catch (const UnreachableEnergyError&) {
        ++skipped;
      }
    }
    ok = ok && used >= 2 && hi - lo < 0.02 && dev < 0.02;
    detail += format("E=%.1f spread %.4f, max |diag-micro| %.4f (micro %.4f, %d phases, %d unreachable skipped); ",
                     e, hi - lo, dev, micro, used, skipped);
  }
  verdict(ok, "thermalization off the separatrix", detail + "tol 0.02");
}

void breakdown() {
  const auto& eig = basis_1000();
  std::vector<double> jx;
  for (double phi : phase_grid()) {
    const auto cs = coherent_state_for_energy(eig.model, 1.0, phi, Branch::None);
    jx.push_back(diagonal_average(diagonal_ensemble(cs.state, eig), eig, Observable::Jx));
  }
  // The grid approaches pi monotonically, so closer to pi means later entries.
  bool monotone = true;
  for (std::size_t k = 1; k < jx.size(); ++k) monotone = monotone && jx[k] < jx[k - 1];
  const double spread = *std::max_element(jx.begin(), jx.end()) - *std::min_element(jx.begin(), jx.end());
  std::string values;
  for (double v : jx) values += format(" %.4f", v);
  verdict(spread > 0.05 && monotone, "breakdown on the separatrix",
          format("jx(phi'=0..3):%s; spread %.4f (need > 0.05), monotone toward -1 near pi: %s", values.c_str(),
                 spread, monotone ? "yes" : "no"));
}

void scaling_law() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> js{500, 707, 1000, 1414, 2000};
  const std::vector<double> phis{0.5, 1.5, 2.5};
  std::vector<std::vector<double>> jx;
  for (double j : js) {
    const auto eig = j == 1000 ? basis_1000() : solve_branched(SpinModel::from_spin(j, kLambda));
    std::vector<double> row;
    for (double phi : phis) row.push_back(separatrix_jx(eig, phi));
    jx.push_back(std::move(row));
  }
  bool ok = true;
  std::string detail;
  for (const auto& s : fit_scaling(kLambda, js, phis, jx)) {
    ok = ok && s.fit.r_squared > 0.98 && std::abs(s.fit.intercept + 1.0) <= 0.02;
    detail += format("phi'=%.1f R2 %.4f intercept %.4f; ", s.phi, s.fit.r_squared, s.fit.intercept);
  }
  verdict(ok, "scaling law",
          detail + format("need R2 > 0.98 and intercept -1 +/- 0.02, %.1f s", seconds_since(t0)));
}

void omega_asymptotics() {
  const double root = std::sqrt(kLambda - 1.0);
  auto slope = [&](double side) {
    std::vector<double> x, y;
    for (double d = 1e-7; d <= 1.0001e-3; d *= std::pow(10.0, 0.25)) {
      x.push_back(-std::log(d));
      y.push_back(1.0 / omega_norm(1.0 + side * d, kLambda));
    }
    return linear_fit(x, y).slope;
  };
  const double below = slope(-1.0);
  const double above = slope(1.0);
  const double err_below = std::abs(below / (1.0 / root) - 1.0);
  const double err_above = std::abs(above / (0.5 / root) - 1.0);
  const double ratio = above / below;
  verdict(err_below < 0.02 && err_above < 0.02 && std::abs(ratio / 0.5 - 1.0) < 0.05, "omega asymptotics",
          format("slope below %.5f vs 1/sqrt(L-1) = %.5f (err %.1f%%), above %.5f vs 1/(2 sqrt(L-1)) = %.5f "
                 "(err %.1f%%), need < 2%%; ratio above/below %.4f (need 0.5 +/- 5%%)",
                 below, 1.0 / root, 100 * err_below, above, 0.5 / root, 100 * err_above, ratio));
}

void saddle_machinery() {
  double worst_w = 0.0;
  for (double t = 1e-14; t < 700.0; t *= 1.02) {
    const double x = -std::exp(-1.0 - t);
    const double w = lambert_w_minus1(x);
    worst_w = std::max(worst_w, std::abs(w * std::exp(w) - x) / std::abs(x));
  }

  const double f = scaling_factor(SpinModel(2000, kLambda), 1.5);
  double worst_s = 0.0;
  for (double g : {0.3, 1.0, 5.0, kInf}) {
    for (double j : {1e3, 1e4, 1e5, 1e6}) {
      const SpinModel model = SpinModel::from_spin(j, kLambda);
      const double d = saddle_delta(model, f, g);
      const double log_term = std::isinf(g) ? -1.0 / (d * std::log(d)) : g / (d * (1.0 - g * std::log(d)));
      worst_s = std::max(worst_s, std::abs(-4.0 * j * f * d + log_term) / (4.0 * j * f * d));
    }
  }

  std::string trend;
  double last = 0.0;
  for (double j : {1e3, 1e4, 1e5, 1e6}) {
    const double x = 2.0 * j * f;
    last = saddle_delta(SpinModel::from_spin(j, kLambda), f, kInf) * std::sqrt(x * std::log(x));
    trend += format(" %.4f", last);
  }
  verdict(worst_w <= 1e-12 && worst_s <= 1e-8 && std::abs(last - 1.0) < 0.02, "saddle machinery",
          format("W residual %.1e (tol 1e-12); stationarity %.1e (tol 1e-8); delta sqrt(2JF ln 2JF) at "
                 "J=1e3..1e6 (F=%.4f):%s (need within 2%% of 1 at 1e6)",
                 worst_w, worst_s, f, trend.c_str()));
}

void dynamics_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  const SpinModel model(400, kLambda);
  const auto eig = solve_branched(model);
  bool ok = true;
  std::string detail;
  for (double e : {0.5, 3.0}) {
    std::vector<double> plateaus;
    for (double phi : {0.5, 1.5}) {
      const auto cs = coherent_state_for_energy(model, e, phi, branch_for(e));
      const double dt = dephasing_time_step(cs.state, eig, Observable::Jx);
      const auto series = evolve_expectation(cs.state, eig, Observable::Jx, uniform_times(0.0, 1000.0, dt));
      const double avg = time_average(series, 500.0, 500.0);
      const double diag = diagonal_average(diagonal_ensemble(cs.state, eig), eig, Observable::Jx);
      ok = ok && std::abs(avg - diag) < 0.01;
      plateaus.push_back(avg);
      detail += format("E=%.1f phi'=%.1f |avg-diag| %.1e; ", e, phi, std::abs(avg - diag));
    }
    if (e == 3.0) {
      const double gap = std::abs(plateaus[0] - plateaus[1]);
      ok = ok && gap < 0.02;
      detail += format("E=3 plateau gap %.4f (tol 0.02); ", gap);
    }
  }
  verdict(ok, "dynamics consistency", detail + format("J=200, t=T=500, %.1f s", seconds_since(t0)));
}

void eth_suite() {
  // A2: bulk spacing halves when J doubles.
  const auto half = solve_branched(SpinModel(1000, kLambda));
  const auto& full = basis_1000();
  bool a2 = true;
  std::string d2;
  for (double e : {0.0, 0.5, 3.0}) {
    const double r = local_mean_spacing(half, e) / local_mean_spacing(full, e);
    a2 = a2 && std::abs(r - 2.0) <= 0.4;
    d2 += format(" E=%.1f %.3f", e, r);
  }

  // A3: energy width of coherent states.
  bool a3 = true;
  std::string d3;
  for (auto [z, phi] : {std::pair{0.6, 0.0}, {0.35, 2.0}, {0.2, 1.0}}) {
    const double analytic = energy_variance_sigma(SpinModel(500, kLambda), z, phi) /
                            energy_variance_sigma(SpinModel(2000, kLambda), z, phi);
    const SpinModel small(500, kLambda), large(2000, kLambda);
    const double quantum = energy_spread(small, coherent_state(small, z, phi).state) /
                           energy_spread(large, coherent_state(large, z, phi).state);
    a3 = a3 && std::abs(analytic - 2.0) <= 1e-10 && std::abs(quantum - 2.0) <= 0.2;
    d3 += format(" (%.2f,%.1f) analytic %.12f quantum %.4f", z, phi, analytic, quantum);
  }

  // A1: smooth eigenstate observables away from E = 1, a cusp at E = 1.
  const auto jx = state_expectations(full, Observable::Jx);
  const double j = full.model.j();
  double away = 0.0, near = 0.0, e_near = 0.0, min_jx = kInf, e_min = 0.0;
  std::size_t prev = full.states.size();
  for (std::size_t k = 0; k < full.states.size(); ++k) {
    if (full.states[k].branch == Branch::Minus) continue;
    const double e = full.states[k].energy;
    if (jx[k] < min_jx) min_jx = jx[k], e_min = e;
    if (prev < full.states.size()) {
      const double d = std::abs(jx[k] - jx[prev]);
      if (std::abs(e - 1.0) > 0.05 && std::abs(full.states[prev].energy - 1.0) > 0.05) {
        away = std::max(away, d);
      } else if (d > near) {
        near = d;
        e_near = e;
      }
    }
    prev = k;
  }
  const double spacing = local_mean_spacing(full, 1.0);
  const bool cusp = near > 10.0 / j && std::abs(e_min - 1.0) <= 3.0 * spacing;
  const bool a1 = away < 10.0 / j && cusp;

  verdict(a1 && a2 && a3, "ETH assumption suite",
          format("A1 max |d jx| away from E=1 %.2e (tol %.0e), near E=1 %.2e at %.4f, jx min at %.5f: %s; "
                 "A2 spacing ratio J=500/1000:%s (2 +/- 20%%); A3 sigma ratio J/4J:%s (analytic 1e-10, quantum 10%%)",
                 away, 10.0 / j, near, e_near, e_min, a1 ? "ok" : "fail", d2.c_str(), d3.c_str()));
}

void correspondence() {
  const auto& eig = basis_1000();
  const auto jz = state_expectations(eig, Observable::Jz);
  const double emax = classical_energy_max(kLambda);
  double worst = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < eig.states.size(); ++k) {
    const auto& s = eig.states[k];
    if (std::abs(s.energy - 1.0) <= 0.3 || s.energy <= -1.0 || s.energy >= emax) continue;
    if (s.energy > 1.0 && s.branch == Branch::None) continue;
    const double classical = ewf_observable(s.energy, s.branch, kLambda, EwfObservable::Jz);
    worst = std::max(worst, std::abs(jz[k] - classical));
    ++used;
  }
  verdict(worst < 0.02, "correspondence principle",
          format("max |<Jz>/J - EWF jz| = %.2e over %zu states with |E-1| > 0.3 (tol 0.02)", worst, used));
}

}  // namespace

int main() {
  dense_fidelity();
  separatrix_localization();
  thermalization();
  breakdown();
  scaling_law();
  omega_asymptotics();
  saddle_machinery();
  dynamics_consistency();
  eth_suite();
  correspondence();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
