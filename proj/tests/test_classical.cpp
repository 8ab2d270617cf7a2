#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlspin/classical.hpp"
#include "nlspin/eigensolver.hpp"
#include "nlspin/errors.hpp"
#include "support/classical_oracle.hpp"

using namespace nlspin;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLambda = 10.0;

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double rk4_period(double energy, double lambda, double dt, std::size_t steps) {
  // Orbits above lambda/2 circle the maxima at phi = pi.
  const double phi0 = energy > 0.5 * lambda ? std::numbers::pi : 0.0;
  const double z0 = contour_abs_z(energy, phi0, lambda).front();
  const auto orbit = integrate_orbit({z0, phi0}, lambda, dt, steps);
  REQUIRE(orbit.period.has_value());
  return *orbit.period;
}

}  // namespace

TEST_CASE("classical energy at landmarks") {
  CHECK(classical_energy(0.0, 0.0, kLambda) == -1.0);
  CHECK(classical_energy(0.0, kPi, kLambda) == 1.0);
  CHECK(classical_energy(1.0, 0.3, kLambda) == 5.0);
  CHECK(classical_energy(-1.0, 2.0, kLambda) == 5.0);
  CHECK(classical_energy(0.6, 0.0, kLambda) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(classical_energy(1.0001, 0.0, kLambda), DomainError);
}

TEST_CASE("wrap_phase maps into (-pi, pi]") {
  CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
  CHECK(wrap_phase(0.25 + 6.0 * kPi) == doctest::Approx(0.25));
}

TEST_CASE("flow at fixed points and the separatrix stall") {
  const auto stable = equations_of_motion({0.0, 0.0}, kLambda);
  CHECK(stable.dz == 0.0);
  CHECK(stable.dphi == 0.0);
  const auto saddle = equations_of_motion({0.0, kPi}, kLambda);
  CHECK(std::abs(saddle.dz) < 1e-15);
  CHECK(saddle.dphi == 0.0);
  const auto side = equations_of_motion({0.0, kPi / 2.0}, kLambda);
  CHECK(side.dz == doctest::Approx(1.0));
  CHECK(side.dphi == 0.0);
  const auto stall = equations_of_motion({0.0, kPi - 1e-6}, kLambda);
  CHECK(std::abs(stall.dz) < 1e-5);
  CHECK(std::abs(stall.dphi) < 1e-5);
  CHECK_THROWS_AS(equations_of_motion({1.0, 0.0}, kLambda), DomainError);
}

TEST_CASE("flow matches finite-difference Hamiltonian gradients") {
  const double h = 1e-6;
  for (auto [z, phi] : {std::pair{0.3, 1.1}, std::pair{-0.7, -2.5}, std::pair{0.05, 3.0}}) {
    const auto v = equations_of_motion({z, phi}, kLambda);
    const double dh_dphi =
        (classical_energy(z, phi + h, kLambda) - classical_energy(z, phi - h, kLambda)) / (2 * h);
    const double dh_dz =
        (classical_energy(z + h, phi, kLambda) - classical_energy(z - h, phi, kLambda)) / (2 * h);
    CHECK(v.dz == doctest::Approx(dh_dphi).epsilon(1e-8));
    CHECK(v.dphi == doctest::Approx(-dh_dz).epsilon(1e-8));
  }
}

TEST_CASE("contour roots agree with bisection") {
  for (double e : {-0.5, 0.5, 0.99, 1.5, 3.0, 4.9}) {
    for (double phi : {0.0, 0.7, kPi / 2.0, 2.0, kPi}) {
      const auto roots = contour_abs_z(e, phi, kLambda);
      if (classical_energy(0.0, phi, kLambda) >= e) {
        CHECK(roots.empty());
        continue;
      }
      REQUIRE_FALSE(roots.empty());
      CHECK(roots.front() == doctest::Approx(oracle::contour_z(e, phi, kLambda)).epsilon(1e-12));
      CHECK(std::abs(classical_energy(roots.front(), phi, kLambda) - e) < 1e-12);
    }
  }
  // Above lambda/2 the contour crosses phi = pi twice.
  const auto top = contour_abs_z(5.02, kPi, kLambda);
  REQUIRE(top.size() == 2);
  for (double z : top) CHECK(classical_energy(z, kPi, kLambda) == doctest::Approx(5.02).epsilon(1e-12));
}

TEST_CASE("Josephson orbit closes with bounded phase") {
  const double e = 0.5;
  const double period = orbit_period(e, kLambda);
  const double z0 = contour_abs_z(e, 0.0, kLambda).front();
  const auto orbit = integrate_orbit({z0, 0.0}, kLambda, period / 1e4, 11000);
  CHECK(orbit.orbit_class == OrbitClass::Josephson);
  CHECK(orbit.branch == Branch::None);
  REQUIRE(orbit.period.has_value());
  CHECK(*orbit.period == doctest::Approx(period).epsilon(1e-9));
  bool saw_negative_z = false;
  double max_phi = 0.0, drift = 0.0;
  for (const auto& s : orbit.samples) {
    saw_negative_z |= s.z < 0.0;
    max_phi = std::max(max_phi, std::abs(s.phi));
    drift = std::max(drift, std::abs(classical_energy(s.z, s.phi, kLambda) - e));
  }
  CHECK(saw_negative_z);
  CHECK(max_phi <= std::acos(-e) + 1e-6);
  CHECK(drift < 1e-8);
}

TEST_CASE("self-trapped orbit keeps the sign of z and winds toward decreasing phase") {
  const double e = 3.0;
  const double period = orbit_period(e, kLambda);
  const double z0 = contour_abs_z(e, 0.0, kLambda).front();
  const auto orbit = integrate_orbit({z0, 0.0}, kLambda, period / 1e4, 10100);
  CHECK(orbit.orbit_class == OrbitClass::SelfTrapped);
  CHECK(orbit.branch == Branch::Plus);
  REQUIRE(orbit.period.has_value());
  CHECK(*orbit.period == doctest::Approx(period).epsilon(1e-9));
  double drift = 0.0;
  for (std::size_t i = 1; i < orbit.samples.size(); ++i) {
    CHECK_MESSAGE(orbit.samples[i].z > 0.0, "step " << i);
    const double dphi = wrap_phase(orbit.samples[i].phi - orbit.samples[i - 1].phi);
    CHECK(dphi < 0.0);
    drift = std::max(drift, std::abs(classical_energy(orbit.samples[i].z, orbit.samples[i].phi, kLambda) - e));
  }
  CHECK(drift < 1e-8);

  const auto mirrored = integrate_orbit({-z0, 0.0}, kLambda, period / 100, 50);
  CHECK(mirrored.branch == Branch::Minus);
  CHECK(wrap_phase(mirrored.samples[1].phi) > 0.0);
}

TEST_CASE("fixed point start yields a single-sample orbit") {
  const auto orbit = integrate_orbit({0.0, 0.0}, kLambda, 0.01, 100);
  CHECK(orbit.samples.size() == 1);
  CHECK_FALSE(orbit.period.has_value());
}

TEST_CASE("period is reported only on a full return") {
  const auto orbit = integrate_orbit({contour_abs_z(0.5, 0.0, kLambda).front(), 0.0}, kLambda, 0.01, 10);
  CHECK_FALSE(orbit.period.has_value());
}

TEST_CASE("near-separatrix periods grow logarithmically") {
  const double t3 = rk4_period(1.0 - 1e-3, kLambda, 1e-3, 20000);
  const double t6 = rk4_period(1.0 - 1e-6, kLambda, 1e-3, 20000);
  const double slope = (t6 - t3) / std::log(1e3);
  CHECK(slope == doctest::Approx(2.0 / std::sqrt(kLambda - 1.0)).epsilon(0.01));
}

TEST_CASE("quadrature period matches RK4 return time and dA/dE") {
  for (double e : {-0.9, 0.5, 0.999, 1.001, 3.0, 4.9, 5.02}) {
    CAPTURE(e);
    const double period = orbit_period(e, kLambda);
    CHECK(rk4_period(e, kLambda, period / 2e4, 21000) == doctest::Approx(period).epsilon(1e-9));
    const double h = 1e-6;
    const double da = (phase_space_area(e + h, kLambda) - phase_space_area(e - h, kLambda)) / (2 * h);
    CHECK(std::abs(da) == doctest::Approx(period).epsilon(1e-6));
  }
}

TEST_CASE("self-trapped quadratures agree with the trapezoid oracle") {
  for (double e : {1.2, 3.0, 4.5}) {
    CAPTURE(e);
    const double period = oracle::cap_orbit_integral(e, kLambda, [](double, double) { return 1.0; });
    CHECK(orbit_period(e, kLambda) == doctest::Approx(period).epsilon(1e-9));
    const double jz = oracle::cap_orbit_integral(e, kLambda, [](double z, double) { return z; }) / period;
    const double jx = oracle::cap_orbit_integral(e, kLambda, [](double z, double phi) {
      return std::sqrt(1.0 - z * z) * std::cos(phi);
    }) / period;
    CHECK(ewf_observable(e, Branch::Plus, kLambda, EwfObservable::Jz) == doctest::Approx(jz).epsilon(1e-9));
    CHECK(ewf_observable(e, Branch::Minus, kLambda, EwfObservable::Jz) == doctest::Approx(-jz).epsilon(1e-9));
    CHECK(ewf_observable(e, Branch::Plus, kLambda, EwfObservable::Jx) == doctest::Approx(jx).epsilon(1e-9));
  }
}

TEST_CASE("omega near the separatrix") {
  SUBCASE("deep well limit is finite") {
    const double t = orbit_period(-1.0 + 1e-9, kLambda);
    CHECK(t == doctest::Approx(2.0 * kPi / std::sqrt(kLambda + 1.0)).epsilon(1e-6));
  }
  SUBCASE("per-branch factor two across E = 1") {
    const double d = 1e-4;
    CHECK(omega_norm(1.0 - d, kLambda) / omega_norm(1.0 + d, kLambda) == doctest::Approx(0.5).epsilon(0.05));
  }
  SUBCASE("log slopes") {
    std::vector<double> x, below, above, summed;
    for (double d : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
      x.push_back(-std::log(d));
      below.push_back(1.0 / omega_norm(1.0 - d, kLambda));
      above.push_back(1.0 / omega_norm(1.0 + d, kLambda));
      summed.push_back(1.0 / omega_norm(1.0 + d, kLambda, true));
    }
    const double unit = 1.0 / std::sqrt(kLambda - 1.0);
    CHECK(fit_slope(x, below) == doctest::Approx(2.0 * unit).epsilon(1e-3));
    CHECK(fit_slope(x, above) == doctest::Approx(unit).epsilon(1e-3));
    CHECK(fit_slope(x, summed) == doctest::Approx(fit_slope(x, below)).epsilon(1e-3));
  }
  CHECK_THROWS_AS(omega_norm(1.0, kLambda), DomainError);
  CHECK_THROWS_AS(omega_norm(-1.0, kLambda), DomainError);
  CHECK_THROWS_AS(omega_norm(6.0, kLambda), DomainError);
}

TEST_CASE("EWF observables") {
  CHECK(ewf_observable(-1.0, Branch::None, kLambda, EwfObservable::Jx) == 1.0);
  CHECK(ewf_observable(-1.0, Branch::None, kLambda, EwfObservable::Jz) == 0.0);
  CHECK(ewf_observable(1.0, Branch::None, kLambda, EwfObservable::Jx) == -1.0);
  CHECK(ewf_observable(0.3, Branch::None, kLambda, EwfObservable::Jz) == 0.0);
  CHECK(ewf_observable(-0.999999, Branch::None, kLambda, EwfObservable::Jx) == doctest::Approx(1.0).epsilon(1e-5));

  // jx falls toward -1 as E approaches the separatrix from either side.
  double prev_below = 1.0, prev_above = 1.0;
  for (double d : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double below = ewf_observable(1.0 - d, Branch::None, kLambda, EwfObservable::Jx);
    const double above = ewf_observable(1.0 + d, Branch::Plus, kLambda, EwfObservable::Jx);
    CHECK(below < prev_below);
    CHECK(above < prev_above);
    CHECK(below > -1.0);
    prev_below = below;
    prev_above = above;
  }
  const double jz_close = ewf_observable(1.0 + 1e-8, Branch::Plus, kLambda, EwfObservable::Jz);
  CHECK(jz_close > 0.0);
  CHECK(jz_close < ewf_observable(1.0 + 1e-4, Branch::Plus, kLambda, EwfObservable::Jz));

  // Winding once in phi fixes the time average of dphi/dt, which for large
  // lambda is dominated by lambda z.
  for (double e : {2.0, 3.0, 4.0}) {
    const double jz = ewf_observable(e, Branch::Plus, kLambda, EwfObservable::Jz);
    CHECK(jz == doctest::Approx(omega_norm(e, kLambda) * 2.0 * kPi / kLambda).epsilon(1e-3));
  }

  CHECK_THROWS_AS(ewf_observable(0.5, Branch::Plus, kLambda, EwfObservable::Jz), DomainError);
  CHECK_THROWS_AS(ewf_observable(3.0, Branch::None, kLambda, EwfObservable::Jz), DomainError);
  CHECK_THROWS_AS(ewf_observable(-1.5, Branch::None, kLambda, EwfObservable::Jx), DomainError);
}

TEST_CASE("phase-space areas tile the sphere") {
  const double inside = separatrix_area(kLambda);
  const double cap = phase_space_area(1.0 + 1e-14, kLambda);
  CHECK(inside + 2.0 * cap == doctest::Approx(4.0 * kPi).epsilon(1e-9));
  CHECK(phase_space_area(-1.0, kLambda) == 0.0);
  CHECK(phase_space_area(classical_energy_max(kLambda), kLambda) == 0.0);
  // Areas are continuous through lambda/2, where the cap orbit touches the pole.
  CHECK(phase_space_area(5.0 - 1e-9, kLambda) == doctest::Approx(phase_space_area(5.0 + 1e-9, kLambda)).epsilon(1e-6));
}

TEST_CASE("WKB levels") {
  SUBCASE("count and ground state") {
    const SpinModel model(200, kLambda);
    const auto levels = wkb_energies(model);
    CHECK(std::abs(static_cast<int>(levels.size()) - static_cast<int>(model.dim())) <= 2);
    for (const auto& l : levels) CHECK(l.resolved);
    const double zero_point = std::sqrt(kLambda + 1.0) / (2.0 * model.j());
    CHECK(levels.front().energy > -1.0);
    CHECK(levels.front().energy + 1.0 == doctest::Approx(zero_point).epsilon(0.02));
    int doublets = 0;
    for (const auto& l : levels) doublets += l.branch == Branch::Plus;
    for (std::size_t i = 1; i < levels.size(); ++i) CHECK(levels[i - 1].energy <= levels[i].energy);
    CHECK(doublets > 0);
  }
  SUBCASE("accuracy improves with J") {
    auto max_error = [](int two_j) {
      const SpinModel model(two_j, kLambda);
      auto exact = eigvalsh_tridiagonal(build_hamiltonian(model));
      for (double& e : exact) e /= model.j();
      double worst = 0.0;
      for (const auto& l : wkb_energies(model)) {
        if (std::abs(l.energy - 1.0) <= 0.2) continue;
        const auto it = std::lower_bound(exact.begin(), exact.end(), l.energy);
        double best = 1e9;
        if (it != exact.end()) best = std::abs(*it - l.energy);
        if (it != exact.begin()) best = std::min(best, std::abs(*(it - 1) - l.energy));
        worst = std::max(worst, best);
      }
      return worst;
    };
    const double e500 = max_error(1000);
    const double e1000 = max_error(2000);
    CHECK(e1000 < e500);
    CHECK(e1000 < 10.0 / 1000.0);
  }
  CHECK_THROWS_AS(wkb_energies(SpinModel(10, kLambda)), std::invalid_argument);
}
