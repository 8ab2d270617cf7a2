#include "nlspin/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "nlspin/errors.hpp"

namespace nlspin {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTolerance = 1e-11;
constexpr double kSeparatrixTolerance = 1e-12;

boost::math::quadrature::tanh_sinh<double>& integrator() {
  thread_local boost::math::quadrature::tanh_sinh<double> q;
  return q;
}

// Integrates f(x, d) over [a, b]; d is the distance to the nearer endpoint
// (negative near a, positive near b), exact even where b - x underflows x's ulp.
template <class F>
double integrate(F f, double a, double b) {
  return integrator().integrate(f, a, b, kQuadTolerance);
}

std::string format_energy(const char* what, double energy) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (E = " << energy << ")";
  return os.str();
}

// Roots u = z^2 of Lambda/2 u - E = c sqrt(1 - u), with the quadratic's
// coefficients supplied in cancellation-free form. e_plus_c is E + cos(phi)
// and gap2 is c^2 - 2 Lambda (E - Lambda/2); both vanish at turning points.
std::vector<double> contour_u(double energy, double c, double lambda, double e_plus_c, double gap2) {
  const double a = 0.25 * lambda * lambda;
  const double bp = lambda * energy - c * c;
  const double cc = (energy - c) * e_plus_c;
  const double s = std::abs(c) * std::sqrt(std::max(gap2, 0.0));
  std::vector<double> candidates;
  if (bp >= 0.0) {
    const double q = bp + s;
    if (q > 0.0) {
      candidates.push_back(q / (2.0 * a));
      candidates.push_back(2.0 * cc / q);
    } else {
      candidates.push_back(0.0);
    }
  } else {
    const double q = bp - s;
    candidates.push_back(q / (2.0 * a));
    candidates.push_back(2.0 * cc / q);
  }
  std::vector<double> roots;
  for (double u : candidates) {
    if (!(u >= -1e-14 && u <= 1.0 + 1e-14)) continue;
    u = std::clamp(u, 0.0, 1.0);
    const double lhs = 0.5 * lambda * u - energy;
    const double w = c * std::sqrt(1.0 - u);
    // Squaring admits lhs = -w; keep roots nearer the true branch, with slack
    // for c ~ 0 where both branches coincide up to rounding.
    if (std::abs(lhs - w) <= std::max(std::abs(lhs + w), 1e-12 * (1.0 + std::abs(energy))))
      roots.push_back(u);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

double gap2_of(double energy, double c, double lambda) {
  return c * c - 2.0 * lambda * (energy - 0.5 * lambda);
}

// |dH/dz| at (z >= 0, c = cos phi).
double abs_dhdz(double z, double c, double lambda) {
  const double w = std::sqrt(std::max(0.0, 1.0 - z * z));
  if (w == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(z * (lambda + c / w));
}

enum class Region { Josephson, Cap, Top };

Region region_of(double energy, double lambda) {
  if (energy < 1.0) return Region::Josephson;
  if (energy <= 0.5 * lambda) return Region::Cap;
  return Region::Top;
}

void require_band(double energy, double lambda) {
  if (!(energy > -1.0 && energy < classical_energy_max(lambda)))
    throw DomainError(format_energy("energy outside the open classical band", energy));
}

// Integral over one orbit of g(z, w cos phi) / |dH/dz| dphi (when inverse_speed)
// or of the plain z-extent weight (area). Josephson orbits integrate the full
// closed curve using its z -> -z and phi -> -phi symmetry, so g must be even in z.
// Cap and Top orbits cover the z > 0 copy.
template <class G>
double orbit_integral(double energy, double lambda, G g) {
  switch (region_of(energy, lambda)) {
    case Region::Josephson: {
      const double phi_max = std::acos(-energy);
      // phi = phi_max sin t, t in [0, pi/2]
      auto f = [&](double t, double d) {
        double one_minus_sin = 1.0 - std::sin(t);
        if (d > 0.0) {
          const double h = std::sin(0.5 * d);
          one_minus_sin = 2.0 * h * h;
        }
        const double gap = phi_max * one_minus_sin;  // phi_max - phi
        const double phi = phi_max - gap;
        const double c = std::cos(phi);
        const double e_plus_c = 2.0 * std::sin(phi_max - 0.5 * gap) * std::sin(0.5 * gap);
        const auto us = contour_u(energy, c, lambda, e_plus_c, gap2_of(energy, c, lambda));
        if (us.empty()) return 0.0;
        const double z = std::sqrt(us.front());
        const double jac = phi_max * std::cos(t);
        return jac * g(z, c, /*both_sheets=*/false);
      };
      return 4.0 * integrate(f, 0.0, 0.5 * kPi);
    }
    case Region::Cap: {
      auto f = [&](double phi, double) {
        const double c = std::cos(phi);
        const auto us = contour_u(energy, c, lambda, energy + c, gap2_of(energy, c, lambda));
        if (us.empty()) return 0.0;
        return g(std::sqrt(us.front()), c, false);
      };
      return 2.0 * integrate(f, 0.0, kPi);
    }
    case Region::Top: {
      const double kappa = std::sqrt(2.0 * lambda * (energy - 0.5 * lambda));
      const double psi_max = std::acos(std::min(1.0, kappa));
      // psi = pi - phi = psi_max sin t
      auto f = [&](double t, double d) {
        double one_minus_sin = 1.0 - std::sin(t);
        if (d > 0.0) {
          const double h = std::sin(0.5 * d);
          one_minus_sin = 2.0 * h * h;
        }
        const double gap = psi_max * one_minus_sin;
        const double psi = psi_max - gap;
        const double c = -std::cos(psi);
        // c^2 - kappa^2 = (cos psi - cos psi_max)(cos psi + cos psi_max)
        const double diff = 2.0 * std::sin(psi_max - 0.5 * gap) * std::sin(0.5 * gap);
        const double gap2 = diff * (std::cos(psi) + kappa);
        const auto us = contour_u(energy, c, lambda, energy + c, gap2);
        if (us.empty()) return 0.0;
        const double z1 = std::sqrt(us.front());
        const double z2 = std::sqrt(us.back());
        const double jac = psi_max * std::cos(t);
        if (us.size() == 1) return 0.0;
        return jac * (g(z1, c, true) + g(z2, c, false));
      };
      return 2.0 * integrate(f, 0.0, 0.5 * kPi);
    }
  }
  return 0.0;
}

double period_impl(double energy, double lambda) {
  return orbit_integral(energy, lambda, [&](double z, double c, bool) {
    const double v = abs_dhdz(z, c, lambda);
    return std::isfinite(v) && v > 0.0 ? 1.0 / v : 0.0;
  });
}

}  // namespace

double wrap_phase(double phi) {
  double r = std::remainder(phi, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double classical_energy(double z, double phi, double lambda) {
  if (!(std::abs(z) <= 1.0)) throw DomainError("classical_energy: |z| > 1");
  return 0.5 * lambda * z * z - std::sqrt(1.0 - z * z) * std::cos(phi);
}

double classical_energy_max(double lambda) { return 0.5 * lambda + 0.5 / lambda; }

PhaseVelocity equations_of_motion(ClassicalState s, double lambda) {
  if (!(std::abs(s.z) < 1.0)) throw DomainError("equations_of_motion: state at or beyond a pole");
  const double w = std::sqrt(1.0 - s.z * s.z);
  return {w * std::sin(s.phi), -(lambda * s.z + s.z * std::cos(s.phi) / w)};
}

std::vector<double> contour_abs_z(double energy, double phi, double lambda) {
  const double c = std::cos(phi);
  auto us = contour_u(energy, c, lambda, energy + c, gap2_of(energy, c, lambda));
  for (double& u : us) u = std::sqrt(u);
  return us;
}

ClassicalOrbit integrate_orbit(ClassicalState start, double lambda, double dt, std::size_t steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_orbit: dt must be positive");
  ClassicalOrbit orbit;
  orbit.energy = classical_energy(start.z, start.phi, lambda);
  if (std::abs(orbit.energy - 1.0) <= kSeparatrixTolerance) {
    orbit.orbit_class = OrbitClass::Separatrix;
  } else if (orbit.energy < 1.0) {
    orbit.orbit_class = OrbitClass::Josephson;
  } else {
    orbit.orbit_class = OrbitClass::SelfTrapped;
    orbit.branch = start.z > 0.0 ? Branch::Plus : Branch::Minus;
  }
  start.phi = wrap_phase(start.phi);
  orbit.times.push_back(0.0);
  orbit.samples.push_back(start);

  const PhaseVelocity v0 = equations_of_motion(start, lambda);
  if (std::abs(v0.dz) < 1e-14 && std::abs(v0.dphi) < 1e-14) return orbit;

  // Poincare section on whichever coordinate moves faster at the start.
  const bool phi_section = std::abs(v0.dphi) >= std::abs(v0.dz);
  const double dir = phi_section ? std::copysign(1.0, v0.dphi) : std::copysign(1.0, v0.dz);

  auto rhs = [&](double z, double phi) { return equations_of_motion({z, phi}, lambda); };
  double z = start.z;
  double phi = start.phi;  // unwrapped
  const double phi0 = start.phi;
  auto section_value = [&](double zz, double pp) { return phi_section ? pp - phi0 : zz - start.z; };
  double g_prev = section_value(z, phi);
  PhaseVelocity v_prev = v0;
  orbit.times.reserve(steps + 1);
  orbit.samples.reserve(steps + 1);
  for (std::size_t step = 1; step <= steps; ++step) {
    const PhaseVelocity k1 = rhs(z, phi);
    const PhaseVelocity k2 = rhs(z + 0.5 * dt * k1.dz, phi + 0.5 * dt * k1.dphi);
    const PhaseVelocity k3 = rhs(z + 0.5 * dt * k2.dz, phi + 0.5 * dt * k2.dphi);
    const PhaseVelocity k4 = rhs(z + dt * k3.dz, phi + dt * k3.dphi);
    z += dt / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
    phi += dt / 6.0 * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi);
    const double t = static_cast<double>(step) * dt;
    orbit.times.push_back(t);
    orbit.samples.push_back({z, wrap_phase(phi)});

    const PhaseVelocity v = rhs(z, phi);
    const double g = section_value(z, phi);
    if (!orbit.period) {
      double g0 = g_prev;
      double g1 = g;
      if (phi_section) {
        const double k = std::round((g_prev + g) / (4.0 * kPi));
        g0 -= 2.0 * kPi * k;
        g1 -= 2.0 * kPi * k;
      }
      const double slope1 = phi_section ? v.dphi : v.dz;
      const double slope0 = phi_section ? v_prev.dphi : v_prev.dz;
      if (g0 * g1 < 0.0 && std::copysign(1.0, g1 - g0) == dir) {
        // Cubic Hermite interpolation of the section coordinate, solved by bisection.
        auto hermite = [&](double s) {
          const double s2 = s * s, s3 = s2 * s;
          return (2 * s3 - 3 * s2 + 1) * g0 + (s3 - 2 * s2 + s) * dt * slope0 +
                 (-2 * s3 + 3 * s2) * g1 + (s3 - s2) * dt * slope1;
        };
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if ((hermite(mid) < 0.0) == (g0 < 0.0)) lo = mid; else hi = mid;
        }
        orbit.period = t - dt + 0.5 * (lo + hi) * dt;
      }
    }
    g_prev = g;
    v_prev = v;
  }
  return orbit;
}

double orbit_period(double energy, double lambda) {
  require_band(energy, lambda);
  if (std::abs(energy - 1.0) <= kSeparatrixTolerance)
    throw DomainError(format_energy("orbit period diverges on the separatrix", energy));
  return period_impl(energy, lambda);
}

double omega_norm(double energy, double lambda, bool branch_summed) {
  const double period = orbit_period(energy, lambda);
  const double factor = (branch_summed && energy > 1.0) ? 2.0 : 1.0;
  return 1.0 / (factor * period);
}

double ewf_observable(double energy, Branch branch, double lambda, EwfObservable which) {
  const double emax = classical_energy_max(lambda);
  if (!(energy >= -1.0 && energy <= emax))
    throw DomainError(format_energy("ewf_observable: energy outside the classical band", energy));
  if (energy < 1.0 && branch != Branch::None)
    throw DomainError(format_energy("ewf_observable: Josephson orbits carry no branch label", energy));
  if (energy > 1.0 && branch == Branch::None)
    throw DomainError(format_energy("ewf_observable: self-trapped orbits need a branch", energy));

  const double sign = branch == Branch::Minus ? -1.0 : 1.0;
  if (energy == -1.0) return which == EwfObservable::Jx ? 1.0 : 0.0;
  if (std::abs(energy - 1.0) <= kSeparatrixTolerance) return which == EwfObservable::Jx ? -1.0 : 0.0;
  if (energy == emax) {
    return which == EwfObservable::Jx ? -1.0 / lambda : sign * std::sqrt(1.0 - 1.0 / (lambda * lambda));
  }
  if (energy < 1.0 && which == EwfObservable::Jz) return 0.0;

  const double period = period_impl(energy, lambda);
  const double numerator = orbit_integral(energy, lambda, [&](double z, double c, bool) {
    const double v = abs_dhdz(z, c, lambda);
    if (!(std::isfinite(v) && v > 0.0)) return 0.0;
    const double o = which == EwfObservable::Jz ? z : std::sqrt(std::max(0.0, 1.0 - z * z)) * c;
    return o / v;
  });
  const double value = numerator / period;
  return which == EwfObservable::Jz ? sign * value : value;
}

double phase_space_area(double energy, double lambda) {
  const double emax = classical_energy_max(lambda);
  if (!(energy >= -1.0 && energy <= emax))
    throw DomainError(format_energy("phase_space_area: energy outside the classical band", energy));
  if (energy == -1.0 || energy == emax) return 0.0;
  switch (region_of(energy, lambda)) {
    case Region::Josephson:
      return orbit_integral(energy, lambda, [](double z, double, bool) { return z; });
    case Region::Cap:
      return orbit_integral(energy, lambda, [](double z, double, bool) { return 1.0 - z; });
    case Region::Top:
      return orbit_integral(energy, lambda, [](double z, double, bool lower) { return lower ? -z : z; });
  }
  return 0.0;
}

double separatrix_area(double lambda) {
  // Inside the separatrix the contour touches z = 0 at phi = pi.
  return orbit_integral(std::nextafter(1.0, 0.0), lambda, [](double z, double, bool) { return z; });
}

std::vector<WkbLevel> wkb_energies(const SpinModel& model) {
  if (model.j() < 10.0) throw std::invalid_argument("wkb_energies: requires J >= 10");
  const double lambda = model.lambda();
  const double j = model.j();
  const double quantum = 2.0 * kPi / j;
  const double emax = classical_energy_max(lambda);
  const double a_sep = separatrix_area(lambda);
  const double a_cap = 0.5 * (4.0 * kPi - a_sep);

  auto solve = [&](double target, double lo, double hi, bool increasing) -> double {
    auto f = [&](double e) {
      const double a = phase_space_area(e, lambda) - target;
      return increasing ? a : -a;
    };
    std::uintmax_t iters = 200;
    try {
      const auto r = boost::math::tools::toms748_solve(
          f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
      return 0.5 * (r.first + r.second);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::vector<WkbLevel> levels;
  for (int n = 0;; ++n) {
    const double target = quantum * (n + 0.5);
    if (target >= a_sep) break;
    WkbLevel level;
    level.quantum_number = n;
    level.orbit_class = OrbitClass::Josephson;
    level.near_separatrix = a_sep - target < quantum;
    level.energy = solve(target, -1.0, std::nextafter(1.0, 0.0), true);
    level.resolved = !std::isnan(level.energy);
    levels.push_back(level);
  }
  for (int k = 0;; ++k) {
    const double target = quantum * (k + 0.5);
    if (target >= a_cap) break;
    const double e = solve(target, std::nextafter(1.0, 2.0), emax, false);
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      WkbLevel level;
      level.quantum_number = k;
      level.orbit_class = OrbitClass::SelfTrapped;
      level.branch = b;
      level.near_separatrix = a_cap - target < quantum;
      level.energy = e;
      level.resolved = !std::isnan(e);
      levels.push_back(level);
    }
  }
  // Unresolved levels sit at the separatrix for ordering purposes.
  auto key = [](const WkbLevel& l) { return l.resolved ? l.energy : 1.0; };
  std::stable_sort(levels.begin(), levels.end(),
                   [&](const WkbLevel& a, const WkbLevel& b) { return key(a) < key(b); });
  return levels;
}

}  // namespace nlspin
