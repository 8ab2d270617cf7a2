#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nlspin/spin_core.hpp"

namespace nlspin {

// Canonical pair of the classical spin: z = Jz/J and its conjugate phase.
struct ClassicalState {
  double z = 0.0;
  double phi = 0.0;
};

enum class OrbitClass { Josephson, SelfTrapped, Separatrix };

// Self-trapped orbits come in two disconnected copies, labelled by sign(z).
enum class Branch : int { Minus = -1, None = 0, Plus = 1 };

struct ClassicalOrbit {
  double energy = 0.0;
  Branch branch = Branch::None;
  OrbitClass orbit_class = OrbitClass::Josephson;
  std::vector<double> times;
  std::vector<ClassicalState> samples;  // phi wrapped to (-pi, pi]
  std::optional<double> period;         // empty if no return within the step budget
};

struct PhaseVelocity {
  double dz = 0.0;
  double dphi = 0.0;
};

enum class EwfObservable { Jx, Jz };

// Wraps to (-pi, pi].
double wrap_phase(double phi);

// Per-spin energy H/J = Lambda/2 z^2 - sqrt(1-z^2) cos(phi). Throws DomainError if |z| > 1.
double classical_energy(double z, double phi, double lambda);

// Top of the classical band, reached at the maxima (z^2 = 1 - 1/Lambda^2, phi = pi).
double classical_energy_max(double lambda);

// dz/dt = +dH/dphi, dphi/dt = -dH/dz. With this orientation self-trapped orbits
// at z > 0 wind toward decreasing phi. Throws DomainError at the poles.
PhaseVelocity equations_of_motion(ClassicalState s, double lambda);

// Values of |z| in [0, 1] on the contour H(z, phi) = E, ascending.
std::vector<double> contour_abs_z(double energy, double phi, double lambda);

// Fixed-step RK4 trajectory. The period is measured from the first return to
// the starting Poincare section (same crossing direction).
ClassicalOrbit integrate_orbit(ClassicalState start, double lambda, double dt, std::size_t steps);

// Classical period of one orbit at energy E: the inverse EWF normalization of
// a single branch, i.e. the integral of |dH/dz|^-1 dphi around the contour.
// Throws DomainError outside (-1, Emax) and at E = 1 where it diverges.
double orbit_period(double energy, double lambda);

// EWF normalization omega(E) = 1/period. With branch_summed, the two
// self-trapped copies above the separatrix are counted together.
double omega_norm(double energy, double lambda, bool branch_summed = false);

// Orbit time-average of jx = sqrt(1-z^2) cos(phi) or jz = z on the (E, s)
// contour. Josephson orbits (E < 1) require Branch::None; self-trapped ones a
// signed branch. The fixed-point limits E = -1 and E = 1 return (1, 0) and
// (-1, 0) respectively.
double ewf_observable(double energy, Branch branch, double lambda, EwfObservable which);

// Phase-space area quantized by the WKB rule: for E < 1 the area enclosed by
// the Josephson orbit, for E > 1 the area of one self-trapped cap {z > 0, H > E}.
double phase_space_area(double energy, double lambda);

// Area of {H < 1}, the region inside the separatrix.
double separatrix_area(double lambda);

struct WkbLevel {
  double energy = 0.0;        // per-spin
  int quantum_number = 0;     // n in area = (2 pi / J)(n + 1/2)
  OrbitClass orbit_class = OrbitClass::Josephson;
  Branch branch = Branch::None;
  bool near_separatrix = false;  // within one area quantum of the separatrix
  bool resolved = true;          // false if root bracketing failed; energy is then NaN
};

// Semiclassical levels, ascending in energy. Above the separatrix every area
// quantum yields a +/- doublet. Throws std::invalid_argument for J < 10.
std::vector<WkbLevel> wkb_energies(const SpinModel& model);

}  // namespace nlspin
