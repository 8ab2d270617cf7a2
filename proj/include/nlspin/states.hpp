#pragma once

#include "nlspin/classical.hpp"
#include "nlspin/errors.hpp"
#include "nlspin/spin_core.hpp"

namespace nlspin {

// No real z solves H(z, phi') = E at the requested phase.
class UnreachableEnergyError : public DomainError {
 public:
  using DomainError::DomainError;
};

// The only solutions of H(z, phi') = E sit on a pole |z| = 1.
class PoleBoundaryError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Spin coherent state centred on (z', phi').
struct CoherentState {
  double z = 0.0;
  double phi = 0.0;
  StateVector state;
};

// Inverse variances of the Gaussian approximating a coherent state.
struct GaussianWidths {
  double alpha_z = 0.0;
  double alpha_phi = 0.0;
};

// Amplitudes c_m = sqrt(C(2J, J+m)) cos(theta/2)^{J+m} sin(theta/2)^{J-m} e^{i m phi'}
// with cos(theta) = z'. Built from log-magnitudes so large J does not overflow.
// Throws DomainError for |z'| >= 1; use pole_state for the poles.
CoherentState coherent_state(const SpinModel& model, double z, double phi);

// Basis state |m = +J> (sign > 0) or |m = -J>.
StateVector pole_state(const SpinModel& model, int sign);

// Coherent state on the energy contour H(z', phi') = E with sign(z') given by
// branch (Branch::None picks z' >= 0). When the contour crosses the phase
// twice on one branch, the root with smaller |z'| is used.
CoherentState coherent_state_for_energy(const SpinModel& model, double energy, double phi,
                                        Branch branch);

GaussianWidths gaussian_widths(const SpinModel& model, double z);

// Standard deviation of H/J in the given state.
double energy_spread(const SpinModel& model, const StateVector& state);

}  // namespace nlspin
