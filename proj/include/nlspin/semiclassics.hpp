#pragma once

#include <limits>

#include "nlspin/classical.hpp"
#include "nlspin/spin_core.hpp"

namespace nlspin {

// Per-spin energy width of the coherent state at (z', phi') from the linearized
// Hamiltonian: sigma^2 = (gamma^2 alpha_phi + kappa^2 alpha_z) / (2 alpha_phi alpha_z)
// with gamma = dH/dz and kappa = dH/dphi. Throws DomainError for |z'| >= 1 or
// where both gradients vanish.
double energy_variance_sigma(const SpinModel& model, double z, double phi);

// Gaussian-times-omega model of the diagonal ensemble of a coherent state,
// normalized to unit mass over the classical band.
class SemiclassicalDensity {
 public:
  // Throws DomainError if the state is a fixed point.
  SemiclassicalDensity(const SpinModel& model, double z, double phi);

  // Throws DomainError outside [-1, Emax].
  double operator()(double energy) const;

  double center() const { return center_; }
  double sigma() const { return sigma_; }

 private:
  double unnormalized(double energy) const;

  double lambda_;
  double center_;
  double sigma_;
  double norm_ = 1.0;
};

// One-shot evaluation; prefer SemiclassicalDensity for many energies.
double semiclassical_diag_density(double energy, const SpinModel& model, double z, double phi);

// Lower real branch of the inverse of w e^w on [-1/e, 0). Throws DomainError
// outside that interval.
double lambert_w_minus1(double x);

// Inputs of the double-peak saddle: F = 1/(2 sigma^2 J) and the log-prefactor
// constants of omega(1 +/- delta) ~ K / (1 - G ln delta).
struct SaddleModel {
  double F = 0.0;
  double G_plus = std::numeric_limits<double>::infinity();
  double G_minus = std::numeric_limits<double>::infinity();
  double sigma = 0.0;
};

// G+/- = a+/- / C where a+/- are the log slopes of 1/omega on either side and
// C the common additive constant. C -> 0 sends both to infinity, the symmetric
// large-J limit.
SaddleModel saddle_model(const SpinModel& model, double z, double phi, double log_offset = 0.0);

// Distance |delta| of the saddle of K exp(-2 J F delta^2) / (1 - G ln delta)
// from the separatrix. G may be +infinity. Throws DomainError if
// 2 J F e^{2/G} <= e, where no saddle exists yet (pre-asymptotic J).
double saddle_delta(const SpinModel& model, double F, double G);

enum class Side : int { Below = -1, Above = 1 };

struct SpinPair {
  double jx = 0.0;
  double jz = 0.0;
};

// Leading near-separatrix observables at E = 1 +/- delta; jz is a magnitude.
// Throws DomainError unless 0 < delta <= 0.1.
SpinPair separatrix_observables(double delta, Side side, double lambda);

enum class LtoMethod {
  ClosedForm,  // jz = 4 pi sqrt(L-1) / (3 L ln(F J ln J)), jx = -1 + (3+L)/(3(L-1)) / sqrt(F J ln J)
  Combined,    // (1/3)[2 O(1 + delta) + O(1 - delta)] at the saddle distance
};

struct LtoOptions {
  LtoMethod method = LtoMethod::ClosedForm;
  // Combined only: evaluate each side at its own saddle (G+ != G-) instead of
  // the symmetric large-J saddle.
  bool asymmetric_saddles = false;
  double log_offset = 0.0;
  // Half-width of the excluded region around phi' = pi in units of the
  // coherent-state phase width 1/sqrt(J (1 - z'^2)).
  double pi_exclusion_widths = 3.0;
};

// Long-time averages of a coherent state launched on E = 1 at phase phi'.
// Throws OutOfRegimeError near phi' = pi and DomainError if the saddle does
// not exist at this J.
SpinPair predict_lto(const SpinModel& model, double phi, const LtoOptions& options = {});

// F(phi') = 1/(2 sigma^2 J) for the E = 1 coherent state at phi'.
double scaling_factor(const SpinModel& model, double phi);

}  // namespace nlspin
