#include "nlspin/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlspin/errors.hpp"
#include "nlspin/states.hpp"

namespace nlspin {

namespace {

constexpr double kBandNudge = 1e-10;
constexpr double kTailSigmas = 12.0;

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (" << value << ")";
  return os.str();
}

double integrate(auto&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-10);
}

// Per-branch omega with the separatrix zero filled in.
double omega_or_zero(double energy, double lambda) {
  const double emax = classical_energy_max(lambda);
  const double e = std::clamp(energy, -1.0 + kBandNudge, emax - kBandNudge);
  if (std::abs(e - 1.0) <= 1e-12) return 0.0;
  return omega_norm(e, lambda);
}

// The asymptotic log slopes of 1/omega(1 -/+ delta), per branch.
double log_slope_below(double lambda) { return 1.0 / std::sqrt(lambda - 1.0); }
double log_slope_above(double lambda) { return 0.5 / std::sqrt(lambda - 1.0); }

}  // namespace

double energy_variance_sigma(const SpinModel& model, double z, double phi) {
  if (!(std::abs(z) < 1.0)) throw DomainError(describe("energy_variance_sigma: |z'| must be < 1", z));
  const double lambda = model.lambda();
  const double w = std::sqrt(1.0 - z * z);
  const double gamma = lambda * z + z * std::cos(phi) / w;
  const double kappa = w * std::sin(phi);
  if (std::abs(gamma) < 1e-14 && std::abs(kappa) < 1e-14)
    throw DomainError("energy_variance_sigma: linearization degenerates at a fixed point");
  const auto a = gaussian_widths(model, z);
  const double var = (gamma * gamma * a.alpha_phi + kappa * kappa * a.alpha_z) /
                     (2.0 * a.alpha_phi * a.alpha_z);
  return std::sqrt(var);
}

SemiclassicalDensity::SemiclassicalDensity(const SpinModel& model, double z, double phi)
    : lambda_(model.lambda()),
      center_(classical_energy(z, phi, model.lambda())),
      sigma_(energy_variance_sigma(model, z, phi)) {
  const double emax = classical_energy_max(lambda_);
  const double lo = std::max(-1.0, center_ - kTailSigmas * sigma_);
  const double hi = std::min(emax, center_ + kTailSigmas * sigma_);
  auto f = [this](double e) { return unnormalized(e); };
  double mass = 0.0;
  if (lo < 1.0 && hi > 1.0) {
    mass = integrate(f, lo, 1.0) + integrate(f, 1.0, hi);
  } else {
    mass = integrate(f, lo, hi);
  }
  if (!(mass > 0.0)) throw NonConvergenceError("semiclassical_diag_density: zero normalization");
  norm_ = 1.0 / mass;
}

double SemiclassicalDensity::unnormalized(double energy) const {
  const double u = (energy - center_) / sigma_;
  if (std::abs(u) > kTailSigmas + 1.0) return 0.0;
  return std::exp(-0.5 * u * u) * omega_or_zero(energy, lambda_);
}

double SemiclassicalDensity::operator()(double energy) const {
  if (!(energy >= -1.0 && energy <= classical_energy_max(lambda_)))
    throw DomainError(describe("semiclassical_diag_density: energy outside the band", energy));
  return norm_ * unnormalized(energy);
}

double semiclassical_diag_density(double energy, const SpinModel& model, double z, double phi) {
  return SemiclassicalDensity(model, z, phi)(energy);
}

double lambert_w_minus1(double x) {
  const double branch_point = -std::exp(-1.0);
  if (!(x >= branch_point && x < 0.0))
    throw DomainError(describe("lambert_w_minus1: argument outside [-1/e, 0)", x));
  if (x == branch_point) return -1.0;

  double w;
  const double p2 = 2.0 * (std::numbers::e * x + 1.0);
  if (p2 < 0.5) {
    // Series about the branch point in p = -sqrt(2 (e x + 1)).
    const double p = -std::sqrt(p2);
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-x);
    w = l1 - std::log(-l1);
  }
  for (int it = 0; it < 50; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-16 * std::abs(w)) break;
  }
  return std::min(w, -1.0);
}

SaddleModel saddle_model(const SpinModel& model, double z, double phi, double log_offset) {
  SaddleModel s;
  s.sigma = energy_variance_sigma(model, z, phi);
  s.F = 1.0 / (2.0 * s.sigma * s.sigma * model.j());
  if (log_offset > 0.0) {
    s.G_plus = log_slope_above(model.lambda()) / log_offset;
    s.G_minus = log_slope_below(model.lambda()) / log_offset;
  } else if (log_offset < 0.0) {
    throw DomainError(describe("saddle_model: log offset must be >= 0", log_offset));
  }
  return s;
}

double saddle_delta(const SpinModel& model, double F, double G) {
  if (!(F > 0.0) || !(G > 0.0)) throw DomainError("saddle_delta: F and G must be positive");
  const double two_jf = 2.0 * model.j() * F;
  const double x = -std::exp(-2.0 / G) / two_jf;
  if (!(x > -std::exp(-1.0)))
    throw DomainError(describe("saddle_delta: pre-asymptotic J, no saddle for 2JF", two_jf));
  const double w = lambert_w_minus1(x);
  return 1.0 / std::sqrt(two_jf * -w);
}

SpinPair separatrix_observables(double delta, Side side, double lambda) {
  if (!(delta > 0.0 && delta <= 0.1))
    throw DomainError(describe("separatrix_observables: delta must lie in (0, 0.1]", delta));
  if (side == Side::Below) return {-1.0 + delta, 0.0};
  return {-1.0 + 2.0 * delta / (lambda - 1.0),
          4.0 * std::numbers::pi * std::sqrt(lambda - 1.0) / (lambda * -std::log(delta))};
}

double scaling_factor(const SpinModel& model, double phi) {
  const auto cs = coherent_state_for_energy(model, 1.0, phi, Branch::None);
  const double sigma = energy_variance_sigma(model, cs.z, cs.phi);
  return 1.0 / (2.0 * sigma * sigma * model.j());
}

SpinPair predict_lto(const SpinModel& model, double phi, const LtoOptions& options) {
  const double lambda = model.lambda();
  const double j = model.j();
  const auto cs = coherent_state_for_energy(model, 1.0, phi, Branch::None);
  const double width = 1.0 / std::sqrt(j * (1.0 - cs.z * cs.z));
  const double from_pi = std::numbers::pi - std::abs(wrap_phase(phi));
  if (from_pi < options.pi_exclusion_widths * width)
    throw OutOfRegimeError(describe("predict_lto: phi' within the single-peak regime around pi", phi));

  const auto s = saddle_model(model, cs.z, cs.phi, options.log_offset);
  if (options.method == LtoMethod::ClosedForm) {
    const double x = s.F * j * std::log(j);
    if (!(x > 1.0)) throw DomainError(describe("predict_lto: F J ln J must exceed 1", x));
    return {-1.0 + (3.0 + lambda) / (3.0 * (lambda - 1.0)) / std::sqrt(x),
            4.0 * std::numbers::pi * std::sqrt(lambda - 1.0) / (3.0 * lambda * std::log(x))};
  }

  const double inf = std::numeric_limits<double>::infinity();
  const double d_plus = saddle_delta(model, s.F, options.asymmetric_saddles ? s.G_plus : inf);
  const double d_minus = saddle_delta(model, s.F, options.asymmetric_saddles ? s.G_minus : inf);
  const auto above = separatrix_observables(d_plus, Side::Above, lambda);
  const auto below = separatrix_observables(d_minus, Side::Below, lambda);
  return {(2.0 * above.jx + below.jx) / 3.0, (2.0 * above.jz + below.jz) / 3.0};
}

}  // namespace nlspin
