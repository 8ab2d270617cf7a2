#include "nlspin/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlspin {

namespace {

std::string describe(const char* what, double energy, double phi) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (E = " << energy << ", phi = " << phi << ")";
  return os.str();
}

}  // namespace

CoherentState coherent_state(const SpinModel& model, double z, double phi) {
  if (!(std::abs(z) < 1.0)) throw DomainError("coherent_state: |z'| must be < 1");
  const std::size_t n = model.dim();
  const double j = model.j();
  const double log_cos = 0.5 * std::log1p(z) - 0.5 * std::log(2.0);   // log cos(theta/2)
  const double log_sin = 0.5 * std::log1p(-z) - 0.5 * std::log(2.0);  // log sin(theta/2)
  const double log_fact_2j = std::lgamma(2.0 * j + 1.0);

  std::vector<double> log_mag(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = model.m_of(k);
    log_mag[k] = 0.5 * (log_fact_2j - std::lgamma(j + m + 1.0) - std::lgamma(j - m + 1.0)) +
                 (j + m) * log_cos + (j - m) * log_sin;
  }
  const double peak = *std::max_element(log_mag.begin(), log_mag.end());

  CoherentState out{z, wrap_phase(phi), {}};
  auto& c = out.state.amplitudes;
  c.resize(n);
  double norm2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double mag = std::exp(log_mag[k] - peak);
    c[k] = std::polar(mag, model.m_of(k) * phi);
    norm2 += mag * mag;
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& x : c) x *= scale;
  return out;
}

StateVector pole_state(const SpinModel& model, int sign) {
  StateVector s;
  s.amplitudes.assign(model.dim(), Complex{0.0, 0.0});
  (sign > 0 ? s.amplitudes.back() : s.amplitudes.front()) = 1.0;
  return s;
}

CoherentState coherent_state_for_energy(const SpinModel& model, double energy, double phi,
                                        Branch branch) {
  const double lambda = model.lambda();
  const auto roots = contour_abs_z(energy, phi, lambda);
  if (roots.empty()) throw UnreachableEnergyError(describe("no real root on the energy contour", energy, phi));
  const auto interior = std::find_if(roots.begin(), roots.end(), [](double r) { return r < 1.0; });
  if (interior == roots.end())
    throw PoleBoundaryError(describe("energy contour meets this phase only at a pole", energy, phi));

  double z = *interior;
  // One Newton step on H(z) - E tightens the closed-form root.
  const double w = std::sqrt(1.0 - z * z);
  const double slope = z * (lambda + std::cos(phi) / w);
  if (z > 0.0 && std::abs(slope) > 1e-3) {
    const double refined = z - (classical_energy(z, phi, lambda) - energy) / slope;
    if (refined > 0.0 && refined < 1.0) z = refined;
  }
  if (branch == Branch::Minus) z = -z;
  return coherent_state(model, z, phi);
}

GaussianWidths gaussian_widths(const SpinModel& model, double z) {
  if (!(std::abs(z) < 1.0)) throw DomainError("gaussian_widths: |z'| must be < 1");
  const double q = 1.0 - z * z;
  return {2.0 * model.j() / q, 0.5 * model.j() * q};
}

double energy_spread(const SpinModel& model, const StateVector& state) {
  const auto h = build_hamiltonian(model);
  return std::sqrt(variance(state, h)) / model.j();
}

}  // namespace nlspin
