#include "nlspin/scaling.hpp"

#include <cmath>
#include <stdexcept>

#include "nlspin/semiclassics.hpp"

namespace nlspin {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("linear_fit: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: x is constant");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

double scaling_abscissa(double j) { return 1.0 / std::sqrt(j * std::log(j)); }

double fitted_scaling_factor(double slope, double lambda) {
  const double c = (3.0 + lambda) / (3.0 * (lambda - 1.0));
  return (c / slope) * (c / slope);
}

double separatrix_jx(const BranchedEigenstates& eig, double phi) {
  const auto cs = coherent_state_for_energy(eig.model, 1.0, phi, Branch::None);
  return diagonal_average(diagonal_ensemble(cs.state, eig), eig, Observable::Jx);
}

double ScalingSeries::predicted(double j_value) const {
  return -1.0 + pinned_slope * scaling_abscissa(j_value);
}

std::vector<ScalingSeries> fit_scaling(double lambda, std::span<const double> js,
                                       std::span<const double> phis,
                                       const std::vector<std::vector<double>>& jx) {
  if (jx.size() != js.size()) throw std::invalid_argument("fit_scaling: one row per J expected");
  std::vector<ScalingSeries> out;
  for (std::size_t p = 0; p < phis.size(); ++p) {
    ScalingSeries s;
    s.phi = phis[p];
    std::vector<double> x;
    for (std::size_t i = 0; i < js.size(); ++i) {
      if (jx[i].size() != phis.size()) throw std::invalid_argument("fit_scaling: ragged rows");
      s.j.push_back(js[i]);
      s.jx.push_back(jx[i][p]);
      x.push_back(scaling_abscissa(js[i]));
    }
    s.fit = linear_fit(x, s.jx);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += x[i] * (s.jx[i] + 1.0);
      sxx += x[i] * x[i];
    }
    s.pinned_slope = sxy / sxx;
    s.fitted_f = fitted_scaling_factor(s.pinned_slope, lambda);
    s.analytic_f = scaling_factor(SpinModel::from_spin(js.front(), lambda), s.phi);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace nlspin
