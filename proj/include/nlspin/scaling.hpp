#pragma once

#include <span>
#include <vector>

#include "nlspin/ensembles.hpp"

namespace nlspin {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = slope x + intercept. Throws std::invalid_argument
// for fewer than two points, mismatched sizes or constant x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// 1/sqrt(J ln J), the abscissa on which jx_diag is linear at E = 1.
double scaling_abscissa(double j);

// F(phi') that reproduces a fitted slope of jx against 1/sqrt(J ln J) through
// jx + 1 = (3 + L)/(3 (L - 1)) / sqrt(F J ln J).
double fitted_scaling_factor(double slope, double lambda);

// Diagonal-ensemble jx of the E = 1 coherent state at phi'.
double separatrix_jx(const BranchedEigenstates& eig, double phi);

struct ScalingSeries {
  double phi = 0.0;
  std::vector<double> j;
  std::vector<double> jx;  // exact diagonal-ensemble values
  LinearFit fit;           // jx against scaling_abscissa(j), free intercept
  double pinned_slope = 0.0;  // least squares of jx + 1 = slope x, intercept held at -1
  double fitted_f = 0.0;      // F reproducing pinned_slope
  double analytic_f = 0.0;    // 1/(2 sigma^2 J) from the coherent-state width

  // Closed form at the fitted F: -1 + pinned_slope x.
  double predicted(double j_value) const;
};

// Fits each phi' column of jx[j_index][phi_index].
std::vector<ScalingSeries> fit_scaling(double lambda, std::span<const double> js,
                                       std::span<const double> phis,
                                       const std::vector<std::vector<double>>& jx);

}  // namespace nlspin
