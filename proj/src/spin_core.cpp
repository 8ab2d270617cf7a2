#include "nlspin/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlspin {

SpinModel::SpinModel(int two_j, double lambda) : two_j_(two_j), lambda_(lambda) {
  if (two_j < 1) {
    throw std::invalid_argument("spin size must satisfy 2J >= 1, got 2J=" +
                                std::to_string(two_j));
  }
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("nonlinearity must satisfy Lambda > 1, got " +
                                std::to_string(lambda));
  }
}

SpinModel SpinModel::from_spin(double j, double lambda) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (std::abs(twice - rounded) > 1e-9) {
    throw std::invalid_argument("spin size must be an integer or half-integer, got " +
                                std::to_string(j));
  }
  return SpinModel(static_cast<int>(rounded), lambda);
}

std::vector<Complex> TridiagonalMatrix::apply(std::span<const Complex> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw std::invalid_argument("tridiagonal apply: dimension mismatch");
  std::vector<Complex> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = diag[k] * x[k];
    if (k > 0) acc += offdiag[k - 1] * x[k - 1];
    if (k + 1 < n) acc += offdiag[k] * x[k + 1];
    y[k] = acc;
  }
  return y;
}

std::vector<double> TridiagonalMatrix::apply(std::span<const double> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw std::invalid_argument("tridiagonal apply: dimension mismatch");
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = diag[k] * x[k];
    if (k > 0) acc += offdiag[k - 1] * x[k - 1];
    if (k + 1 < n) acc += offdiag[k] * x[k + 1];
    y[k] = acc;
  }
  return y;
}

TridiagonalMatrix TridiagonalMatrix::scaled(double alpha) const {
  TridiagonalMatrix out = *this;
  for (double& d : out.diag) d *= alpha;
  for (double& e : out.offdiag) e *= alpha;
  return out;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const Complex& c : amplitudes) s += std::norm(c);
  return std::sqrt(s);
}

double ladder_coefficient(double j, double m) {
  const double arg = j * (j + 1.0) - m * (m + 1.0);
  return arg > 0.0 ? std::sqrt(arg) : 0.0;
}

TridiagonalMatrix build_hamiltonian(const SpinModel& model) {
  const std::size_t n = model.dim();
  const double j = model.j();
  TridiagonalMatrix h;
  h.diag.resize(n);
  h.offdiag.resize(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = model.m_of(k);
    h.diag[k] = model.lambda() * m * m / (2.0 * j);
    if (k + 1 < n) h.offdiag[k] = -0.5 * ladder_coefficient(j, m);
  }
  return h;
}

TridiagonalMatrix observable_matrix(const SpinModel& model, Observable which) {
  const std::size_t n = model.dim();
  const double j = model.j();
  TridiagonalMatrix o;
  o.diag.assign(n, 0.0);
  o.offdiag.assign(n - 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = model.m_of(k);
    switch (which) {
      case Observable::Jx:
        if (k + 1 < n) o.offdiag[k] = 0.5 * ladder_coefficient(j, m);
        break;
      case Observable::Jz:
        o.diag[k] = m;
        break;
      case Observable::Jz2:
        o.diag[k] = m * m;
        break;
    }
  }
  return o;
}

double expectation(const StateVector& state, const TridiagonalMatrix& obs) {
  if (state.size() != obs.size()) {
    throw std::invalid_argument("expectation: state has dimension " +
                                std::to_string(state.size()) + ", observable " +
                                std::to_string(obs.size()));
  }
  const auto& c = state.amplitudes;
  const std::size_t n = c.size();
  Complex acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += obs.diag[k] * std::norm(c[k]);
    if (k + 1 < n) {
      // Hermitian pair (k, k+1) + (k+1, k).
      acc += 2.0 * obs.offdiag[k] * std::real(std::conj(c[k]) * c[k + 1]);
    }
  }
  if (std::abs(acc.imag()) > 1e-10) {
    throw std::logic_error("expectation: non-negligible imaginary part");
  }
  return acc.real();
}

double variance(const StateVector& state, const TridiagonalMatrix& obs) {
  const double mean = expectation(state, obs);
  const auto image = obs.apply(state.amplitudes);
  double second = 0.0;
  for (const Complex& x : image) second += std::norm(x);
  return std::max(0.0, second - mean * mean);
}

double matrix_element(std::span<const double> u, const TridiagonalMatrix& obs,
                      std::span<const double> v) {
  const std::size_t n = obs.size();
  if (u.size() != n || v.size() != n) {
    throw std::invalid_argument("matrix_element: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += u[k] * obs.diag[k] * v[k];
    if (k + 1 < n) acc += obs.offdiag[k] * (u[k] * v[k + 1] + u[k + 1] * v[k]);
  }
  return acc;
}

namespace {

struct SectorLayout {
  bool integer_spin;
  std::size_t center_up;  // full index of m = 0 (integer) or m = +1/2
  std::size_t even_dim;
  std::size_t odd_dim;
};

SectorLayout layout_of(const SpinModel& model) {
  const int two_j = model.two_j();
  SectorLayout l{};
  l.integer_spin = (two_j % 2 == 0);
  if (l.integer_spin) {
    l.center_up = static_cast<std::size_t>(two_j / 2);
    l.even_dim = static_cast<std::size_t>(two_j / 2) + 1;
    l.odd_dim = static_cast<std::size_t>(two_j / 2);
  } else {
    l.center_up = static_cast<std::size_t>((two_j + 1) / 2);
    l.even_dim = static_cast<std::size_t>((two_j + 1) / 2);
    l.odd_dim = l.even_dim;
  }
  return l;
}

}  // namespace

ParitySectors parity_sectors(const SpinModel& model) {
  const TridiagonalMatrix full = build_hamiltonian(model);
  const SectorLayout l = layout_of(model);
  const std::size_t c = l.center_up;
  ParitySectors out;
  auto& ev = out.even;
  auto& od = out.odd;
  ev.diag.resize(l.even_dim);
  ev.offdiag.resize(l.even_dim - 1);
  od.diag.resize(l.odd_dim);
  od.offdiag.resize(l.odd_dim > 0 ? l.odd_dim - 1 : 0);

  if (l.integer_spin) {
    // even: p = 0..J, odd: p = 1..J stored at q = p-1.
    for (std::size_t p = 0; p < l.even_dim; ++p) {
      ev.diag[p] = full.diag[c + p];
      if (p + 1 < l.even_dim) {
        ev.offdiag[p] = (p == 0 ? std::numbers::sqrt2 : 1.0) * full.offdiag[c + p];
      }
    }
    for (std::size_t q = 0; q < l.odd_dim; ++q) {
      const std::size_t p = q + 1;
      od.diag[q] = full.diag[c + p];
      if (q + 1 < l.odd_dim) od.offdiag[q] = full.offdiag[c + p];
    }
  } else {
    // p = 0.. with m = p + 1/2; the m = +-1/2 coupling folds onto the diagonal.
    const double centre_coupling = full.offdiag[c - 1];
    for (std::size_t p = 0; p < l.even_dim; ++p) {
      ev.diag[p] = full.diag[c + p];
      od.diag[p] = full.diag[c + p];
      if (p + 1 < l.even_dim) {
        ev.offdiag[p] = full.offdiag[c + p];
        od.offdiag[p] = full.offdiag[c + p];
      }
    }
    ev.diag[0] += centre_coupling;
    od.diag[0] -= centre_coupling;
  }
  return out;
}

std::vector<double> embed_parity_vector(const SpinModel& model, int parity,
                                        std::span<const double> sector_vec) {
  const SectorLayout l = layout_of(model);
  const std::size_t expected = parity > 0 ? l.even_dim : l.odd_dim;
  if (sector_vec.size() != expected) {
    throw std::invalid_argument("embed_parity_vector: sector dimension mismatch");
  }
  std::vector<double> full(model.dim(), 0.0);
  const double r = std::numbers::sqrt2 / 2.0;
  const double sgn = parity > 0 ? 1.0 : -1.0;
  const std::size_t c = l.center_up;
  for (std::size_t q = 0; q < sector_vec.size(); ++q) {
    const double v = sector_vec[q];
    if (l.integer_spin) {
      if (parity > 0 && q == 0) {
        full[c] = v;
        continue;
      }
      const std::size_t p = parity > 0 ? q : q + 1;
      full[c + p] = r * v;
      full[c - p] = sgn * r * v;
    } else {
      full[c + q] = r * v;
      full[c - 1 - q] = sgn * r * v;
    }
  }
  return full;
}

}  // namespace nlspin
