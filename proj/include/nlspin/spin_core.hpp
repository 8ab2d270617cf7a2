#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlspin {

using Complex = std::complex<double>;

// Nonlinear spin H = -Jx + Lambda/(2J) Jz^2 at fixed spin size J.
//
// J is stored as the integer 2J so that half-integer sizes are exact.
class SpinModel {
 public:
  // Throws std::invalid_argument unless 2J >= 1 and lambda > 1.
  SpinModel(int two_j, double lambda);

  static SpinModel from_spin(double j, double lambda);

  int two_j() const { return two_j_; }
  double j() const { return 0.5 * two_j_; }
  double lambda() const { return lambda_; }
  std::size_t dim() const { return static_cast<std::size_t>(two_j_) + 1; }

  // Magnetic quantum number of basis index k (m = -J + k).
  double m_of(std::size_t k) const { return -j() + static_cast<double>(k); }

 private:
  int two_j_;
  double lambda_;
};

// Real symmetric tridiagonal matrix.
struct TridiagonalMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;  // offdiag[k] couples k and k+1

  std::size_t size() const { return diag.size(); }

  // y = T x for real or complex x.
  std::vector<Complex> apply(std::span<const Complex> x) const;
  std::vector<double> apply(std::span<const double> x) const;

  TridiagonalMatrix scaled(double alpha) const;
};

enum class Observable { Jx, Jz, Jz2 };

// Amplitudes in the Jz basis, ordered m = -J ... +J.
struct StateVector {
  std::vector<Complex> amplitudes;

  std::size_t size() const { return amplitudes.size(); }
  double norm() const;
};

// Ladder factor sqrt(J(J+1) - m(m+1)) between m and m+1.
double ladder_coefficient(double j, double m);

TridiagonalMatrix build_hamiltonian(const SpinModel& model);
TridiagonalMatrix observable_matrix(const SpinModel& model, Observable which);

// <psi|O|psi>. Throws std::invalid_argument on dimension mismatch and
// std::logic_error if the imaginary part exceeds 1e-10.
double expectation(const StateVector& state, const TridiagonalMatrix& obs);

// <psi|O^2|psi> - <psi|O|psi>^2 for a normalized state.
double variance(const StateVector& state, const TridiagonalMatrix& obs);

// <u|O|v> for real vectors.
double matrix_element(std::span<const double> u, const TridiagonalMatrix& obs,
                      std::span<const double> v);

// Parity (m -> -m) reduction of the Hamiltonian.
//
// The even sector uses basis (|k> + |-k>)/sqrt2 for k > 0 plus |0> when J is
// an integer; the odd sector uses (|k> - |-k>)/sqrt2. Sector index 0 is the
// smallest |m|. Both blocks are tridiagonal.
struct ParitySectors {
  TridiagonalMatrix even;
  TridiagonalMatrix odd;
};

ParitySectors parity_sectors(const SpinModel& model);

// Embeds a sector vector into the full m = -J..J basis.
std::vector<double> embed_parity_vector(const SpinModel& model, int parity,
                                        std::span<const double> sector_vec);

}  // namespace nlspin
