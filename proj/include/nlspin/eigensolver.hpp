#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlspin/spin_core.hpp"

namespace nlspin {

// Full spectral decomposition T = V diag(values) V^T.
//
// Eigenvectors are stored column-major: column k (contiguous) belongs to
// values[k]. Values are ascending.
struct EigenDecomposition {
  std::vector<double> values;
  std::vector<double> vectors;

  std::size_t size() const { return values.size(); }
  std::span<const double> vector(std::size_t k) const {
    return {vectors.data() + k * size(), size()};
  }
  std::span<double> vector(std::size_t k) {
    return {vectors.data() + k * size(), size()};
  }
};

// Implicit-shift QL with Wilkinson shifts and eigenvector accumulation.
//
// Deterministic: fixed sweep order, rotations applied in a fixed blocked
// order. Throws std::invalid_argument for empty or non-finite input and
// NonConvergenceError (with eigenvalue index and a fingerprint of the
// input) if one eigenvalue needs more than 50 QL sweeps.
EigenDecomposition eigh_tridiagonal(const TridiagonalMatrix& t);

// Eigenvalues only, ascending. Same iteration as eigh_tridiagonal.
std::vector<double> eigvalsh_tridiagonal(const TridiagonalMatrix& t);

}  // namespace nlspin
