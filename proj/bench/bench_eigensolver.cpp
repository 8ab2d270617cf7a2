// Runtime budget check for the tridiagonal eigensolver.
//
// Usage: bench_eigensolver [N] [budget_seconds]
// Decomposes the N x N spin Hamiltonian (J = (N-1)/2, Lambda = 10) with the
// full-basis solver and exits non-zero if it exceeds the budget.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "nlspin/eigensolver.hpp"
#include "nlspin/spin_core.hpp"

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 4001;
  const double budget = argc > 2 ? std::atof(argv[2]) : 60.0;
  const nlspin::SpinModel model(n - 1, 10.0);
  const auto h = nlspin::build_hamiltonian(model);
  const auto t0 = std::chrono::steady_clock::now();
  const auto eig = nlspin::eigh_tridiagonal(h);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("N=%d full decomposition: %.2f s (budget %.0f s), E0/J=%.6f\n", n, secs,
              budget, eig.values.front() / model.j());
  return secs <= budget ? 0 : 1;
}
