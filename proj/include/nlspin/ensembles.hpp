#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nlspin/classical.hpp"
#include "nlspin/spin_core.hpp"
#include "nlspin/states.hpp"

namespace nlspin {

// One state of the branch-resolved eigenbasis. Singlets are exact eigenstates
// (second == first). A self-trapped doublet {first, second} is rotated into
// (|first> + sign |second>)/sqrt2, the combination localized on one branch.
struct BranchState {
  double energy = 0.0;  // per-spin; pair mean for doublets
  Branch branch = Branch::None;
  std::size_t first = 0;
  std::size_t second = 0;
  double sign = 1.0;

  bool is_doublet() const { return first != second; }
};

// Exact eigenpairs computed per parity sector, plus their branch resolution.
struct BranchedEigenstates {
  SpinModel model{1, 2.0};
  std::vector<double> energies;  // exact per-spin eigenvalues, ascending
  std::vector<int> parity;       // +1 or -1 under m -> -m
  std::vector<double> vectors;   // column-major, column k in the full m basis
  std::vector<BranchState> states;  // ascending in energy

  std::size_t size() const { return energies.size(); }
  std::span<const double> vector(std::size_t k) const {
    return {vectors.data() + k * size(), size()};
  }
  // Materializes a branch state in the m basis.
  std::vector<double> state_vector(std::size_t k) const;
};

// Diagonalizes both parity blocks and pairs near-degenerate opposite-parity
// levels above the separatrix. Pairs are doublets when their gap is below
// max(1e-12 J, 1e-3 x local mean spacing) in absolute energy.
BranchedEigenstates solve_branched(const SpinModel& model);

// <k|O|k> for every branch state.
std::vector<double> state_expectations(const BranchedEigenstates& eig, Observable which);

struct DiagonalEnsemble {
  std::vector<double> weights;   // aligned with eig.states
  std::vector<double> energies;  // per-spin
};

// Throws std::invalid_argument on dimension mismatch.
DiagonalEnsemble diagonal_ensemble(const StateVector& state, const BranchedEigenstates& eig);

// sum_k w_k <k|O|k> / J over branch states.
double diagonal_average(const DiagonalEnsemble& ens, const BranchedEigenstates& eig, Observable which);

enum class BranchFilter { Both, Plus, Minus };

struct MicrocanonicalWindow {
  std::size_t count = 21;             // nearest states in energy
  std::optional<double> half_width;   // per-spin; overrides count when set
  BranchFilter branch = BranchFilter::Both;
};

// Unweighted mean of <k|O|k>/J over the window around per-spin energy E.
// A branch filter keeps the requested self-trapped branch plus unpaired
// states. Throws DomainError if the window is empty.
double microcanonical_average(const BranchedEigenstates& eig, Observable which, double energy,
                              const MicrocanonicalWindow& window = {});

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
};

// <psi(t)|O|psi(t)>/J with psi(t) = sum_n c_n e^{-i E_n t}|n>, absolute
// energies and hbar = 1. Eigenstates with |c_n| < 1e-13 and cross terms
// |c_n c_m O_nm| < 1e-14 J are dropped.
TimeSeries evolve_expectation(const StateVector& state, const BranchedEigenstates& eig,
                              Observable which, std::span<const double> times);

// Sampling step with dt * |E_n - E_m| <= 0.1 for every cross term of <O>(t)
// larger than 1e-9 J.
double dephasing_time_step(const StateVector& state, const BranchedEigenstates& eig, Observable which);

std::vector<double> uniform_times(double start, double stop, double dt);

// Trapezoidal (1/T) integral over [t, t + T], linearly interpolating at the
// ends. Throws DomainError when the interval leaves the sampled range.
double time_average(const TimeSeries& series, double t, double duration);

struct AveragingWindow {
  double start = 0.0;
  double duration = 0.0;
};

// t = 10 classical periods, T = 100 periods at the given per-spin energy.
AveragingWindow default_averaging_window(double energy, double lambda);

// Consecutive per-spin gaps of the exact spectrum.
std::vector<double> level_spacings(const BranchedEigenstates& eig);

// Mean per-spin gap between branch states near E (count nearest states).
double local_mean_spacing(const BranchedEigenstates& eig, double energy, std::size_t count = 21);

// Per-spin gap between the even state nearest E and its closest odd partner.
// Throws DomainError unless 1 < E < top of band.
double doublet_splitting(const BranchedEigenstates& eig, double energy);

}  // namespace nlspin
