#include "nlspin/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nlspin/eigensolver.hpp"
#include "nlspin/errors.hpp"

namespace nlspin {

namespace {

constexpr double kAmplitudeCutoff = 1e-13;

std::vector<Complex> overlaps(const StateVector& state, const BranchedEigenstates& eig) {
  if (state.size() != eig.size()) {
    throw std::invalid_argument("state has dimension " + std::to_string(state.size()) +
                                ", eigenbasis " + std::to_string(eig.size()));
  }
  const std::size_t n = eig.size();
  std::vector<Complex> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto v = eig.vector(k);
    Complex acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) acc += v[r] * state.amplitudes[r];
    c[k] = acc;
  }
  return c;
}

}  // namespace

std::vector<double> BranchedEigenstates::state_vector(std::size_t k) const {
  const BranchState& s = states.at(k);
  const auto a = vector(s.first);
  std::vector<double> out(a.begin(), a.end());
  if (s.is_doublet()) {
    const auto b = vector(s.second);
    const double r = std::sqrt(0.5);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = r * (out[i] + s.sign * b[i]);
  }
  return out;
}

BranchedEigenstates solve_branched(const SpinModel& model) {
  const auto sectors = parity_sectors(model);
  const auto even = eigh_tridiagonal(sectors.even);
  const EigenDecomposition odd =
      sectors.odd.size() > 0 ? eigh_tridiagonal(sectors.odd) : EigenDecomposition{};

  struct Entry {
    double value;
    int parity;
    std::size_t index;
  };
  std::vector<Entry> merged;
  merged.reserve(model.dim());
  for (std::size_t k = 0; k < even.size(); ++k) merged.push_back({even.values[k], +1, k});
  for (std::size_t k = 0; k < odd.size(); ++k) merged.push_back({odd.values[k], -1, k});
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Entry& a, const Entry& b) { return a.value < b.value; });

  BranchedEigenstates out;
  out.model = model;
  const std::size_t n = model.dim();
  const double j = model.j();
  out.energies.resize(n);
  out.parity.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    const Entry& e = merged[k];
    out.energies[k] = e.value / j;
    out.parity[k] = e.parity;
    const auto sector_vec = e.parity > 0 ? even.vector(e.index) : odd.vector(e.index);
    const auto full = embed_parity_vector(model, e.parity, sector_vec);
    std::copy(full.begin(), full.end(), out.vectors.begin() + static_cast<std::ptrdiff_t>(k * n));
  }

  const auto jz = observable_matrix(model, Observable::Jz);
  const std::size_t reach = 10;
  for (std::size_t k = 0; k < n;) {
    bool paired = false;
    if (k + 1 < n && out.energies[k] > 1.0 && out.parity[k] != out.parity[k + 1]) {
      const std::size_t lo = k >= reach ? k - reach : 0;
      const std::size_t hi = std::min(n - 1, k + reach);
      const double mean_spacing = j * (out.energies[hi] - out.energies[lo]) / static_cast<double>(hi - lo);
      const double threshold = std::max(1e-12 * j, 1e-3 * mean_spacing);
      if (j * (out.energies[k + 1] - out.energies[k]) < threshold) {
        const double a = matrix_element(out.vector(k), jz, out.vector(k + 1));
        const double sign = a >= 0.0 ? 1.0 : -1.0;
        const double e = 0.5 * (out.energies[k] + out.energies[k + 1]);
        out.states.push_back({e, Branch::Plus, k, k + 1, sign});
        out.states.push_back({e, Branch::Minus, k, k + 1, -sign});
        paired = true;
      }
    }
    if (paired) {
      k += 2;
    } else {
      out.states.push_back({out.energies[k], Branch::None, k, k, 1.0});
      ++k;
    }
  }
  return out;
}

std::vector<double> state_expectations(const BranchedEigenstates& eig, Observable which) {
  const auto o = observable_matrix(eig.model, which);
  const double j = eig.model.j();
  std::vector<double> out;
  out.reserve(eig.states.size());
  for (std::size_t k = 0; k < eig.states.size(); ++k) {
    const BranchState& s = eig.states[k];
    if (s.is_doublet() && k > 0 && eig.states[k - 1].first == s.first) {
      // Second member of a pair: reuse the pair's matrix elements.
      const double prev = out.back();
      const auto a = eig.vector(s.first);
      const auto b = eig.vector(s.second);
      const double mean = 0.5 * (matrix_element(a, o, a) + matrix_element(b, o, b)) / j;
      out.push_back(2.0 * mean - prev);
      continue;
    }
    const auto a = eig.vector(s.first);
    if (!s.is_doublet()) {
      out.push_back(matrix_element(a, o, a) / j);
      continue;
    }
    const auto b = eig.vector(s.second);
    const double value = 0.5 * (matrix_element(a, o, a) + matrix_element(b, o, b)) +
                         s.sign * matrix_element(a, o, b);
    out.push_back(value / j);
  }
  return out;
}

DiagonalEnsemble diagonal_ensemble(const StateVector& state, const BranchedEigenstates& eig) {
  const auto c = overlaps(state, eig);
  DiagonalEnsemble ens;
  ens.weights.reserve(eig.states.size());
  ens.energies.reserve(eig.states.size());
  for (const BranchState& s : eig.states) {
    const double w = s.is_doublet() ? 0.5 * std::norm(c[s.first] + s.sign * c[s.second])
                                    : std::norm(c[s.first]);
    ens.weights.push_back(w);
    ens.energies.push_back(s.energy);
  }
  return ens;
}

double diagonal_average(const DiagonalEnsemble& ens, const BranchedEigenstates& eig, Observable which) {
  if (ens.weights.size() != eig.states.size())
    throw std::invalid_argument("diagonal_average: ensemble does not match the eigenbasis");
  const auto values = state_expectations(eig, which);
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) acc += ens.weights[k] * values[k];
  return acc;
}

double microcanonical_average(const BranchedEigenstates& eig, Observable which, double energy,
                              const MicrocanonicalWindow& window) {
  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < eig.states.size(); ++k) {
    const Branch b = eig.states[k].branch;
    if (window.branch == BranchFilter::Plus && b == Branch::Minus) continue;
    if (window.branch == BranchFilter::Minus && b == Branch::Plus) continue;
    candidates.push_back(k);
  }
  auto distance = [&](std::size_t k) { return std::abs(eig.states[k].energy - energy); };
  std::vector<std::size_t> chosen;
  if (window.half_width) {
    for (std::size_t k : candidates)
      if (distance(k) <= *window.half_width) chosen.push_back(k);
  } else {
    const std::size_t take = std::min(window.count, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                      candidates.end(), [&](std::size_t a, std::size_t b) { return distance(a) < distance(b); });
    chosen.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take));
  }
  if (chosen.empty()) {
    std::ostringstream os;
    os << "microcanonical_average: empty window at E = " << energy;
    throw DomainError(os.str());
  }
  const auto values = state_expectations(eig, which);
  double acc = 0.0;
  for (std::size_t k : chosen) acc += values[k];
  return acc / static_cast<double>(chosen.size());
}

namespace {

// Terms conj(c_p) c_q O_pq e^{i (E_p - E_q) t} of <O>(t) in the eigenbasis,
// dropping those below kTermCutoff * J in magnitude.
struct Oscillators {
  std::vector<double> energies;    // absolute
  std::vector<Complex> amplitudes;
  std::vector<double> diag;        // O_pp
  struct Term {
    std::size_t p;
    std::size_t q;
    double value;  // O_pq, p < q
  };
  std::vector<Term> terms;
};

constexpr double kTermCutoff = 1e-14;
constexpr double kResolvedTerm = 1e-9;

Oscillators project(const StateVector& state, const BranchedEigenstates& eig, Observable which) {
  const auto c_all = overlaps(state, eig);
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < c_all.size(); ++k)
    if (std::abs(c_all[k]) >= kAmplitudeCutoff) kept.push_back(k);

  const double j = eig.model.j();
  const auto o = observable_matrix(eig.model, which);
  Oscillators out;
  const std::size_t m = kept.size();
  std::vector<std::vector<double>> image(m);
  for (std::size_t q = 0; q < m; ++q) image[q] = o.apply(eig.vector(kept[q]));
  out.energies.resize(m);
  out.amplitudes.resize(m);
  out.diag.resize(m);
  for (std::size_t p = 0; p < m; ++p) {
    out.energies[p] = eig.energies[kept[p]] * j;
    out.amplitudes[p] = c_all[kept[p]];
  }
  for (std::size_t p = 0; p < m; ++p) {
    const auto vp = eig.vector(kept[p]);
    for (std::size_t q = p; q < m; ++q) {
      double acc = 0.0;
      for (std::size_t r = 0; r < vp.size(); ++r) acc += vp[r] * image[q][r];
      if (p == q) {
        out.diag[p] = acc;
      } else if (std::abs(out.amplitudes[p]) * std::abs(out.amplitudes[q]) * std::abs(acc) >= kTermCutoff * j) {
        out.terms.push_back({p, q, acc});
      }
    }
  }
  return out;
}

}  // namespace

TimeSeries evolve_expectation(const StateVector& state, const BranchedEigenstates& eig,
                              Observable which, std::span<const double> times) {
  for (double t : times)
    if (!(t >= 0.0)) throw std::invalid_argument("evolve_expectation: times must be >= 0");
  const Oscillators osc = project(state, eig, which);
  const std::size_t m = osc.energies.size();
  double static_part = 0.0;
  for (std::size_t p = 0; p < m; ++p) static_part += osc.diag[p] * std::norm(osc.amplitudes[p]);

  TimeSeries series;
  series.times.assign(times.begin(), times.end());
  series.values.resize(times.size());
  std::vector<Complex> a(m);
  const double j = eig.model.j();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    for (std::size_t q = 0; q < m; ++q) a[q] = osc.amplitudes[q] * std::polar(1.0, -osc.energies[q] * t);
    double value = static_part;
    for (const auto& term : osc.terms) value += 2.0 * term.value * std::real(std::conj(a[term.p]) * a[term.q]);
    series.values[i] = value / j;
  }
  return series;
}

double dephasing_time_step(const StateVector& state, const BranchedEigenstates& eig, Observable which) {
  const Oscillators osc = project(state, eig, which);
  const double j = eig.model.j();
  double fastest = 0.0;
  for (const auto& term : osc.terms) {
    const double size = std::abs(osc.amplitudes[term.p]) * std::abs(osc.amplitudes[term.q]) * std::abs(term.value);
    if (size >= kResolvedTerm * j)
      fastest = std::max(fastest, std::abs(osc.energies[term.p] - osc.energies[term.q]));
  }
  return fastest > 0.0 ? 0.1 / fastest : 1.0;
}

std::vector<double> uniform_times(double start, double stop, double dt) {
  if (!(dt > 0.0) || stop < start) throw std::invalid_argument("uniform_times: bad range");
  const auto steps = static_cast<std::size_t>(std::ceil((stop - start) / dt - 1e-9));
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = std::min(stop, start + static_cast<double>(i) * dt);
  return t;
}

double time_average(const TimeSeries& series, double t, double duration) {
  const auto& x = series.times;
  const auto& y = series.values;
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("time_average: malformed series");
  if (!(duration > 0.0)) throw std::invalid_argument("time_average: duration must be positive");
  const double a = t;
  const double b = t + duration;
  const double slack = 1e-9 * std::max(1.0, std::abs(b));
  if (a < x.front() - slack || b > x.back() + slack) {
    std::ostringstream os;
    os << "time_average: [" << a << ", " << b << "] outside sampled range [" << x.front() << ", "
       << x.back() << "]";
    throw DomainError(os.str());
  }
  auto value_at = [&](double s) {
    const auto it = std::upper_bound(x.begin(), x.end(), s);
    if (it == x.begin()) return y.front();
    if (it == x.end()) return y.back();
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double f = (s - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + f * (y[i] - y[i - 1]);
  };
  double acc = 0.0;
  double prev_t = a;
  double prev_v = value_at(a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= a) continue;
    if (x[i] >= b) break;
    acc += 0.5 * (prev_v + y[i]) * (x[i] - prev_t);
    prev_t = x[i];
    prev_v = y[i];
  }
  acc += 0.5 * (prev_v + value_at(b)) * (b - prev_t);
  return acc / duration;
}

AveragingWindow default_averaging_window(double energy, double lambda) {
  const double period = orbit_period(energy, lambda);
  return {10.0 * period, 100.0 * period};
}

std::vector<double> level_spacings(const BranchedEigenstates& eig) {
  std::vector<double> out;
  for (std::size_t k = 1; k < eig.energies.size(); ++k) out.push_back(eig.energies[k] - eig.energies[k - 1]);
  return out;
}

double local_mean_spacing(const BranchedEigenstates& eig, double energy, std::size_t count) {
  std::vector<double> levels;
  for (const BranchState& s : eig.states)
    if (s.branch != Branch::Minus) levels.push_back(s.energy);
  if (levels.size() < 2 || count < 2) throw DomainError("local_mean_spacing: too few levels");
  count = std::min(count, levels.size());
  std::vector<std::size_t> idx(levels.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return std::abs(levels[a] - energy) < std::abs(levels[b] - energy);
                    });
  const auto [lo, hi] = std::minmax_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
  return (levels[*hi] - levels[*lo]) / static_cast<double>(*hi - *lo);
}

double doublet_splitting(const BranchedEigenstates& eig, double energy) {
  if (!(energy > 1.0 && energy < classical_energy_max(eig.model.lambda()))) {
    std::ostringstream os;
    os << "doublet_splitting: E = " << energy << " is outside the self-trapped band";
    throw DomainError(os.str());
  }
  auto nearest = [&](int parity, double target) {
    std::size_t best = eig.size();
    for (std::size_t k = 0; k < eig.size(); ++k) {
      if (eig.parity[k] != parity) continue;
      if (best == eig.size() || std::abs(eig.energies[k] - target) < std::abs(eig.energies[best] - target))
        best = k;
    }
    return best;
  };
  const std::size_t e = nearest(+1, energy);
  const std::size_t o = nearest(-1, eig.energies.at(e));
  if (o == eig.size()) throw DomainError("doublet_splitting: no odd-parity partner");
  return std::abs(eig.energies[e] - eig.energies[o]);
}

}  // namespace nlspin
