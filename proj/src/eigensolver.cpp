#include "nlspin/eigensolver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

#include "nlspin/errors.hpp"

namespace nlspin {
namespace {

constexpr int kMaxSweepsPerEigenvalue = 50;
// Rows of Z transform independently, so rotations from many sweeps are
// buffered and replayed per row block that stays cache-resident.
constexpr std::size_t kRowBlock = 128;
constexpr std::size_t kRotationBuffer = std::size_t{1} << 20;
constexpr std::size_t kWaveSweeps = 16;

struct Rotation {
  double c;
  double s;
  std::size_t i;  // mixes columns i and i+1
};

std::uint64_t fingerprint(const TridiagonalMatrix& t) {
  // FNV-1a over the raw bits of the input.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (double d : t.diag) mix(d);
  for (double e : t.offdiag) mix(e);
  return h;
}

void validate(const TridiagonalMatrix& t) {
  const std::size_t n = t.diag.size();
  if (n == 0) throw std::invalid_argument("eigh_tridiagonal: empty matrix");
  if (t.offdiag.size() + 1 != n) {
    throw std::invalid_argument("eigh_tridiagonal: offdiag must have length N-1");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(t.diag.begin(), t.diag.end(), finite) ||
      !std::all_of(t.offdiag.begin(), t.offdiag.end(), finite)) {
    throw std::invalid_argument("eigh_tridiagonal: non-finite input");
  }
}

// Eigenvector tails of localized states decay below the normal range; flushing
// those values to zero keeps the rotation kernel off the slow subnormal path.
class SubnormalFlush {
 public:
  SubnormalFlush() {
#if defined(__SSE2__)
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | 0x8040);  // FTZ | DAZ
#endif
  }
  ~SubnormalFlush() {
#if defined(__SSE2__)
    _mm_setcsr(saved_);
#endif
  }
  SubnormalFlush(const SubnormalFlush&) = delete;
  SubnormalFlush& operator=(const SubnormalFlush&) = delete;

 private:
  unsigned saved_ = 0;
};

// Reorders a buffer of QL sweeps (each a descending chain of adjacent-column
// rotations) into a wavefront over groups of kWaveSweeps sweeps. Rotation i of
// sweep p runs once every earlier sweep has passed column i-1, so a group touches a
// window of roughly 2*kWaveSweeps columns at a time and each row block stays
// in L1 while several sweeps pass over it. Rows transform independently, so
// any order respecting these dependencies yields identical results.
std::vector<Rotation> wavefront_order(const std::vector<Rotation>& rots,
                                      const std::vector<std::size_t>& sweep_starts) {
  std::vector<Rotation> out;
  out.reserve(rots.size());
  const std::size_t sweeps = sweep_starts.size();
  auto sweep_end = [&](std::size_t p) {
    return p + 1 < sweeps ? sweep_starts[p + 1] : rots.size();
  };
  std::vector<std::size_t> next(kWaveSweeps);
  for (std::size_t g0 = 0; g0 < sweeps; g0 += kWaveSweeps) {
    const std::size_t g1 = std::min(sweeps, g0 + kWaveSweeps);
    for (std::size_t p = g0; p < g1; ++p) next[p - g0] = sweep_starts[p];
    bool pending = true;
    while (pending) {
      pending = false;
      for (std::size_t p = g0; p < g1; ++p) {
        const std::size_t k = p - g0;
        if (next[k] == sweep_end(p)) continue;
        pending = true;
        bool blocked = false;
        for (std::size_t q = 0; q < k && !blocked; ++q) {
          blocked = next[q] != sweep_end(g0 + q) && rots[next[q]].i + 2 > rots[next[k]].i;
        }
        if (blocked) continue;
        out.push_back(rots[next[k]++]);
      }
    }
  }
  return out;
}

// Replays rotations on one row block of the column-major matrix z.
template <std::size_t kFixedLen>
void apply_rotations_block(double* z, std::size_t n, std::size_t r0, std::size_t len,
                           const std::vector<Rotation>& rots) {
  const std::size_t count = kFixedLen ? kFixedLen : len;
  for (const Rotation& rot : rots) {
    double* __restrict zi = z + rot.i * n + r0;
    double* __restrict zj = zi + n;
    const double c = rot.c;
    const double s = rot.s;
#pragma GCC unroll 8
    for (std::size_t r = 0; r < count; ++r) {
      const double f = zj[r];
      const double a = zi[r];
      zj[r] = s * a + c * f;
      zi[r] = c * a - s * f;
    }
  }
}

void apply_rotations(std::vector<double>& z, std::size_t n, const std::vector<Rotation>& rots,
                     const std::vector<std::size_t>& sweep_starts) {
  const std::vector<Rotation> ordered = wavefront_order(rots, sweep_starts);
  const SubnormalFlush ftz;
  for (std::size_t r0 = 0; r0 < n; r0 += kRowBlock) {
    const std::size_t len = std::min(n, r0 + kRowBlock) - r0;
    if (len == kRowBlock) {
      apply_rotations_block<kRowBlock>(z.data(), n, r0, len, ordered);
    } else {
      apply_rotations_block<0>(z.data(), n, r0, len, ordered);
    }
  }
}

// QL on (d, e) in place; e has length n with e[k] coupling k and k+1.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z,
                 const TridiagonalMatrix& input) {
  const std::size_t n = d.size();
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<Rotation> rots;
  std::vector<std::size_t> sweep_starts;
  if (z != nullptr) rots.reserve(std::min(kRotationBuffer, 4 * n * n));

  for (std::size_t l = 0; l < n; ++l) {
    int sweeps = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (sweeps++ == kMaxSweepsPerEigenvalue) {
        std::ostringstream msg;
        msg << "eigh_tridiagonal: no convergence for eigenvalue index " << l << " after "
            << kMaxSweepsPerEigenvalue << " sweeps (N=" << n << ", fingerprint=0x"
            << std::hex << fingerprint(input) << ")";
        throw NonConvergenceError(msg.str());
      }
      // Wilkinson shift from the leading 2x2 block.
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      if (z != nullptr) sweep_starts.push_back(rots.size());
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (z != nullptr) rots.push_back({c, s, i});
      }
      if (z != nullptr && rots.size() >= kRotationBuffer) {
        apply_rotations(*z, n, rots, sweep_starts);
        rots.clear();
        sweep_starts.clear();
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
  if (z != nullptr && !rots.empty()) apply_rotations(*z, n, rots, sweep_starts);
}

}  // namespace

EigenDecomposition eigh_tridiagonal(const TridiagonalMatrix& t) {
  validate(t);
  const std::size_t n = t.diag.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  std::copy(t.offdiag.begin(), t.offdiag.end(), e.begin());
  std::vector<double> z(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) z[k * n + k] = 1.0;

  ql_implicit(d, e, &z, t);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&d](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    std::copy_n(z.begin() + static_cast<std::ptrdiff_t>(order[k] * n), n,
                out.vectors.begin() + static_cast<std::ptrdiff_t>(k * n));
  }
  return out;
}

std::vector<double> eigvalsh_tridiagonal(const TridiagonalMatrix& t) {
  validate(t);
  const std::size_t n = t.diag.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  std::copy(t.offdiag.begin(), t.offdiag.end(), e.begin());
  ql_implicit(d, e, nullptr, t);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace nlspin
