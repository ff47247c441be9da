// Test-only oracles, independent of the library's computation paths:
// power iteration for spectral norms, characteristic-polynomial root finding
// for spectral radii, and seeded generators for random fixtures.
#pragma once

#include <complex>
#include <random>
#include <vector>

#include "dwell/cycles.hpp"
#include "dwell/matrix.hpp"

namespace oracle {

/// Spectral norm via power iteration on M^H M (no SVD involved).
inline double power_iteration_norm(const dwell::ComplexMatrix& m, std::uint64_t seed = 1234) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  dwell::ComplexVector v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {gauss(rng), gauss(rng)};
  v.normalize();
  const dwell::ComplexMatrix h = m.adjoint() * m;
  double lam = 0.0;
  for (int it = 0; it < 200000; ++it) {
    dwell::ComplexVector w = h * v;
    const double nl = w.norm();
    if (nl == 0.0) return 0.0;
    v = w / nl;
    if (it > 2 && std::abs(nl - lam) <= 1e-15 * std::max(1.0, nl)) {
      lam = nl;
      break;
    }
    lam = nl;
  }
  return std::sqrt(lam);
}

/// Monic characteristic polynomial coefficients via Faddeev-LeVerrier:
/// p(x) = x^n + c[n-1] x^(n-1) + ... + c[0].
inline std::vector<double> charpoly(const dwell::RealMatrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<double> c(n, 0.0);
  dwell::RealMatrix m = dwell::RealMatrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const dwell::RealMatrix am = a * m;
    const double ck = -am.trace() / static_cast<double>(k);
    c[n - k] = ck;
    m = am + ck * dwell::RealMatrix::Identity(n, n);
  }
  return c;
}

/// Durand-Kerner simultaneous root iteration on a monic polynomial.
inline std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
  using C = std::complex<double>;
  const size_t n = c.size();
  auto eval = [&](C x) {
    C p{1.0, 0.0};
    for (size_t k = n; k-- > 0;) p = p * x + c[k];
    return p;
  };
  std::vector<C> r(n);
  const C w{0.4, 0.9};
  C acc{1.0, 0.0};
  for (size_t i = 0; i < n; ++i) {
    acc *= w;
    r[i] = acc;
  }
  for (int it = 0; it < 500; ++it) {
    double delta = 0.0;
    for (size_t i = 0; i < n; ++i) {
      C denom{1.0, 0.0};
      for (size_t j = 0; j < n; ++j)
        if (j != i) denom *= (r[i] - r[j]);
      const C step = eval(r[i]) / denom;
      r[i] -= step;
      delta = std::max(delta, std::abs(step));
    }
    if (delta < 1e-15) break;
  }
  return r;
}

/// Spectral radius from the characteristic polynomial roots.
inline double spectral_radius_oracle(const dwell::RealMatrix& a) {
  double rho = 0.0;
  for (const auto& r : poly_roots(charpoly(a))) rho = std::max(rho, std::abs(r));
  return rho;
}

inline dwell::RealMatrix random_matrix(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  dwell::RealMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = gauss(rng);
  return m;
}

inline dwell::ComplexMatrix random_complex_matrix(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  dwell::ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {gauss(rng), gauss(rng)};
  return m;
}

/// Haar-ish random unitary: QR of a complex Gaussian with phase-fixed R.
inline dwell::ComplexMatrix random_unitary(Eigen::Index n, std::uint64_t seed) {
  const dwell::ComplexMatrix g = random_complex_matrix(n, seed);
  Eigen::HouseholderQR<dwell::ComplexMatrix> qr(g);
  dwell::ComplexMatrix q = qr.householderQ();
  const dwell::ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto d = r(i, i);
    q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : std::complex<double>{1, 0});
  }
  return q;
}

/// Random orthogonal (real) matrix.
inline dwell::RealMatrix random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  const dwell::RealMatrix g = random_matrix(n, seed);
  Eigen::HouseholderQR<dwell::RealMatrix> qr(g);
  dwell::RealMatrix q = qr.householderQ();
  const dwell::RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

/// Random Schur-stable matrix with the given spectral radius; generic, hence
/// non-defective for test purposes.
inline dwell::RealMatrix random_stable(Eigen::Index n, std::uint64_t seed, double rho = 0.85) {
  dwell::RealMatrix m = random_matrix(n, seed);
  m *= rho / dwell::spectral_radius(m);
  return m;
}

/// Simultaneously triangularizable Schur-stable pair: A_i = Q T_i Q^-1 with a
/// shared signed power-of-two diagonal Q and upper-triangular T_i whose
/// diagonals are distinct and ascending. Both the similarity and the
/// triangular structure are exact in floating point, so the pair is exactly
/// co-triangularizable as stored; a dense random Q would leave only
/// approximate structure, and the n-fold eigenvalue of |S||S^-1| at 1
/// amplifies that noise like its n-th root.
inline std::pair<dwell::RealMatrix, dwell::RealMatrix> random_triangularizable_pair(
    Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> off(-0.4, 0.4);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  std::bernoulli_distribution sign(0.5);
  std::uniform_int_distribution<int> expo(-2, 2);
  dwell::RealVector q(n);
  for (Eigen::Index i = 0; i < n; ++i)
    q(i) = (sign(rng) ? 1.0 : -1.0) * std::ldexp(1.0, expo(rng));
  auto make_t = [&]() {
    dwell::RealMatrix t = dwell::RealMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      // ascending diagonal: the eigen-order then matches the diagonal order
      t(i, i) = -0.85 + 1.6 * static_cast<double>(i) / std::max<double>(1, n - 1) + jitter(rng);
      for (Eigen::Index j = i + 1; j < n; ++j) t(i, j) = off(rng);
    }
    dwell::RealMatrix a = t;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = t(i, j) * q(i) / q(j);
    return a;
  };
  return {make_t(), make_t()};
}

/// Random doubly weighted digraph for the cycle-optimization oracle checks:
/// w- in [0.1, 2], w+ in [-1, 3].
inline dwell::SwitchingGraph random_graph(int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution present(0.5);
  std::uniform_real_distribution<double> wp(-1.0, 3.0);
  std::uniform_real_distribution<double> wm(0.1, 2.0);
  dwell::SwitchingGraph g;
  g.m = m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j || !present(rng)) continue;
      g.edges.push_back({i, j, wp(rng), wm(rng)});
    }
  return g;
}

/// Enumeration-based optima; the ground truth for small graphs.
inline std::optional<double> best_ratio_by_enumeration(const dwell::SwitchingGraph& g) {
  std::optional<double> best;
  for (const auto& c : dwell::enumerate_cycles(g)) {
    const double r = dwell::cycle_ratio(g, c);
    if (!best || r > *best) best = r;
  }
  return best;
}

inline std::optional<double> best_mean_by_enumeration(const dwell::SwitchingGraph& g) {
  std::optional<double> best;
  for (const auto& c : dwell::enumerate_cycles(g)) {
    const double r = dwell::cycle_mean(g, c);
    if (!best || r > *best) best = r;
  }
  return best;
}

/// Block-diagonal assembly of Jordan blocks, conjugated by a random
/// orthogonal similarity; the standard defective fixture.
inline dwell::RealMatrix jordan_fixture(const std::vector<std::pair<double, int>>& blocks,
                                        std::uint64_t seed) {
  int n = 0;
  for (const auto& [lam, k] : blocks) n += k;
  dwell::RealMatrix j = dwell::RealMatrix::Zero(n, n);
  int at = 0;
  for (const auto& [lam, k] : blocks) {
    for (int i = 0; i < k; ++i) {
      j(at + i, at + i) = lam;
      if (i + 1 < k) j(at + i, at + i + 1) = 1.0;
    }
    at += k;
  }
  const dwell::RealMatrix q = random_orthogonal(n, seed);
  return q * j * q.transpose();
}

/// Real matrix with a defective complex-conjugate eigenvalue pair: two
/// rotation blocks chained by an identity coupling, conjugated orthogonally.
inline dwell::RealMatrix complex_defective_fixture(double modulus, double angle,
                                                   std::uint64_t seed) {
  dwell::RealMatrix r(2, 2);
  r << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
  r *= modulus;
  dwell::RealMatrix j = dwell::RealMatrix::Zero(4, 4);
  j.block<2, 2>(0, 0) = r;
  j.block<2, 2>(2, 2) = r;
  j.block<2, 2>(0, 2) = dwell::RealMatrix::Identity(2, 2);
  const dwell::RealMatrix q = random_orthogonal(4, seed);
  return q * j * q.transpose();
}

}  // namespace oracle
