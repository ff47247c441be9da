#include "dwell/modal.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace dwell {

namespace {

using Complex = std::complex<double>;

void check_square_finite(const RealMatrix& a, const char* who) {
  if (a.size() == 0 || a.rows() != a.cols())
    throw DimensionMismatchError(std::string(who) + ": matrix must be square and non-empty");
  if (!a.allFinite()) throw ValidationError(std::string(who) + ": matrix has non-finite entries");
}

void require_schur(double rho) {
  if (!(rho < 1.0))
    throw NotSchurStableError("spectral radius " + std::to_string(rho) + " is not < 1");
}

/// Transitive-closure clustering of eigenvalues at pairwise distance < tol.
/// Clusters are returned sorted by (re, im) of their mean; indices inside a
/// cluster keep ascending order.
std::vector<std::vector<int>> cluster_eigenvalues(const ComplexVector& lam, double tol) {
  const int n = static_cast<int>(lam.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(lam(i) - lam(j)) < tol) parent[find(i)] = find(j);
  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> clusters;
  for (auto& g : groups)
    if (!g.empty()) clusters.push_back(std::move(g));
  auto center = [&](const std::vector<int>& c) {
    Complex s{0, 0};
    for (int i : c) s += lam(i);
    return s / static_cast<double>(c.size());
  };
  std::sort(clusters.begin(), clusters.end(), [&](const auto& a, const auto& b) {
    Complex ca = center(a), cb = center(b);
    if (ca.real() != cb.real()) return ca.real() < cb.real();
    return ca.imag() < cb.imag();
  });
  return clusters;
}

/// Orthonormal basis of the numerical null space: right singular vectors with
/// singular value <= rel_tol * max(1, sigma_max).
ComplexMatrix null_space(const ComplexMatrix& m, double rel_tol) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thr = rel_tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= thr) ++k;
  return svd.matrixV().rightCols(k);
}

/// Rotate a column's phase so its largest-modulus entry is real positive.
Complex phase_of(const ComplexVector& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const Complex top = v(imax);
  const double mag = std::abs(top);
  return mag > 0.0 ? top / mag : Complex{1.0, 0.0};
}

void fix_phase(Eigen::Ref<ComplexMatrix> v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) v.col(j) /= phase_of(v.col(j));
}

struct JordanChain {
  Complex lambda;
  std::vector<ComplexVector> vecs;  // vecs[0] = eigenvector, vecs.back() = chain top
};

/// Greedy orthonormal growth: returns the residual of v against span(q_cols).
ComplexVector residual_against(const std::vector<ComplexVector>& q_cols, const ComplexVector& v) {
  ComplexVector r = v;
  for (const auto& q : q_cols) r -= q * q.dot(r);
  return r;
}

/// Build the Jordan chains of one eigenvalue cluster (algebraic multiplicity
/// = mult). Chains are found top-down: new chain tops at height k are chosen
/// from null(N^k) maximally independent of null(N^{k-1}) and of the height-k
/// vectors of longer chains already placed.
std::vector<JordanChain> build_chains(const ComplexMatrix& ac, Complex center, int mult,
                                      double rank_tol) {
  const Eigen::Index n = ac.rows();
  const ComplexMatrix nmat = ac - center * ComplexMatrix::Identity(n, n);

  std::vector<ComplexMatrix> nullb;  // nullb[k-1] = basis of null(N^k)
  std::vector<int> d;                // d[k-1] = dim null(N^k)
  ComplexMatrix pw = ComplexMatrix::Identity(n, n);
  int s = 0;
  while (true) {
    pw = nmat * pw;
    ComplexMatrix nb = null_space(pw, rank_tol);
    const int dim = static_cast<int>(nb.cols());
    if (!d.empty() && dim <= d.back())
      throw ChainFailureError("generalized eigenspace stopped growing before reaching multiplicity");
    d.push_back(dim);
    nullb.push_back(std::move(nb));
    ++s;
    if (dim == mult) break;
    if (dim > mult) throw ChainFailureError("null space exceeds cluster multiplicity");
    if (s > mult) throw ChainFailureError("chain index exceeds cluster multiplicity");
  }

  // blocks[k-1] = number of Jordan blocks of size >= k; must be nonincreasing
  std::vector<int> blocks(s);
  for (int k = 1; k <= s; ++k) blocks[k - 1] = d[k - 1] - (k >= 2 ? d[k - 2] : 0);
  for (int k = 1; k < s; ++k)
    if (blocks[k] > blocks[k - 1]) throw ChainFailureError("inconsistent Weyr characteristic");

  std::vector<JordanChain> chains;
  std::vector<ComplexVector> tops;    // chain tops, parallel to chains
  std::vector<int> lengths;
  for (int k = s; k >= 1; --k) {
    const int want = blocks[k - 1] - (k < s ? blocks[k] : 0);
    if (want == 0) continue;
    // span to avoid: null(N^{k-1}) plus height-k vectors of longer chains
    std::vector<ComplexVector> q_cols;
    auto absorb = [&](const ComplexVector& w) {
      ComplexVector r = residual_against(q_cols, w);
      const double nr = r.norm();
      if (nr > 1e-12) q_cols.push_back(r / nr);
    };
    if (k >= 2)
      for (Eigen::Index j = 0; j < nullb[k - 2].cols(); ++j) absorb(nullb[k - 2].col(j));
    for (size_t c = 0; c < tops.size(); ++c) {
      ComplexVector h = tops[c];
      for (int step = 0; step < lengths[c] - k; ++step) h = nmat * h;
      absorb(h);
    }
    const ComplexMatrix& cand = nullb[k - 1];
    std::vector<bool> used(cand.cols(), false);
    for (int pick = 0; pick < want; ++pick) {
      double best = -1.0;
      Eigen::Index best_j = -1;
      for (Eigen::Index j = 0; j < cand.cols(); ++j) {
        if (used[j]) continue;
        const double rn = residual_against(q_cols, cand.col(j)).norm();
        if (rn > best) {
          best = rn;
          best_j = j;
        }
      }
      if (best_j < 0 || best < 1e-6)
        throw ChainFailureError("could not find an independent chain top");
      used[best_j] = true;
      tops.push_back(cand.col(best_j));
      lengths.push_back(k);
      absorb(cand.col(best_j));
    }
  }

  for (size_t c = 0; c < tops.size(); ++c) {
    JordanChain ch;
    ch.lambda = center;
    ch.vecs.assign(lengths[c], ComplexVector());
    ch.vecs[lengths[c] - 1] = tops[c];
    for (int j = lengths[c] - 2; j >= 0; --j) ch.vecs[j] = nmat * ch.vecs[j + 1];
    const double bottom = ch.vecs[0].norm();
    if (bottom < 1e-12) throw ChainFailureError("degenerate chain bottom");
    // one scale and one phase per chain keeps the chain relation intact
    const Complex scale = bottom * phase_of(ch.vecs[0] / bottom);
    for (auto& v : ch.vecs) v /= scale;
    chains.push_back(std::move(ch));
  }
  // long chains first, then discovery order; stable within a cluster
  std::stable_sort(chains.begin(), chains.end(),
                   [](const JordanChain& a, const JordanChain& b) {
                     return a.vecs.size() > b.vecs.size();
                   });
  return chains;
}

}  // namespace

double choose_epsilon(const RealMatrix& a) {
  check_square_finite(a, "choose_epsilon");
  const double rho = spectral_radius(a);
  require_schur(rho);
  return 0.5 * (1.0 - rho);
}

double transient_gamma(const std::vector<ModalForm>& forms) {
  double bmax = 0.0, imax = 0.0;
  for (const auto& f : forms) {
    bmax = std::max(bmax, spectral_norm(f.basis));
    imax = std::max(imax, spectral_norm(ComplexMatrix(f.basis.partialPivLu().inverse())));
  }
  return bmax * imax;
}

double reconstruction_error(const ModalForm& f, const RealMatrix& a) {
  ComplexMatrix rec = f.basis * f.factor * f.basis.partialPivLu().inverse();
  return spectral_norm(ComplexMatrix(rec - a.cast<Complex>()));
}

ModalForm eigendecompose(const RealMatrix& a, double rank_tol) {
  check_square_finite(a, "eigendecompose");
  const Eigen::Index n = a.rows();
  Eigen::EigenSolver<RealMatrix> es(a);
  if (es.info() != Eigen::Success) throw Error("eigendecompose: eigensolver did not converge");
  const ComplexVector lam = es.eigenvalues();
  const double rho = lam.cwiseAbs().maxCoeff();
  require_schur(rho);
  const double anorm = spectral_norm(a);
  const ComplexMatrix ac = a.cast<Complex>();

  const auto clusters = cluster_eigenvalues(lam, 1e-7 * std::max(1.0, rho));
  ComplexMatrix basis(n, n);
  ComplexMatrix factor = ComplexMatrix::Zero(n, n);
  Eigen::Index col = 0;
  for (const auto& cl : clusters) {
    Complex center{0, 0};
    for (int i : cl) center += lam(i);
    center /= static_cast<double>(cl.size());
    const int mult = static_cast<int>(cl.size());
    if (mult == 1) {
      // the solver's back-substitution eigenvector; keeps structural zeros
      // (e.g. triangular input) exact, which an SVD null space would smear
      basis.col(col) = es.eigenvectors().col(cl[0]).normalized();
    } else {
      ComplexMatrix ns =
          null_space(ac - center * ComplexMatrix::Identity(n, n), rank_tol * std::max(1.0, anorm));
      if (ns.cols() < mult)
        throw DefectiveError("eigenvalue cluster near (" + std::to_string(center.real()) + ", " +
                             std::to_string(center.imag()) + "i) has deficient eigenspace (" +
                             std::to_string(ns.cols()) + " < " + std::to_string(mult) + ")");
      basis.middleCols(col, mult) = ns.rightCols(mult);
    }
    fix_phase(basis.middleCols(col, mult));
    for (int k = 0; k < mult; ++k) factor(col + k, col + k) = center;
    col += mult;
  }

  ModalForm f{ModalKind::NonDefective, std::move(basis), std::move(factor), rho, rho, 0.0};
  if (reconstruction_error(f, a) > 1e-8 * std::max(1.0, anorm))
    throw DefectiveError("diagonalization failed the reconstruction gate; matrix is numerically defective");
  return f;
}

ModalForm jordan_decompose(const RealMatrix& a, double eps, double rank_tol) {
  check_square_finite(a, "jordan_decompose");
  if (!(eps > 0.0)) throw std::invalid_argument("jordan_decompose: eps must be positive");
  const Eigen::Index n = a.rows();
  Eigen::EigenSolver<RealMatrix> es(a);
  if (es.info() != Eigen::Success) throw Error("jordan_decompose: eigensolver did not converge");
  const ComplexVector lam = es.eigenvalues();
  const double rho = lam.cwiseAbs().maxCoeff();
  require_schur(rho);
  const double anorm = spectral_norm(a);
  const ComplexMatrix ac = a.cast<Complex>();

  // A size-k Jordan block scatters its computed eigenvalues like eps^(1/k),
  // so a single clustering tolerance cannot serve all structures. Walk a
  // ladder from tight to loose and accept the first rung that reconstructs.
  const double base = std::max(1.0, rho);
  std::string last_reason = "no tolerance rung attempted";
  for (const double ct : {1e-7 * base, 1e-5 * base, 1e-4 * base, 1e-3 * base}) {
    try {
      const auto clusters = cluster_eigenvalues(lam, ct);
      std::vector<JordanChain> chains;
      for (const auto& cl : clusters) {
        Complex center{0, 0};
        for (int i : cl) center += lam(i);
        center /= static_cast<double>(cl.size());
        auto cc = build_chains(ac, center, static_cast<int>(cl.size()), rank_tol);
        for (auto& ch : cc) chains.push_back(std::move(ch));
      }

      ComplexMatrix basis(n, n);
      ComplexMatrix factor = ComplexMatrix::Zero(n, n);
      Eigen::Index col = 0;
      for (const auto& ch : chains) {
        const int len = static_cast<int>(ch.vecs.size());
        for (int j = 0; j < len; ++j) {
          basis.col(col + j) = ch.vecs[j];
          factor(col + j, col + j) = ch.lambda;
          if (j > 0) factor(col + j - 1, col + j) = 1.0;
        }
        col += len;
      }
      {
        ModalForm probe{ModalKind::Jordan, basis, factor, rho, 0.0, eps};
        if (reconstruction_error(probe, a) > 1e-8 * std::max(1.0, anorm))
          throw ChainFailureError("unscaled Jordan pair failed the reconstruction gate");
      }

      // per-chain eps-scaling: P_eps = [p0 | eps p1 | eps^2 p2 | ...]
      col = 0;
      for (const auto& ch : chains) {
        const int len = static_cast<int>(ch.vecs.size());
        double scale = 1.0;
        for (int j = 1; j < len; ++j) {
          scale *= eps;
          basis.col(col + j) *= scale;
          factor(col + j - 1, col + j) = eps;
        }
        col += len;
      }

      ModalForm f{ModalKind::Jordan, std::move(basis), std::move(factor), rho, 0.0, eps};
      f.factor_norm = spectral_norm(f.factor);
      return f;
    } catch (const ChainFailureError& e) {
      last_reason = e.what();
    }
  }
  throw ChainFailureError(std::string("jordan_decompose: chain construction broke down (") +
                          last_reason + ")");
}

}  // namespace dwell
