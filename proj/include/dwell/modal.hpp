#pragma once

#include <vector>

#include "dwell/matrix.hpp"

namespace dwell {

enum class ModalKind { NonDefective, Jordan };

/// Per-subsystem decomposition data. NonDefective holds A = V D V^-1 with
/// unit-norm eigenvector columns; Jordan holds A = P_eps J_eps P_eps^-1 with
/// generalized-eigenvector chains scaled so the superdiagonal entries equal
/// epsilon.
struct ModalForm {
  ModalKind kind = ModalKind::NonDefective;
  ComplexMatrix basis;   // V, or P_eps
  ComplexMatrix factor;  // diagonal D, or J_eps
  double spectral_radius = 0.0;
  double factor_norm = 0.0;  // ||D|| = rho, or ||J_eps||
  double epsilon = 0.0;      // 0 for NonDefective

  Eigen::Index dim() const { return basis.rows(); }
};

/// Eigendecompose a Schur-stable, non-defective matrix. Columns have unit
/// Euclidean norm; eigenvectors of an eigenvalue repeated to tolerance are
/// mutually orthogonal. Throws DefectiveError when the eigenspace of some
/// eigenvalue cluster is too small (fall back to jordan_decompose), or when
/// the diagonalization fails the reconstruction gate.
///
/// `rank_tol` is the relative singular-value threshold used for eigenspace
/// rank decisions (default 1e-9, scaled by ||A||).
ModalForm eigendecompose(const RealMatrix& a, double rank_tol = 1e-9);

/// Jordan decomposition with the unit superdiagonal replaced by eps via
/// per-chain rescaling of the generalized eigenvectors,
/// P_eps = [p0 | eps p1 | eps^2 p2 | ...]. Diagonalizable input yields a
/// diagonal factor (no superdiagonal, eps unused).
ModalForm jordan_decompose(const RealMatrix& a, double eps, double rank_tol = 1e-9);

/// eps = (1 - rho(A))/2, which keeps ||J_eps|| <= rho + eps < 1.
double choose_epsilon(const RealMatrix& a);

/// max ||basis_i|| * ||basis_j^-1|| over all ordered pairs; the transient
/// constant in the trajectory bound.
double transient_gamma(const std::vector<ModalForm>& forms);

/// ||basis * factor * basis^-1 - A|| (spectral norm), the reconstruction
/// residual of a modal form.
double reconstruction_error(const ModalForm& f, const RealMatrix& a);

}  // namespace dwell
