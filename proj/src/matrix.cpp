#include "dwell/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dwell {

double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<RealMatrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_radius(const RealMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatchError("spectral_radius: matrix must be square");
  Eigen::EigenSolver<RealMatrix> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatchError("spectral_radius: matrix must be square");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double p_norm(const ComplexMatrix& m, NormKind p) {
  switch (p) {
    case NormKind::One:
      return m.cwiseAbs().colwise().sum().maxCoeff();
    case NormKind::Inf:
      return m.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::Spectral:
      return spectral_norm(m);
  }
  throw std::invalid_argument("p_norm: bad norm kind");
}

double condition_number(const ComplexMatrix& m, NormKind norm) {
  if (m.rows() != m.cols()) throw DimensionMismatchError("condition_number: matrix must be square");
  const auto n = m.rows();
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(n - 1);
  if (smin <= smax * static_cast<double>(n) * 1e-14)
    throw SingularError("condition_number: matrix singular to working precision");
  if (norm == NormKind::Spectral) return smax / smin;
  ComplexMatrix inv = svd.solve(ComplexMatrix::Identity(n, n));
  return p_norm(m, norm) * p_norm(inv, norm);
}

RealMatrix abs_entrywise(const ComplexMatrix& m) { return m.cwiseAbs(); }

std::string norm_name(NormKind k) {
  switch (k) {
    case NormKind::Spectral: return "spectral";
    case NormKind::One: return "1";
    case NormKind::Inf: return "inf";
  }
  return "?";
}

}  // namespace dwell
