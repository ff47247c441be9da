#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace dwell {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Induced matrix norms supported by condition-number computations.
enum class NormKind { Spectral, One, Inf };

/// Base class for all numeric / domain errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

class NotSchurStableError : public Error {
 public:
  using Error::Error;
};

class DefectiveError : public Error {
 public:
  using Error::Error;
};

class ChainFailureError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class EpsilonSearchError : public Error {
 public:
  using Error::Error;
};

class NonPositiveLossError : public Error {
 public:
  using Error::Error;
};

class TooLargeError : public Error {
 public:
  using Error::Error;
};

class SignalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Largest singular value.
double spectral_norm(const ComplexMatrix& m);
double spectral_norm(const RealMatrix& m);

/// Largest eigenvalue modulus.
double spectral_radius(const RealMatrix& m);
double spectral_radius(const ComplexMatrix& m);

/// Induced 1-norm (max column abs-sum) or inf-norm (max row abs-sum).
double p_norm(const ComplexMatrix& m, NormKind p);

/// ||M|| * ||M^-1|| in the chosen norm. Throws SingularError when M is not
/// invertible to working precision.
double condition_number(const ComplexMatrix& m, NormKind norm = NormKind::Spectral);

/// Entrywise modulus.
RealMatrix abs_entrywise(const ComplexMatrix& m);

std::string norm_name(NormKind k);

}  // namespace dwell
