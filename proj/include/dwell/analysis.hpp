#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dwell/cycles.hpp"

namespace dwell {

enum class DwellMode { Minimum, Average };

enum class DwellMethod {
  Theorem1,
  Theorem2,
  Theorem3,
  Theorem3Defective,
  Corollary1,
  Corollary2,
  PnormBimodal,
  AverageBimodal,
};

std::string method_name(DwellMethod m);
std::string mode_name(DwellMode m);

struct DiagonalScaling {
  RealVector left;   // positive diagonal of D_L
  RealVector right;  // positive diagonal of D_R
};

/// A dwell-time certificate: the system is asymptotically stable for every
/// admissible signal with dwell (or average dwell) strictly above bound_real;
/// tau_int is the smallest admissible integer.
struct DwellReport {
  DwellMode mode = DwellMode::Minimum;
  DwellMethod method = DwellMethod::Theorem1;
  double bound_real = 0.0;
  int tau_int = 1;
  std::optional<Cycle> critical_cycle;
  std::optional<double> rho_max;
  std::optional<double> j_max_norm;
  double gamma = 1.0;
  std::optional<DiagonalScaling> scaling;
  bool acyclic = false;  // no cycle in the switching graph: any dwell works
};

/// Smallest integer strictly greater than the real bound, clamped to >= 1.
int smallest_admissible_integer(double bound_real);

struct EpsilonPolicy {
  std::optional<double> fixed;  // same eps for every subsystem
  bool grid_search = false;     // eps_i = (1 - rho_i) 2^-k, shared k = 1..10
};

/// Theorem-1 certificate: bound = max cycle ratio of the eigenvector-weighted
/// switching graph. All forms must be NonDefective.
DwellReport min_dwell_nondefective(const std::vector<ModalForm>& forms, const Adjacency& adj,
                                   double tol = 1e-12);

/// Theorem-2 certificate: Jordan-decomposes every subsystem under the epsilon
/// policy (default: choose_epsilon per subsystem) and bounds via the P/J
/// weighted graph. Requires ||J_eps|| < 1 for every subsystem.
DwellReport min_dwell_defective(const std::vector<RealMatrix>& mats, const Adjacency& adj,
                                const EpsilonPolicy& policy = {}, double tol = 1e-12);

/// Theorem-3 certificate: bound = max cycle mean over gain weights divided by
/// -ln r, with r = rho_max (all NonDefective) or max ||J_i|| (defective
/// route).
DwellReport avg_dwell(const std::vector<ModalForm>& forms, const Adjacency& adj);
DwellReport avg_dwell(const std::vector<RealMatrix>& mats, const Adjacency& adj,
                      const EpsilonPolicy& policy = {});

/// Alternating two-sided diagonal equilibration of S: scales columns, then
/// rows, to unit Euclidean norm, tracking the best condition number seen
/// (never worse than kappa(S)). Throws SingularError.
struct EquilibrationResult {
  RealVector d_left;
  RealVector d_right;
  double kappa_min = 1.0;
};
EquilibrationResult equilibrate_condition(const ComplexMatrix& s, int max_iters = 1000,
                                          double rel_tol = 1e-10);

/// Bimodal refinements; both subsystems must be Schur stable and
/// non-defective.
DwellReport bimodal_min_dwell_corollary1(const RealMatrix& a1, const RealMatrix& a2);
DwellReport bimodal_min_dwell_corollary2(const RealMatrix& a1, const RealMatrix& a2,
                                         NormKind p = NormKind::One);
DwellReport bimodal_min_dwell_pnorm(const RealMatrix& a1, const RealMatrix& a2, NormKind p);
DwellReport bimodal_avg_dwell(const RealMatrix& a1, const RealMatrix& a2,
                              NormKind p = NormKind::Spectral, bool scaled = false);

}  // namespace dwell
