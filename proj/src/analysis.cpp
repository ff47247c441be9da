#include "dwell/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dwell {

namespace {

double max_rho(const std::vector<ModalForm>& forms) {
  double r = 0.0;
  for (const auto& f : forms) r = std::max(r, f.spectral_radius);
  return r;
}

double max_factor_norm(const std::vector<ModalForm>& forms) {
  double r = 0.0;
  for (const auto& f : forms) r = std::max(r, f.factor_norm);
  return r;
}

bool all_nondefective(const std::vector<ModalForm>& forms) {
  return std::all_of(forms.begin(), forms.end(),
                     [](const ModalForm& f) { return f.kind == ModalKind::NonDefective; });
}

std::vector<ModalForm> jordan_all(const std::vector<RealMatrix>& mats, double k_halvings,
                                  const std::optional<double>& fixed) {
  std::vector<ModalForm> forms;
  forms.reserve(mats.size());
  for (const auto& a : mats) {
    const double rho = spectral_radius(a);
    if (!(rho < 1.0)) throw NotSchurStableError("subsystem has spectral radius >= 1");
    const double eps = fixed ? *fixed : (1.0 - rho) * std::pow(0.5, k_halvings);
    forms.push_back(jordan_decompose(a, eps));
  }
  for (size_t i = 0; i < forms.size(); ++i)
    if (!(forms[i].factor_norm < 1.0))
      throw EpsilonSearchError("subsystem " + std::to_string(i + 1) + " has ||J_eps|| = " +
                               std::to_string(forms[i].factor_norm) + " >= 1 under eps = " +
                               std::to_string(forms[i].epsilon));
  return forms;
}

struct Bimodal {
  ModalForm f1, f2;
  ComplexMatrix s;       // V2^-1 V1
  double rho1, rho2;
  double gamma;
  double min_denom;      // -ln(rho1 rho2)
  double avg_denom;      // -2 ln(max(rho1, rho2))
};

Bimodal decompose_bimodal(const RealMatrix& a1, const RealMatrix& a2) {
  Bimodal b;
  b.f1 = eigendecompose(a1);
  b.f2 = eigendecompose(a2);
  if (b.f1.dim() != b.f2.dim())
    throw DimensionMismatchError("bimodal: subsystem dimensions differ");
  b.s = b.f2.basis.partialPivLu().solve(b.f1.basis);
  b.rho1 = b.f1.spectral_radius;
  b.rho2 = b.f2.spectral_radius;
  b.gamma = transient_gamma({b.f1, b.f2});
  b.min_denom = -std::log(std::max(b.rho1 * b.rho2, 1e-300));
  b.avg_denom = -2.0 * std::log(std::max(std::max(b.rho1, b.rho2), 1e-300));
  return b;
}

DwellReport bimodal_report(const Bimodal& b, DwellMode mode, DwellMethod method, double bound) {
  DwellReport r;
  r.mode = mode;
  r.method = method;
  r.bound_real = bound;
  r.tau_int = smallest_admissible_integer(bound);
  r.rho_max = std::max(b.rho1, b.rho2);
  r.gamma = b.gamma;
  return r;
}

}  // namespace

std::string method_name(DwellMethod m) {
  switch (m) {
    case DwellMethod::Theorem1: return "theorem1";
    case DwellMethod::Theorem2: return "theorem2";
    case DwellMethod::Theorem3: return "theorem3";
    case DwellMethod::Theorem3Defective: return "theorem3_defective";
    case DwellMethod::Corollary1: return "corollary1";
    case DwellMethod::Corollary2: return "corollary2";
    case DwellMethod::PnormBimodal: return "pnorm_bimodal";
    case DwellMethod::AverageBimodal: return "average_bimodal";
  }
  return "?";
}

std::string mode_name(DwellMode m) {
  return m == DwellMode::Minimum ? "minimum" : "average";
}

int smallest_admissible_integer(double bound_real) {
  const double f = std::floor(bound_real);
  const int tau = static_cast<int>(f) + 1;
  return std::max(1, tau);
}

DwellReport min_dwell_nondefective(const std::vector<ModalForm>& forms, const Adjacency& adj,
                                   double tol) {
  for (const auto& f : forms)
    if (f.kind != ModalKind::NonDefective)
      throw DefectiveError("min_dwell_nondefective: a Jordan-kind form was supplied");
  const SwitchingGraph g = build_graph(forms, adj);
  const auto cert = max_cycle_ratio(g, tol);

  DwellReport r;
  r.mode = DwellMode::Minimum;
  r.method = DwellMethod::Theorem1;
  r.bound_real = cert ? cert->value : 0.0;
  r.tau_int = smallest_admissible_integer(r.bound_real);
  if (cert) r.critical_cycle = cert->cycle;
  r.acyclic = !cert.has_value();
  r.rho_max = max_rho(forms);
  r.gamma = transient_gamma(forms);
  return r;
}

DwellReport min_dwell_defective(const std::vector<RealMatrix>& mats, const Adjacency& adj,
                                const EpsilonPolicy& policy, double tol) {
  std::vector<double> ks;
  if (policy.grid_search)
    for (int k = 1; k <= 10; ++k) ks.push_back(static_cast<double>(k));
  else
    ks.push_back(1.0);  // choose_epsilon: eps = (1 - rho)/2

  std::optional<DwellReport> best;
  std::string failure = "epsilon search produced no admissible decomposition";
  for (double k : ks) {
    std::vector<ModalForm> forms;
    try {
      forms = jordan_all(mats, k, policy.fixed);
    } catch (const EpsilonSearchError& e) {
      failure = e.what();
      continue;
    }
    const SwitchingGraph g = build_graph(forms, adj);
    const auto cert = max_cycle_ratio(g, tol);

    DwellReport r;
    r.mode = DwellMode::Minimum;
    r.method = DwellMethod::Theorem2;
    r.bound_real = cert ? cert->value : 0.0;
    r.tau_int = smallest_admissible_integer(r.bound_real);
    if (cert) r.critical_cycle = cert->cycle;
    r.acyclic = !cert.has_value();
    r.rho_max = max_rho(forms);
    r.j_max_norm = max_factor_norm(forms);
    r.gamma = transient_gamma(forms);
    if (!best || r.bound_real < best->bound_real) best = std::move(r);
  }
  if (!best) throw EpsilonSearchError(failure);
  return *best;
}

DwellReport avg_dwell(const std::vector<ModalForm>& forms, const Adjacency& adj) {
  const SwitchingGraph g = build_graph(forms, adj);
  const auto cert = max_cycle_mean(g);
  const bool nondef = all_nondefective(forms);
  const double r_loss = nondef ? max_rho(forms) : max_factor_norm(forms);

  DwellReport r;
  r.mode = DwellMode::Average;
  r.method = nondef ? DwellMethod::Theorem3 : DwellMethod::Theorem3Defective;
  const double mu = cert ? cert->value : 0.0;
  r.bound_real = r_loss > 0.0 ? mu / (-std::log(r_loss)) : 0.0;
  if (!cert) r.bound_real = 0.0;
  r.tau_int = smallest_admissible_integer(r.bound_real);
  if (cert) r.critical_cycle = cert->cycle;
  r.acyclic = !cert.has_value();
  r.rho_max = max_rho(forms);
  if (!nondef) r.j_max_norm = max_factor_norm(forms);
  r.gamma = transient_gamma(forms);
  return r;
}

DwellReport avg_dwell(const std::vector<RealMatrix>& mats, const Adjacency& adj,
                      const EpsilonPolicy& policy) {
  bool defective = false;
  std::vector<ModalForm> forms;
  forms.reserve(mats.size());
  for (const auto& a : mats) {
    try {
      forms.push_back(eigendecompose(a));
    } catch (const DefectiveError&) {
      defective = true;
      break;
    }
  }
  if (!defective) return avg_dwell(forms, adj);

  std::vector<double> ks;
  if (policy.grid_search)
    for (int k = 1; k <= 10; ++k) ks.push_back(static_cast<double>(k));
  else
    ks.push_back(1.0);
  std::optional<DwellReport> best;
  std::string failure = "epsilon search produced no admissible decomposition";
  for (double k : ks) {
    try {
      DwellReport r = avg_dwell(jordan_all(mats, k, policy.fixed), adj);
      if (!best || r.bound_real < best->bound_real) best = std::move(r);
    } catch (const EpsilonSearchError& e) {
      failure = e.what();
    }
  }
  if (!best) throw EpsilonSearchError(failure);
  return *best;
}

EquilibrationResult equilibrate_condition(const ComplexMatrix& s, int max_iters, double rel_tol) {
  if (s.rows() != s.cols() || s.size() == 0)
    throw DimensionMismatchError("equilibrate_condition: matrix must be square");
  const Eigen::Index n = s.rows();

  EquilibrationResult best;
  best.d_left = RealVector::Ones(n);
  best.d_right = RealVector::Ones(n);
  best.kappa_min = condition_number(s, NormKind::Spectral);  // throws SingularError

  ComplexMatrix m = s;
  RealVector dl = RealVector::Ones(n), dr = RealVector::Ones(n);
  double prev = best.kappa_min;
  for (int it = 0; it < max_iters; ++it) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c = m.col(j).norm();
      m.col(j) /= c;
      dr(j) /= c;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = m.row(i).norm();
      m.row(i) /= c;
      dl(i) /= c;
    }
    const double kappa = condition_number(m, NormKind::Spectral);
    if (kappa < best.kappa_min) {
      best.kappa_min = kappa;
      best.d_left = dl;
      best.d_right = dr;
    }
    if (std::abs(prev - kappa) <= rel_tol * prev) break;
    prev = kappa;
  }
  return best;
}

DwellReport bimodal_min_dwell_corollary1(const RealMatrix& a1, const RealMatrix& a2) {
  const Bimodal b = decompose_bimodal(a1, a2);
  const EquilibrationResult eq = equilibrate_condition(b.s);
  DwellReport r = bimodal_report(b, DwellMode::Minimum, DwellMethod::Corollary1,
                                 std::log(eq.kappa_min) / b.min_denom);
  r.scaling = DiagonalScaling{eq.d_left, eq.d_right};
  return r;
}

DwellReport bimodal_min_dwell_corollary2(const RealMatrix& a1, const RealMatrix& a2, NormKind p) {
  if (p == NormKind::Spectral)
    throw std::invalid_argument("corollary2: Bauer's formula applies to the 1- and inf-norms");
  const Bimodal b = decompose_bimodal(a1, a2);
  const ComplexMatrix sinv = b.s.partialPivLu().inverse();
  const double rho = spectral_radius(RealMatrix(abs_entrywise(b.s) * abs_entrywise(sinv)));
  return bimodal_report(b, DwellMode::Minimum, DwellMethod::Corollary2,
                        std::log(rho) / b.min_denom);
}

DwellReport bimodal_min_dwell_pnorm(const RealMatrix& a1, const RealMatrix& a2, NormKind p) {
  if (p == NormKind::Spectral)
    throw std::invalid_argument("pnorm_bimodal: use corollary1/theorem1 for the spectral norm");
  const Bimodal b = decompose_bimodal(a1, a2);
  const double kappa = condition_number(b.s, p);
  return bimodal_report(b, DwellMode::Minimum, DwellMethod::PnormBimodal,
                        std::log(kappa) / b.min_denom);
}

DwellReport bimodal_avg_dwell(const RealMatrix& a1, const RealMatrix& a2, NormKind p,
                              bool scaled) {
  const Bimodal b = decompose_bimodal(a1, a2);
  double k;
  if (!scaled) {
    k = condition_number(b.s, p);
  } else if (p == NormKind::Spectral) {
    k = equilibrate_condition(b.s).kappa_min;
  } else {
    const ComplexMatrix sinv = b.s.partialPivLu().inverse();
    k = spectral_radius(RealMatrix(abs_entrywise(b.s) * abs_entrywise(sinv)));
  }
  return bimodal_report(b, DwellMode::Average, DwellMethod::AverageBimodal,
                        std::log(k) / b.avg_denom);
}

}  // namespace dwell
