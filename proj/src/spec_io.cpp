#include "dwell/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace dwell {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string hex16(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw (line > 0 ? ParseError("line " + std::to_string(line) + ": " + msg) : ParseError(msg));
}

[[noreturn]] void invalid(int line, const std::string& msg) {
  throw (line > 0 ? ValidationError("line " + std::to_string(line) + ": " + msg)
                  : ValidationError(msg));
}

double parse_double(const std::string& tok, int line) {
  const char* s = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end != s + tok.size() || tok.empty()) fail(line, "bad number '" + tok + "'");
  if (!std::isfinite(v)) invalid(line, "non-finite entry '" + tok + "'");
  return v;
}

long parse_long(const std::string& tok, int line) {
  const char* s = tok.c_str();
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end != s + tok.size() || tok.empty()) fail(line, "bad integer '" + tok + "'");
  return v;
}

/// Comment-stripped, whitespace-split lines; the source line number is
/// stashed as the last token of each entry.
std::vector<std::vector<std::string>> tokenize(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::vector<std::vector<std::string>> lines;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;
    toks.push_back(std::to_string(lineno));
    lines.push_back(std::move(toks));
  }
  return lines;
}

}  // namespace

bool operator==(const SystemSpec& a, const SystemSpec& b) {
  if (a.dimension != b.dimension || a.names != b.names ||
      a.adjacency_kind != b.adjacency_kind || !(a.options == b.options))
    return false;
  if (a.matrices.size() != b.matrices.size()) return false;
  for (size_t i = 0; i < a.matrices.size(); ++i)
    if (a.matrices[i].rows() != b.matrices[i].rows() ||
        a.matrices[i].cols() != b.matrices[i].cols() || a.matrices[i] != b.matrices[i])
      return false;
  return a.adjacency.m == b.adjacency.m && a.adjacency.edges == b.adjacency.edges;
}

SystemSpec parse_spec(const std::string& text) {
  auto lines = tokenize(text);

  SystemSpec spec;
  bool have_dimension = false;
  bool have_adjacency = false;
  std::vector<std::pair<int, int>> explicit_edges;

  size_t li = 0;
  auto next_line = [&]() -> std::vector<std::string>* {
    return li < lines.size() ? &lines[li++] : nullptr;
  };

  while (auto* lp = next_line()) {
    auto& toks = *lp;
    const int ln = static_cast<int>(parse_long(toks.back(), 0));
    toks.pop_back();
    const std::string& kw = toks[0];

    if (kw == "dimension") {
      if (have_dimension) fail(ln, "duplicate dimension");
      if (toks.size() != 2) fail(ln, "expected: dimension <n>");
      const long n = parse_long(toks[1], ln);
      if (n < 1 || n > 64) invalid(ln, "dimension out of range 1..64");
      spec.dimension = static_cast<int>(n);
      have_dimension = true;
    } else if (kw == "subsystem") {
      if (!have_dimension) fail(ln, "dimension must precede subsystems");
      if (toks.size() != 2) fail(ln, "expected: subsystem <name>");
      const std::string name = toks[1];
      if (std::find(spec.names.begin(), spec.names.end(), name) != spec.names.end())
        invalid(ln, "duplicate subsystem name '" + name + "'");
      RealMatrix m(spec.dimension, spec.dimension);
      for (int r = 0; r < spec.dimension; ++r) {
        auto* rl = next_line();
        if (!rl) fail(ln, "unexpected end of input inside subsystem '" + name + "'");
        const int rln = static_cast<int>(parse_long(rl->back(), 0));
        rl->pop_back();
        if ((*rl)[0] != "row") fail(rln, "expected a 'row' line inside subsystem '" + name + "'");
        if (static_cast<int>(rl->size()) != spec.dimension + 1)
          invalid(rln, "row has " + std::to_string(rl->size() - 1) + " entries, expected " +
                           std::to_string(spec.dimension));
        for (int c = 0; c < spec.dimension; ++c) m(r, c) = parse_double((*rl)[c + 1], rln);
      }
      auto* el = next_line();
      if (!el) fail(ln, "missing 'end' after subsystem '" + name + "'");
      const int eln = static_cast<int>(parse_long(el->back(), 0));
      el->pop_back();
      if (el->size() != 1 || (*el)[0] != "end")
        fail(eln, "expected 'end' closing subsystem '" + name + "' (matrix must be " +
                      std::to_string(spec.dimension) + "x" + std::to_string(spec.dimension) + ")");
      spec.names.push_back(name);
      spec.matrices.push_back(std::move(m));
    } else if (kw == "adjacency") {
      if (have_adjacency) fail(ln, "duplicate adjacency");
      if (toks.size() != 2) fail(ln, "expected: adjacency full|ring|ring2|edges");
      spec.adjacency_kind = toks[1];
      if (spec.adjacency_kind == "edges") {
        while (true) {
          auto* el = next_line();
          if (!el) fail(ln, "missing 'end' after adjacency edges");
          const int eln = static_cast<int>(parse_long(el->back(), 0));
          el->pop_back();
          if (el->size() == 1 && (*el)[0] == "end") break;
          if ((*el)[0] != "edge" || el->size() != 3)
            fail(eln, "expected: edge <from> <to>");
          const long i = parse_long((*el)[1], eln), j = parse_long((*el)[2], eln);
          explicit_edges.emplace_back(static_cast<int>(i) - 1, static_cast<int>(j) - 1);
        }
      } else if (spec.adjacency_kind != "full" && spec.adjacency_kind != "ring" &&
                 spec.adjacency_kind != "ring2") {
        fail(ln, "unknown adjacency kind '" + spec.adjacency_kind + "'");
      }
      have_adjacency = true;
    } else if (kw == "option") {
      if (toks.size() != 3) fail(ln, "expected: option <key> <value>");
      const std::string& key = toks[1];
      const std::string& val = toks[2];
      if (key == "epsilon") {
        const double e = parse_double(val, ln);
        if (!(e > 0.0)) invalid(ln, "epsilon must be positive");
        spec.options.epsilon = e;
      } else if (key == "eps-search") {
        if (val != "on" && val != "off") fail(ln, "eps-search must be on|off");
        spec.options.eps_search = (val == "on");
      } else if (key == "tol") {
        const double t = parse_double(val, ln);
        if (!(t > 0.0)) invalid(ln, "tol must be positive");
        spec.options.tol = t;
      } else if (key == "norm") {
        if (val == "spectral")
          spec.options.norm = NormKind::Spectral;
        else if (val == "1")
          spec.options.norm = NormKind::One;
        else if (val == "inf")
          spec.options.norm = NormKind::Inf;
        else
          fail(ln, "norm must be spectral|1|inf");
      } else {
        fail(ln, "unknown option '" + key + "'");
      }
    } else {
      fail(ln, "unknown keyword '" + kw + "'");
    }
  }

  if (!have_dimension) invalid(0, "missing dimension");
  if (spec.matrices.empty()) invalid(0, "no subsystems");
  if (!have_adjacency) invalid(0, "missing adjacency");
  const int m = spec.subsystem_count();
  try {
    if (spec.adjacency_kind == "full")
      spec.adjacency = fully_connected(m);
    else if (spec.adjacency_kind == "ring")
      spec.adjacency = ring(m, false);
    else if (spec.adjacency_kind == "ring2")
      spec.adjacency = ring(m, true);
    else
      spec.adjacency = make_adjacency(m, std::move(explicit_edges));
  } catch (const ValidationError& e) {
    invalid(0, e.what());
  }
  return spec;
}

std::string render_spec(const SystemSpec& spec) {
  std::ostringstream out;
  out << "dimension " << spec.dimension << "\n";
  for (size_t k = 0; k < spec.matrices.size(); ++k) {
    out << "subsystem " << spec.names[k] << "\n";
    for (int r = 0; r < spec.dimension; ++r) {
      out << "row";
      for (int c = 0; c < spec.dimension; ++c) out << " " << g17(spec.matrices[k](r, c));
      out << "\n";
    }
    out << "end\n";
  }
  out << "adjacency " << spec.adjacency_kind << "\n";
  if (spec.adjacency_kind == "edges") {
    for (const auto& [i, j] : spec.adjacency.edges)
      out << "edge " << (i + 1) << " " << (j + 1) << "\n";
    out << "end\n";
  }
  if (spec.options.epsilon) out << "option epsilon " << g17(*spec.options.epsilon) << "\n";
  if (spec.options.eps_search) out << "option eps-search on\n";
  out << "option tol " << g17(spec.options.tol) << "\n";
  out << "option norm " << norm_name(spec.options.norm) << "\n";
  return out.str();
}

std::uint64_t spec_hash(const SystemSpec& spec) {
  const std::string body = render_spec(spec);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : body) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SystemSpec make_example(const std::string& name, const std::string& graph_kind) {
  SystemSpec spec;
  if (name == "example1") {
    RealMatrix a(3, 3);
    a << -0.2, 1.0, 0.0, -1.0, 1.4, 0.0, 0.0, 0.0, -0.4;
    const double c = std::cos(M_PI / 3.0), s = std::sin(M_PI / 3.0);
    RealMatrix u(3, 3);
    u << 1.2, 0.0, 0.0, 0.0, c, s, 0.0, -s, c;
    const RealMatrix uinv = u.inverse();
    spec.dimension = 3;
    RealMatrix left = RealMatrix::Identity(3, 3), right = RealMatrix::Identity(3, 3);
    for (int k = 0; k < 4; ++k) {
      spec.names.push_back("A" + std::to_string(k + 1));
      spec.matrices.push_back(left * a * right);
      left = left * uinv;
      right = right * u;
    }
    if (graph_kind != "full" && graph_kind != "ring" && graph_kind != "ring2")
      throw ValidationError("example1: graph kind must be full|ring|ring2");
    spec.adjacency_kind = graph_kind;
    spec.adjacency = graph_kind == "full" ? fully_connected(4) : ring(4, graph_kind == "ring2");
  } else if (name == "example2") {
    RealMatrix a1(3, 3), a2(3, 3);
    a1 << -0.38, 0.2, 0.1, -0.16, 0.72, 0.16, -0.24, 0.24, 0.8;
    a2 << -0.8, -0.07, 0.04, 0.1, -1.0, 0.05, -0.1, -0.06, -0.34;
    spec.dimension = 3;
    spec.names = {"A1", "A2"};
    spec.matrices = {a1, a2};
    spec.adjacency_kind = "full";
    spec.adjacency = fully_connected(2);
  } else {
    throw ValidationError("unknown example '" + name + "' (use example1 or example2)");
  }
  return spec;
}

const DwellReport* AnalyzeResult::find(const std::string& label) const {
  for (const auto& [l, r] : reports)
    if (l == label) return &r;
  return nullptr;
}

AnalyzeResult analyze_system(const SystemSpec& spec, bool run_min, bool run_avg) {
  AnalyzeResult res;
  res.hash = spec_hash(spec);
  const auto& mats = spec.matrices;
  const int m = spec.subsystem_count();

  for (int i = 0; i < m; ++i) {
    const double rho = spectral_radius(mats[i]);
    res.rho.push_back(rho);
    if (!(rho < 1.0))
      throw NotSchurStableError("subsystem " + spec.names[i] +
                                " is not Schur stable (spectral radius " + g12(rho) + ")");
  }

  const EpsilonPolicy policy{spec.options.epsilon, spec.options.eps_search};
  std::vector<ModalForm> forms;
  bool defective = false;
  for (const auto& a : mats) {
    try {
      forms.push_back(eigendecompose(a));
    } catch (const DefectiveError&) {
      defective = true;
      break;
    }
  }
  if (defective) {
    forms.clear();
    for (const auto& a : mats) {
      const double eps = policy.fixed ? *policy.fixed : choose_epsilon(a);
      forms.push_back(jordan_decompose(a, eps));
    }
    for (int i = 0; i < m; ++i) {
      if (!(forms[i].factor_norm < 1.0))
        throw EpsilonSearchError("subsystem " + spec.names[i] + " has ||J_eps|| = " +
                                 g12(forms[i].factor_norm) + " >= 1 under eps = " +
                                 g12(forms[i].epsilon));
      res.factor_norms.push_back(forms[i].factor_norm);
      res.epsilons.push_back(forms[i].epsilon);
    }
    res.decomposition = "jordan";
  } else {
    res.decomposition = "nondefective";
  }
  res.gamma = transient_gamma(forms);
  res.graph = build_graph(forms, spec.adjacency);

  const double tol = spec.options.tol;
  bool both_edges = false;
  if (m == 2) {
    bool e01 = false, e10 = false;
    for (const auto& [i, j] : spec.adjacency.edges) {
      e01 = e01 || (i == 0 && j == 1);
      e10 = e10 || (i == 1 && j == 0);
    }
    both_edges = e01 && e10;
  }
  const bool bimodal = !defective && both_edges;

  if (run_min) {
    if (defective)
      res.reports.emplace_back("theorem2", min_dwell_defective(mats, spec.adjacency, policy, tol));
    else
      res.reports.emplace_back("theorem1", min_dwell_nondefective(forms, spec.adjacency, tol));
    if (bimodal) {
      res.reports.emplace_back("corollary1", bimodal_min_dwell_corollary1(mats[0], mats[1]));
      if (spec.options.norm != NormKind::Inf)
        res.reports.emplace_back("pnorm_bimodal.1",
                                 bimodal_min_dwell_pnorm(mats[0], mats[1], NormKind::One));
      if (spec.options.norm != NormKind::One)
        res.reports.emplace_back("pnorm_bimodal.inf",
                                 bimodal_min_dwell_pnorm(mats[0], mats[1], NormKind::Inf));
      res.reports.emplace_back("corollary2",
                               bimodal_min_dwell_corollary2(mats[0], mats[1], NormKind::One));
    }
  }
  if (run_avg) {
    if (defective)
      res.reports.emplace_back("theorem3_defective", avg_dwell(mats, spec.adjacency, policy));
    else
      res.reports.emplace_back("theorem3", avg_dwell(forms, spec.adjacency));
    if (bimodal) {
      res.reports.emplace_back("average_bimodal.spectral",
                               bimodal_avg_dwell(mats[0], mats[1], NormKind::Spectral, true));
      res.reports.emplace_back("average_bimodal.1",
                               bimodal_avg_dwell(mats[0], mats[1], NormKind::One, true));
    }
  }

  auto pick = [&](DwellMode mode) -> std::optional<size_t> {
    std::optional<size_t> best;
    for (size_t i = 0; i < res.reports.size(); ++i) {
      const auto& r = res.reports[i].second;
      if (r.mode != mode) continue;
      if (!best) {
        best = i;
        continue;
      }
      const auto& b = res.reports[*best].second;
      if (r.tau_int < b.tau_int || (r.tau_int == b.tau_int && r.bound_real < b.bound_real))
        best = i;
    }
    return best;
  };
  res.winner_min = pick(DwellMode::Minimum);
  res.winner_avg = pick(DwellMode::Average);
  return res;
}

namespace {

void render_common_header(std::ostringstream& out, const char* kind, const SystemSpec& spec,
                          std::uint64_t hash) {
  out << "dwellcert-report " << kind << "\n";
  out << "input-hash " << hex16(hash) << "\n";
  out << "subsystems " << spec.subsystem_count() << "\n";
  out << "dimension " << spec.dimension << "\n";
}

void render_cycle(std::ostringstream& out, const std::optional<Cycle>& c) {
  if (!c) {
    out << "none";
    return;
  }
  for (size_t i = 0; i < c->nodes.size(); ++i) out << (i ? " " : "") << (c->nodes[i] + 1);
}

void render_graph_edges(std::ostringstream& out, const SwitchingGraph& g) {
  out << "graph-edges " << g.edges.size() << "\n";
  for (const auto& e : g.edges)
    out << "edge " << (e.from + 1) << " " << (e.to + 1) << " w+ " << g12(e.w_plus) << " w- "
        << g12(e.w_minus) << "\n";
}

}  // namespace

std::string render_report(const SystemSpec& spec, const AnalyzeResult& result) {
  std::ostringstream out;
  render_common_header(out, "analyze", spec, result.hash);
  out << "decomposition " << result.decomposition << "\n";
  for (int i = 0; i < spec.subsystem_count(); ++i) {
    out << "rho " << spec.names[i] << " " << g12(result.rho[i]);
    if (!result.factor_norms.empty())
      out << " jnorm " << g12(result.factor_norms[i]) << " epsilon " << g12(result.epsilons[i]);
    out << "\n";
  }
  out << "gamma " << g12(result.gamma) << "\n";
  out << "tolerance " << g12(spec.options.tol) << "\n";
  render_graph_edges(out, result.graph);
  for (const auto& [label, r] : result.reports) {
    out << "method " << label << " mode " << mode_name(r.mode) << " bound " << g12(r.bound_real)
        << " tau " << r.tau_int << " cycle ";
    render_cycle(out, r.critical_cycle);
    if (r.acyclic) out << " acyclic: finitely many switchings along any walk";
    out << "\n";
    if (r.scaling) {
      out << "scaling " << label << " left";
      for (Eigen::Index i = 0; i < r.scaling->left.size(); ++i)
        out << " " << g12(r.scaling->left(i));
      out << " right";
      for (Eigen::Index i = 0; i < r.scaling->right.size(); ++i)
        out << " " << g12(r.scaling->right(i));
      out << "\n";
    }
  }
  for (auto [mode, widx] : {std::pair{DwellMode::Minimum, result.winner_min},
                            std::pair{DwellMode::Average, result.winner_avg}}) {
    if (!widx) continue;
    const auto& [label, r] = result.reports[*widx];
    out << "winner " << mode_name(mode) << " " << label << " tau " << r.tau_int << "\n";
  }
  out << "flat-begin\n";
  for (auto [mode, widx] : {std::pair{DwellMode::Minimum, result.winner_min},
                            std::pair{DwellMode::Average, result.winner_avg}}) {
    if (!widx) continue;
    const auto& [label, r] = result.reports[*widx];
    const std::string prefix = std::string("result.") + mode_name(mode);
    out << prefix << ".method " << label << "\n";
    out << prefix << ".tau " << r.tau_int << "\n";
    out << prefix << ".bound " << g12(r.bound_real) << "\n";
  }
  for (const auto& [label, r] : result.reports) {
    out << "method." << label << ".bound " << g12(r.bound_real) << "\n";
    out << "method." << label << ".tau " << r.tau_int << "\n";
  }
  out << "flat-end\n";
  return out.str();
}

std::string render_simulation_report(const SystemSpec& spec, const SimulationRun& run) {
  std::ostringstream out;
  render_common_header(out, "simulate", spec, run.hash);
  out << "tau " << run.tau << "\n";
  out << "mode " << (run.mode == SignalMode::MinDwell ? "min" : "avg") << "\n";
  if (run.mode == SignalMode::AvgDwell) out << "n0 " << run.n0 << "\n";
  if (run.adversarial_cycle) {
    out << "adversarial-cycle ";
    render_cycle(out, run.adversarial_cycle);
    out << "\n";
  }
  out << "trials " << run.trials << "\n";
  out << "horizon " << run.horizon << "\n";
  out << "seed " << run.seed << "\n";
  out << "max-final-ratio " << g12(run.stats.max_final_ratio) << "\n";
  out << "max-peak-ratio " << g12(run.stats.max_peak_ratio) << "\n";
  out << "all-decayed " << (run.stats.max_final_ratio < 1.0 ? "yes" : "no") << "\n";
  out << "flat-begin\n";
  out << "result.simulate.max_final_ratio " << g12(run.stats.max_final_ratio) << "\n";
  out << "result.simulate.max_peak_ratio " << g12(run.stats.max_peak_ratio) << "\n";
  out << "result.simulate.trials " << run.trials << "\n";
  out << "result.simulate.horizon " << run.horizon << "\n";
  out << "result.simulate.seed " << run.seed << "\n";
  out << "flat-end\n";
  return out.str();
}

std::string render_graph_report(const SystemSpec& spec, const AnalyzeResult& result) {
  std::ostringstream out;
  render_common_header(out, "graph", spec, result.hash);
  out << "decomposition " << result.decomposition << "\n";
  render_graph_edges(out, result.graph);
  int negative_gains = 0;
  for (const auto& e : result.graph.edges)
    if (e.w_plus < 0.0) ++negative_gains;
  if (negative_gains > 0) out << "note " << negative_gains << " edge(s) with negative gain\n";
  return out.str();
}

std::map<std::string, std::string> parse_report_flat(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::string> flat;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line == "flat-begin") {
      inside = true;
      continue;
    }
    if (line == "flat-end") break;
    if (!inside) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) continue;
    flat[line.substr(0, sp)] = line.substr(sp + 1);
  }
  return flat;
}

}  // namespace dwell
