#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dwell/simulate.hpp"

namespace dwell {

struct AnalysisOptions {
  std::optional<double> epsilon;  // override for the Jordan route
  bool eps_search = false;
  double tol = 1e-9;  // cycle-ratio bisection tolerance
  NormKind norm = NormKind::Spectral;

  bool operator==(const AnalysisOptions&) const = default;
};

/// Parsed system description: named subsystem matrices, the admissible
/// transition digraph and analysis options.
struct SystemSpec {
  int dimension = 0;
  std::vector<std::string> names;
  std::vector<RealMatrix> matrices;
  std::string adjacency_kind;  // "full" | "ring" | "ring2" | "edges"
  Adjacency adjacency;
  AnalysisOptions options;

  int subsystem_count() const { return static_cast<int>(matrices.size()); }
};

bool operator==(const SystemSpec& a, const SystemSpec& b);

/// Parse the structured text format; errors carry line numbers.
SystemSpec parse_spec(const std::string& text);

/// Canonical rendering; parse_spec(render_spec(s)) == s for every valid spec.
std::string render_spec(const SystemSpec& spec);

/// FNV-1a over the canonical rendering.
std::uint64_t spec_hash(const SystemSpec& spec);

/// Built-in systems: "example1" (four conjugated subsystems; graph_kind
/// selects full/ring/ring2) and "example2" (a bimodal pair).
SystemSpec make_example(const std::string& name, const std::string& graph_kind = "full");

struct AnalyzeResult {
  std::uint64_t hash = 0;
  std::string decomposition;  // "nondefective" | "jordan"
  std::vector<double> rho;
  std::vector<double> factor_norms;  // per subsystem (jordan route only)
  std::vector<double> epsilons;      // per subsystem (jordan route only)
  double gamma = 1.0;
  SwitchingGraph graph;
  // label examples: "theorem1", "pnorm_bimodal.inf", "average_bimodal.spectral"
  std::vector<std::pair<std::string, DwellReport>> reports;
  std::optional<size_t> winner_min;
  std::optional<size_t> winner_avg;

  const DwellReport* find(const std::string& label) const;
};

/// Run every applicable method and pick the smallest admissible integer per
/// mode. Throws NotSchurStableError naming the offending subsystem.
AnalyzeResult analyze_system(const SystemSpec& spec, bool run_min = true, bool run_avg = true);

std::string render_report(const SystemSpec& spec, const AnalyzeResult& result);

struct SimulationRun {
  std::uint64_t hash = 0;
  int tau = 1;
  SignalMode mode = SignalMode::MinDwell;
  int n0 = 0;
  int trials = 0;
  long horizon = 0;
  std::uint64_t seed = 0;
  std::optional<Cycle> adversarial_cycle;  // exact-tau dwelling on this cycle
  DecayStats stats;
};

std::string render_simulation_report(const SystemSpec& spec, const SimulationRun& run);

/// Weighted edge dump for the `graph` command.
std::string render_graph_report(const SystemSpec& spec, const AnalyzeResult& result);

/// Extract the machine-parsable section (between flat-begin/flat-end) of any
/// rendered report.
std::map<std::string, std::string> parse_report_flat(const std::string& text);

}  // namespace dwell
