#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "dwell/spec_io.hpp"

namespace {

// exit codes: 0 certificate produced, 2 input invalid, 3 not Schur stable,
// 4 internal numerical breakdown
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNotSchur = 3;
constexpr int kExitNumeric = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dwell::ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw dwell::ValidationError("cannot write '" + out_path + "'");
  out << text;
}

double parse_flag_value(const std::string& text, const char* flag) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v) || !(v > 0.0))
      throw dwell::ValidationError(std::string(flag) + " must be a positive number");
    return v;
  } catch (const std::logic_error&) {
    throw dwell::ValidationError(std::string(flag) + " must be a positive number");
  }
}

dwell::SystemSpec load_spec(const std::string& path, const std::string& eps,
                            bool eps_search, const std::string& norm, const std::string& tol) {
  dwell::SystemSpec spec = dwell::parse_spec(slurp(path));
  // flags override the options embedded in the file
  if (!eps.empty()) spec.options.epsilon = parse_flag_value(eps, "--eps");
  if (eps_search) spec.options.eps_search = true;
  if (!norm.empty()) {
    if (norm == "spectral")
      spec.options.norm = dwell::NormKind::Spectral;
    else if (norm == "1")
      spec.options.norm = dwell::NormKind::One;
    else if (norm == "inf")
      spec.options.norm = dwell::NormKind::Inf;
    else
      throw dwell::ValidationError("--norm must be spectral|1|inf");
  }
  if (!tol.empty()) spec.options.tol = parse_flag_value(tol, "--tol");
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dwellcert: dwell-time stability certificates for constrained switched linear systems"};
  app.require_subcommand(1);

  std::string spec_path, out_path, eps, norm, tol;
  bool eps_search = false;

  auto* analyze = app.add_subcommand("analyze", "compute dwell-time certificates");
  analyze->add_option("spec", spec_path, "system spec file")->required();
  bool only_min = false, only_avg = false, run_all = false;
  analyze->add_flag("--min", only_min, "minimum dwell time only");
  analyze->add_flag("--avg", only_avg, "average dwell time only");
  analyze->add_flag("--all", run_all, "both modes (default)");
  analyze->add_option("--eps", eps, "fixed epsilon for the Jordan route");
  analyze->add_flag("--eps-search", eps_search, "grid-search epsilon over (1-rho) 2^-k, k=1..10");
  analyze->add_option("--norm", norm, "p-norm for bimodal refinements: spectral|1|inf");
  analyze->add_option("--tol", tol, "cycle-ratio bisection tolerance");
  analyze->add_option("-o,--output", out_path, "write the report to a file");

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo trajectory decay check");
  simulate->add_option("spec", spec_path, "system spec file")->required();
  int tau = 0, n0 = 0, trials = 100;
  long horizon = -1;
  std::uint64_t seed = 0;
  std::string sim_mode = "min";
  bool adversarial = false;
  simulate->add_option("--tau", tau, "dwell time of the admissible signal set")->required();
  simulate->add_option("--mode", sim_mode, "min|avg");
  simulate->add_option("--n0", n0, "chatter bound N0 for avg mode");
  simulate->add_option("--trials", trials, "number of Monte-Carlo trials");
  simulate->add_option("--horizon", horizon, "simulation horizon (default 100*tau)");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_flag("--adversarial", adversarial,
                     "dwell exactly tau around the critical cycle instead of random signals");
  simulate->add_option("-o,--output", out_path, "write the report to a file");

  auto* gen = app.add_subcommand("generate-example", "emit a built-in example system spec");
  std::string example_name, graph_kind = "full";
  gen->add_option("name", example_name, "example1|example2")->required();
  gen->add_option("--graph", graph_kind, "adjacency preset for example1: full|ring|ring2");
  gen->add_option("-o,--output", out_path, "write the spec to a file");

  auto* graph = app.add_subcommand("graph", "dump the weighted switching graph");
  graph->add_option("spec", spec_path, "system spec file")->required();
  graph->add_option("-o,--output", out_path, "write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (analyze->parsed()) {
      if (only_min && only_avg) throw dwell::ValidationError("--min and --avg are exclusive");
      const bool run_min = only_min || !only_avg;
      const bool run_avg = only_avg || !only_min;
      dwell::SystemSpec spec = load_spec(spec_path, eps, eps_search, norm, tol);
      const auto result = dwell::analyze_system(spec, run_min, run_avg);
      emit(dwell::render_report(spec, result), out_path);
    } else if (simulate->parsed()) {
      if (trials < 1) throw dwell::ValidationError("--trials must be >= 1");
      if (tau < 1) throw dwell::ValidationError("--tau must be >= 1");
      dwell::SystemSpec spec = load_spec(spec_path, "", false, "", "");
      dwell::SimulationRun run;
      run.hash = dwell::spec_hash(spec);
      run.tau = tau;
      if (sim_mode == "min")
        run.mode = dwell::SignalMode::MinDwell;
      else if (sim_mode == "avg")
        run.mode = dwell::SignalMode::AvgDwell;
      else
        throw dwell::ValidationError("--mode must be min|avg");
      run.n0 = n0;
      run.trials = trials;
      run.horizon = horizon >= 0 ? horizon : 100L * tau;
      run.seed = seed;
      if (adversarial) {
        if (run.mode != dwell::SignalMode::MinDwell)
          throw dwell::ValidationError("--adversarial applies to the min-dwell signal set");
        const auto analysis = dwell::analyze_system(spec, true, false);
        const auto& winner = analysis.reports[*analysis.winner_min].second;
        const auto* themed = analysis.find("theorem1");
        if (!themed) themed = analysis.find("theorem2");
        const auto& cycle_owner = (themed && themed->critical_cycle) ? *themed : winner;
        if (!cycle_owner.critical_cycle)
          throw dwell::ValidationError("--adversarial: the switching graph has no cycle");
        run.adversarial_cycle = cycle_owner.critical_cycle;
        run.stats = dwell::adversarial_decay(spec.matrices, *run.adversarial_cycle, tau, trials,
                                             run.horizon, seed);
      } else {
        run.stats = dwell::empirical_decay(spec.matrices, spec.adjacency, tau, trials, run.horizon,
                                           seed, run.mode, n0);
      }
      emit(dwell::render_simulation_report(spec, run), out_path);
    } else if (gen->parsed()) {
      const auto spec = dwell::make_example(example_name, graph_kind);
      emit(dwell::render_spec(spec), out_path);
    } else if (graph->parsed()) {
      dwell::SystemSpec spec = load_spec(spec_path, "", false, "", "");
      const auto result = dwell::analyze_system(spec, false, false);
      emit(dwell::render_graph_report(spec, result), out_path);
    }
  } catch (const dwell::NotSchurStableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotSchur;
  } catch (const dwell::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const dwell::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
