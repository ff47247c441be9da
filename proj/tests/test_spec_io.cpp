#include <doctest.h>

#include "dwell/spec_io.hpp"
#include "oracles.hpp"

using namespace dwell;

TEST_CASE("parse_spec: round trip") {
  const SystemSpec ex1 = make_example("example1", "ring2");
  const SystemSpec back = parse_spec(render_spec(ex1));
  CHECK(back == ex1);
  CHECK(spec_hash(back) == spec_hash(ex1));

  SystemSpec withopts = make_example("example2");
  withopts.options.epsilon = 0.125;
  withopts.options.eps_search = true;
  withopts.options.tol = 1e-11;
  withopts.options.norm = NormKind::Inf;
  CHECK(parse_spec(render_spec(withopts)) == withopts);

  SystemSpec edges = make_example("example2");
  edges.adjacency_kind = "edges";
  edges.adjacency = make_adjacency(2, {{0, 1}, {1, 0}});
  CHECK(parse_spec(render_spec(edges)) == edges);
}

TEST_CASE("parse_spec: errors carry line context") {
  CHECK_THROWS_AS(parse_spec("dimension 2\nsubsystem A\nrow 1 2 3\nrow 0 1\nend\nadjacency full\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_spec("dimension 2\nsubsystem A\nrow 1 0\nrow 0 1\nend\n"
                             "adjacency edges\nedge 1 1\nend\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_spec("dimension 2\nsubsystem A\nrow nan 0\nrow 0 1\nend\nadjacency full\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_spec("dimension 2\nsubsystem A\nrow inf 0\nrow 0 1\nend\nadjacency full\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_spec("subsystem A\nrow 1\nend\nadjacency full\n"), ParseError);
  CHECK_THROWS_AS(parse_spec(""), ValidationError);
  CHECK_THROWS_AS(parse_spec("dimension 2\nsubsystem A\nrow 0.5 0\nrow 0 0.5\nend\n"),
                  ValidationError);  // missing adjacency
  try {
    parse_spec("dimension 2\nsubsystem A\nrow 1 2 3\nrow 0 1\nend\nadjacency full\n");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("make_example: example1 subsystems are similar to the base matrix") {
  const SystemSpec spec = make_example("example1");
  REQUIRE(spec.subsystem_count() == 4);
  CHECK(spec.dimension == 3);
  const double rho0 = spectral_radius(spec.matrices[0]);
  for (const auto& a : spec.matrices) {
    CHECK(std::abs(spectral_radius(a) - rho0) < 1e-10);
    // similarity preserves the full spectrum, not just the radius
    const auto r0 = oracle::poly_roots(oracle::charpoly(spec.matrices[0]));
    auto rk = oracle::poly_roots(oracle::charpoly(a));
    double worst = 0.0;
    for (const auto& root : r0) {
      double best = 1e9;
      for (const auto& cand : rk) best = std::min(best, std::abs(root - cand));
      worst = std::max(worst, best);
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("make_example: example2 prints the fixed pair, unknown names rejected") {
  const SystemSpec spec = make_example("example2");
  REQUIRE(spec.subsystem_count() == 2);
  CHECK(spec.matrices[0](0, 0) == -0.38);
  CHECK(spec.matrices[1](1, 1) == -1.0);
  CHECK_THROWS_AS(make_example("example9"), ValidationError);
  CHECK_THROWS_AS(make_example("example1", "star"), ValidationError);
}

TEST_CASE("analyze_system: winners and determinism") {
  const SystemSpec spec = make_example("example2");
  const AnalyzeResult r1 = analyze_system(spec);
  const AnalyzeResult r2 = analyze_system(spec);
  CHECK(render_report(spec, r1) == render_report(spec, r2));

  REQUIRE(r1.winner_min.has_value());
  CHECK(r1.reports[*r1.winner_min].first == "corollary1");
  CHECK(r1.reports[*r1.winner_min].second.tau_int == 7);
  CHECK(r1.find("theorem1") != nullptr);
  CHECK(r1.find("theorem1")->tau_int == 8);
  CHECK(r1.find("corollary2") != nullptr);
  CHECK(r1.decomposition == "nondefective");
}

TEST_CASE("analyze_system: names the unstable subsystem") {
  SystemSpec spec = make_example("example2");
  spec.matrices[1] = RealMatrix::Identity(3, 3) * 1.01;
  try {
    analyze_system(spec);
    FAIL("expected NotSchurStableError");
  } catch (const NotSchurStableError& e) {
    CHECK(std::string(e.what()).find("A2") != std::string::npos);
  }
}

TEST_CASE("analyze_system: defective route reports epsilons") {
  SystemSpec spec;
  spec.dimension = 2;
  spec.names = {"J1", "J2"};
  RealMatrix j1(2, 2), j2(2, 2);
  j1 << 0.5, 1.0, 0.0, 0.5;
  j2 << 0.6, 1.0, 0.0, 0.6;
  spec.matrices = {j1, j2};
  spec.adjacency_kind = "full";
  spec.adjacency = fully_connected(2);
  const AnalyzeResult r = analyze_system(spec);
  CHECK(r.decomposition == "jordan");
  REQUIRE(r.epsilons.size() == 2);
  CHECK(r.epsilons[0] == doctest::Approx(0.25));
  CHECK(r.epsilons[1] == doctest::Approx(0.2));
  CHECK(r.find("theorem2") != nullptr);
  CHECK(r.find("theorem3_defective") != nullptr);
  CHECK(r.find("corollary1") == nullptr);  // bimodal refinements need eigenbases
}

TEST_CASE("report: flat section round-trips through the parser") {
  const SystemSpec spec = make_example("example1", "ring");
  const AnalyzeResult r = analyze_system(spec);
  const std::string text = render_report(spec, r);
  const auto flat = parse_report_flat(text);
  CHECK(flat.at("result.minimum.method") == "theorem1");
  CHECK(flat.at("result.minimum.tau") == "5");
  CHECK(flat.at("method.theorem1.tau") == "5");
  // re-rendering and re-parsing yields the same flat map
  CHECK(parse_report_flat(render_report(spec, r)) == flat);
}

TEST_CASE("report: graph dump contains every edge with twelve digits") {
  const SystemSpec spec = make_example("example1");
  const AnalyzeResult r = analyze_system(spec, false, false);
  const std::string text = render_graph_report(spec, r);
  CHECK(text.find("graph-edges 12") != std::string::npos);
  CHECK(text.find("w+ 0.660824726565") != std::string::npos);
}

TEST_CASE("simulation report embeds reproducibility metadata") {
  const SystemSpec spec = make_example("example1");
  SimulationRun run;
  run.hash = spec_hash(spec);
  run.tau = 7;
  run.trials = 5;
  run.horizon = 140;
  run.seed = 99;
  run.stats = empirical_decay(spec.matrices, spec.adjacency, 7, 5, 140, 99);
  const std::string text = render_simulation_report(spec, run);
  CHECK(text.find("seed 99") != std::string::npos);
  const auto flat = parse_report_flat(text);
  CHECK(flat.at("result.simulate.trials") == "5");
  // byte-identical on a second run with the same seed
  SimulationRun run2 = run;
  run2.stats = empirical_decay(spec.matrices, spec.adjacency, 7, 5, 140, 99);
  CHECK(render_simulation_report(spec, run2) == text);
}
