#pragma once

#include <optional>
#include <vector>

#include "dwell/graph.hpp"

namespace dwell {

/// Simple cycle, canonical form: rotated so the smallest node index leads;
/// the closing edge (nodes.back(), nodes.front()) is implied.
struct Cycle {
  std::vector<int> nodes;
  bool operator==(const Cycle&) const = default;
};

enum class CycleObjective { Ratio, Mean };

struct CycleCertificate {
  Cycle cycle;
  double value = 0.0;  // w+(C)/w-(C) for Ratio, w+(C)/|C| for Mean
  CycleObjective kind = CycleObjective::Ratio;
};

/// Sum of w_plus (and w_minus) along a cycle, including the closing edge.
double cycle_gain(const SwitchingGraph& g, const Cycle& c);
double cycle_loss(const SwitchingGraph& g, const Cycle& c);
double cycle_ratio(const SwitchingGraph& g, const Cycle& c);
double cycle_mean(const SwitchingGraph& g, const Cycle& c);

/// Maximum cycle ratio via bisection on lambda with Bellman-Ford positive
/// cycle detection; the returned value is the exactly recomputed ratio of the
/// witness cycle and lies within tol of the true maximum. nullopt when the
/// graph is acyclic. Throws NonPositiveLossError if some w_minus <= 0.
std::optional<CycleCertificate> max_cycle_ratio(const SwitchingGraph& g, double tol = 1e-9);

/// Maximum cycle mean via Karp's dynamic program per strongly connected
/// component; exact up to floating-point rounding. nullopt when acyclic.
std::optional<CycleCertificate> max_cycle_mean(const SwitchingGraph& g);

/// Every simple cycle exactly once, canonical rotation, deterministic order.
/// Guarded oracle for small graphs: throws TooLargeError when g.m > max_nodes.
std::vector<Cycle> enumerate_cycles(const SwitchingGraph& g, int max_nodes = 10);

/// A simple cycle with w+(C) - lambda * w-(C) > 0, or nullopt when every
/// cycle's combined weight is <= 0. Such a cycle exists iff lambda < nu(G).
std::optional<Cycle> positive_cycle_exists(const SwitchingGraph& g, double lambda);

}  // namespace dwell
