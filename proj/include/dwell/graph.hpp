#pragma once

#include <utility>
#include <vector>

#include "dwell/modal.hpp"

namespace dwell {

/// Admissible-transition digraph over subsystem indices 0..m-1. Self-loops
/// are rejected; staying in a mode is expressed by a longer dwell, not an
/// edge.
struct Adjacency {
  int m = 0;
  std::vector<std::pair<int, int>> edges;  // sorted, unique
};

/// Throws ValidationError on self-loops, out-of-range endpoints or
/// duplicates; returns the adjacency with edges sorted.
Adjacency make_adjacency(int m, std::vector<std::pair<int, int>> edges);

/// All ordered pairs (i, j), i != j.
Adjacency fully_connected(int m);

/// One-sided ring 0 -> 1 -> ... -> m-1 -> 0, plus the reverse edges when
/// two_sided is set.
Adjacency ring(int m, bool two_sided);

struct SwitchingEdge {
  int from = 0;
  int to = 0;
  double w_plus = 0.0;   // ln ||basis_to^-1 basis_from||
  double w_minus = 0.0;  // -ln factor_norm_from
};

/// Doubly weighted switching graph; edges sorted by (from, to).
struct SwitchingGraph {
  int m = 0;
  std::vector<SwitchingEdge> edges;
};

/// Assemble the switching graph from per-subsystem modal forms and an
/// admissible-transition digraph. Requires equal dimensions and
/// factor_norm < 1 on every form (the loss weight must be positive).
SwitchingGraph build_graph(const std::vector<ModalForm>& forms, const Adjacency& adj);

}  // namespace dwell
