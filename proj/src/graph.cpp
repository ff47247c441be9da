#include "dwell/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace dwell {

Adjacency make_adjacency(int m, std::vector<std::pair<int, int>> edges) {
  if (m < 0) throw ValidationError("adjacency: negative subsystem count");
  std::set<std::pair<int, int>> seen;
  for (const auto& [i, j] : edges) {
    if (i == j)
      throw ValidationError("adjacency: self-loop on node " + std::to_string(i + 1));
    if (i < 0 || j < 0 || i >= m || j >= m)
      throw ValidationError("adjacency: edge (" + std::to_string(i + 1) + ", " +
                            std::to_string(j + 1) + ") out of range 1.." + std::to_string(m));
    if (!seen.insert({i, j}).second)
      throw ValidationError("adjacency: duplicate edge (" + std::to_string(i + 1) + ", " +
                            std::to_string(j + 1) + ")");
  }
  Adjacency adj;
  adj.m = m;
  adj.edges.assign(seen.begin(), seen.end());
  return adj;
}

Adjacency fully_connected(int m) {
  if (m < 1) throw ValidationError("fully_connected: need at least one subsystem");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) e.emplace_back(i, j);
  return make_adjacency(m, std::move(e));
}

Adjacency ring(int m, bool two_sided) {
  if (m < 2) throw ValidationError("ring: need at least two subsystems");
  std::set<std::pair<int, int>> e;
  for (int k = 0; k < m; ++k) {
    e.insert({k, (k + 1) % m});
    if (two_sided) e.insert({(k + 1) % m, k});
  }
  return make_adjacency(m, {e.begin(), e.end()});
}

SwitchingGraph build_graph(const std::vector<ModalForm>& forms, const Adjacency& adj) {
  if (static_cast<int>(forms.size()) != adj.m)
    throw DimensionMismatchError("build_graph: " + std::to_string(forms.size()) +
                                 " forms for a " + std::to_string(adj.m) + "-node digraph");
  if (forms.empty()) throw DimensionMismatchError("build_graph: no subsystems");
  const Eigen::Index n = forms.front().dim();
  for (size_t i = 0; i < forms.size(); ++i) {
    if (forms[i].dim() != n)
      throw DimensionMismatchError("build_graph: subsystem " + std::to_string(i + 1) +
                                   " has mismatched dimension");
  }
  for (size_t i = 0; i < forms.size(); ++i) {
    if (forms[i].factor_norm < 1.0) continue;
    if (forms[i].kind == ModalKind::Jordan)
      throw Error("build_graph: subsystem " + std::to_string(i + 1) +
                  " has ||J_eps|| = " + std::to_string(forms[i].factor_norm) +
                  " >= 1; the Jordan-weighted graph requires ||J_i|| < 1 for every subsystem");
    throw NotSchurStableError("build_graph: subsystem " + std::to_string(i + 1) +
                              " has spectral radius >= 1");
  }

  // inverses computed once per target node
  std::vector<ComplexMatrix> inv(forms.size());
  for (size_t j = 0; j < forms.size(); ++j) inv[j] = forms[j].basis.partialPivLu().inverse();

  SwitchingGraph g;
  g.m = adj.m;
  g.edges.reserve(adj.edges.size());
  for (const auto& [i, j] : adj.edges) {
    SwitchingEdge e;
    e.from = i;
    e.to = j;
    e.w_plus = std::log(spectral_norm(ComplexMatrix(inv[j] * forms[i].basis)));
    // keep the loss finite for exactly-nilpotent subsystems (factor_norm 0)
    e.w_minus = -std::log(std::max(forms[i].factor_norm, 1e-300));
    g.edges.push_back(e);
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const SwitchingEdge& a, const SwitchingEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  return g;
}

}  // namespace dwell
