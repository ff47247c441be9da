#include "dwell/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dwell {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// m x m edge-index table, -1 where absent.
std::vector<std::vector<int>> edge_index(const SwitchingGraph& g) {
  std::vector<std::vector<int>> idx(g.m, std::vector<int>(g.m, -1));
  for (size_t e = 0; e < g.edges.size(); ++e)
    idx[g.edges[e].from][g.edges[e].to] = static_cast<int>(e);
  return idx;
}

const SwitchingEdge& edge_on(const SwitchingGraph& g, const std::vector<std::vector<int>>& idx,
                             int u, int v) {
  const int e = idx[u][v];
  if (e < 0)
    throw Error("cycle uses non-edge (" + std::to_string(u + 1) + ", " + std::to_string(v + 1) +
                ")");
  return g.edges[e];
}

Cycle canonical(std::vector<int> nodes) {
  const auto it = std::min_element(nodes.begin(), nodes.end());
  std::rotate(nodes.begin(), it, nodes.end());
  return Cycle{std::move(nodes)};
}

/// Tarjan strongly connected components, iterative. Returns component id per
/// node; ids are otherwise arbitrary.
std::vector<int> scc_ids(const SwitchingGraph& g) {
  std::vector<std::vector<int>> out(g.m);
  for (const auto& e : g.edges) out[e.from].push_back(e.to);

  std::vector<int> comp(g.m, -1), low(g.m, 0), num(g.m, -1), stk;
  std::vector<bool> on_stack(g.m, false);
  int counter = 0, ncomp = 0;

  struct Frame {
    int v;
    size_t next_child;
  };
  for (int root = 0; root < g.m; ++root) {
    if (num[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    num[root] = low[root] = counter++;
    stk.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next_child < out[f.v].size()) {
        const int w = out[f.v][f.next_child++];
        if (num[w] == -1) {
          num[w] = low[w] = counter++;
          stk.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], num[w]);
        }
      } else {
        if (low[f.v] == num[f.v]) {
          while (true) {
            const int w = stk.back();
            stk.pop_back();
            on_stack[w] = false;
            comp[w] = ncomp;
            if (w == f.v) break;
          }
          ++ncomp;
        }
        const int done = f.v;
        call.pop_back();
        if (!call.empty()) {
          const int p = call.back().v;
          low[p] = std::min(low[p], low[done]);
        }
      }
    }
  }
  return comp;
}

/// Edges whose endpoints share a strongly connected component; only these can
/// lie on a cycle.
SwitchingGraph intra_scc_subgraph(const SwitchingGraph& g, bool* has_cycle) {
  const auto comp = scc_ids(g);
  SwitchingGraph sub;
  sub.m = g.m;
  for (const auto& e : g.edges)
    if (comp[e.from] == comp[e.to]) sub.edges.push_back(e);
  // no self-loops in this domain, so a cycle exists iff some intra-SCC edge does
  *has_cycle = !sub.edges.empty();
  return sub;
}

}  // namespace

double cycle_gain(const SwitchingGraph& g, const Cycle& c) {
  const auto idx = edge_index(g);
  double s = 0.0;
  for (size_t k = 0; k < c.nodes.size(); ++k)
    s += edge_on(g, idx, c.nodes[k], c.nodes[(k + 1) % c.nodes.size()]).w_plus;
  return s;
}

double cycle_loss(const SwitchingGraph& g, const Cycle& c) {
  const auto idx = edge_index(g);
  double s = 0.0;
  for (size_t k = 0; k < c.nodes.size(); ++k)
    s += edge_on(g, idx, c.nodes[k], c.nodes[(k + 1) % c.nodes.size()]).w_minus;
  return s;
}

double cycle_ratio(const SwitchingGraph& g, const Cycle& c) {
  return cycle_gain(g, c) / cycle_loss(g, c);
}

double cycle_mean(const SwitchingGraph& g, const Cycle& c) {
  return cycle_gain(g, c) / static_cast<double>(c.nodes.size());
}

std::vector<Cycle> enumerate_cycles(const SwitchingGraph& g, int max_nodes) {
  if (g.m > max_nodes)
    throw TooLargeError("enumerate_cycles: " + std::to_string(g.m) + " nodes exceeds guard " +
                        std::to_string(max_nodes));
  std::vector<std::vector<int>> out(g.m);
  for (const auto& e : g.edges) out[e.from].push_back(e.to);
  for (auto& o : out) std::sort(o.begin(), o.end());

  std::vector<Cycle> cycles;
  std::vector<int> path;
  std::vector<bool> on_path(g.m, false);
  // start at the smallest node of each cycle; only larger nodes may follow
  auto dfs = [&](auto&& self, int start, int v) -> void {
    for (const int w : out[v]) {
      if (w == start && path.size() >= 2) {
        cycles.push_back(Cycle{path});
      } else if (w > start && !on_path[w]) {
        path.push_back(w);
        on_path[w] = true;
        self(self, start, w);
        path.pop_back();
        on_path[w] = false;
      }
    }
  };
  for (int s = 0; s < g.m; ++s) {
    path.assign(1, s);
    on_path.assign(g.m, false);
    on_path[s] = true;
    dfs(dfs, s, s);
  }
  return cycles;
}

std::optional<Cycle> positive_cycle_exists(const SwitchingGraph& g, double lambda) {
  for (const auto& e : g.edges)
    if (!(e.w_minus > 0.0))
      throw NonPositiveLossError("positive_cycle_exists: edge (" + std::to_string(e.from + 1) +
                                 ", " + std::to_string(e.to + 1) + ") has w_minus <= 0");
  const int n = g.m;
  if (n == 0 || g.edges.empty()) return std::nullopt;

  // Bellman-Ford longest-walk relaxation from an implicit super source
  // (all distances start at 0); an improvement in round n exposes a
  // positive-weight cycle in the predecessor structure.
  std::vector<double> dist(n, 0.0);
  std::vector<int> pred(n, -1);
  std::vector<int> improved;
  const auto idx = edge_index(g);

  auto relax_round = [&]() {
    improved.clear();
    for (const auto& e : g.edges) {
      const double cand = dist[e.from] + (e.w_plus - lambda * e.w_minus);
      if (cand > dist[e.to]) {
        dist[e.to] = cand;
        pred[e.to] = e.from;
        improved.push_back(e.to);
      }
    }
    return !improved.empty();
  };

  auto extract = [&]() -> std::optional<Cycle> {
    for (int v0 : improved) {
      // chase predecessors until a node repeats; pred[x] = u records edge
      // u -> x, so the chain is backward and the repeated segment reversed
      // is the cycle
      std::vector<int> mark(n, -1), chain;
      int v = v0;
      while (v != -1 && mark[v] == -1) {
        mark[v] = static_cast<int>(chain.size());
        chain.push_back(v);
        v = pred[v];
      }
      if (v == -1) continue;  // chain bottomed out at an unimproved node
      std::vector<int> slice(chain.begin() + mark[v], chain.end());
      std::reverse(slice.begin(), slice.end());
      Cycle c = canonical(std::move(slice));
      double w = 0.0;
      for (size_t k = 0; k < c.nodes.size(); ++k) {
        const auto& e = edge_on(g, idx, c.nodes[k], c.nodes[(k + 1) % c.nodes.size()]);
        w += e.w_plus - lambda * e.w_minus;
      }
      if (w > 0.0) return c;
    }
    return std::nullopt;
  };

  for (int round = 1; round <= n; ++round)
    if (!relax_round()) return std::nullopt;
  if (auto c = extract()) return c;
  // rare: the round-n predecessor structure did not yet close over a positive
  // cycle; keep relaxing, distances along such a cycle rise every round
  for (int extra = 0; extra < n; ++extra) {
    if (!relax_round()) return std::nullopt;
    if (auto c = extract()) return c;
  }
  return std::nullopt;
}

std::optional<CycleCertificate> max_cycle_ratio(const SwitchingGraph& g, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("max_cycle_ratio: tol must be positive");
  for (const auto& e : g.edges)
    if (!(e.w_minus > 0.0))
      throw NonPositiveLossError("max_cycle_ratio: edge (" + std::to_string(e.from + 1) + ", " +
                                 std::to_string(e.to + 1) + ") has w_minus <= 0");
  bool has_cycle = false;
  const SwitchingGraph sub = intra_scc_subgraph(g, &has_cycle);
  if (!has_cycle) return std::nullopt;

  double wmax = 0.0, lmin = std::numeric_limits<double>::infinity();
  for (const auto& e : sub.edges) {
    wmax = std::max(wmax, std::abs(e.w_plus));
    lmin = std::min(lmin, e.w_minus);
  }
  const double bracket = wmax / lmin + 1.0;
  double lo = -bracket, hi = bracket;

  std::optional<Cycle> witness = positive_cycle_exists(sub, lo);
  if (!witness) throw Error("max_cycle_ratio: no cycle above the lower bracket; inconsistent graph");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto c = positive_cycle_exists(sub, mid)) {
      witness = std::move(c);
      lo = mid;
    } else {
      hi = mid;
    }
  }
  CycleCertificate cert;
  cert.cycle = *witness;
  cert.value = cycle_ratio(g, cert.cycle);
  cert.kind = CycleObjective::Ratio;
  return cert;
}

std::optional<CycleCertificate> max_cycle_mean(const SwitchingGraph& g) {
  const auto comp = scc_ids(g);
  int ncomp = 0;
  for (int c : comp) ncomp = std::max(ncomp, c + 1);

  std::vector<std::vector<int>> members(ncomp);
  for (int v = 0; v < g.m; ++v) members[comp[v]].push_back(v);

  std::optional<CycleCertificate> best;
  for (int cid = 0; cid < ncomp; ++cid) {
    const auto& nodes = members[cid];
    const int ns = static_cast<int>(nodes.size());
    if (ns < 2) continue;  // no self-loops, so singleton components are acyclic

    std::vector<int> local(g.m, -1);
    for (int i = 0; i < ns; ++i) local[nodes[i]] = i;
    struct LocalEdge {
      int u, v;
      double w;
    };
    std::vector<LocalEdge> edges;
    for (const auto& e : g.edges)
      if (comp[e.from] == cid && comp[e.to] == cid)
        edges.push_back({local[e.from], local[e.to], e.w_plus});

    // Karp: D[k][v] = max w+ weight of a k-edge walk source -> v
    std::vector<std::vector<double>> D(ns + 1, std::vector<double>(ns, kNegInf));
    std::vector<std::vector<int>> par(ns + 1, std::vector<int>(ns, -1));
    D[0][0] = 0.0;  // source = nodes[0]
    for (int k = 1; k <= ns; ++k)
      for (const auto& e : edges)
        if (D[k - 1][e.u] != kNegInf && D[k - 1][e.u] + e.w > D[k][e.v]) {
          D[k][e.v] = D[k - 1][e.u] + e.w;
          par[k][e.v] = e.u;
        }

    double mu = kNegInf;
    int vstar = -1;
    for (int v = 0; v < ns; ++v) {
      if (D[ns][v] == kNegInf) continue;
      double worst = std::numeric_limits<double>::infinity();
      for (int k = 0; k < ns; ++k) {
        if (D[k][v] == kNegInf) continue;
        worst = std::min(worst, (D[ns][v] - D[k][v]) / static_cast<double>(ns - k));
      }
      if (worst > mu) {
        mu = worst;
        vstar = v;
      }
    }
    if (vstar < 0) continue;

    // critical cycle: first repeat on the optimal ns-edge walk ending at vstar
    std::vector<int> walk(ns + 1);
    walk[ns] = vstar;
    for (int k = ns; k >= 1; --k) walk[k - 1] = par[k][walk[k]];
    std::vector<int> seen_at(ns, -1);
    std::vector<int> cyc;
    for (int k = 0; k <= ns; ++k) {
      if (seen_at[walk[k]] >= 0) {
        for (int i = seen_at[walk[k]]; i < k; ++i) cyc.push_back(nodes[walk[i]]);
        break;
      }
      seen_at[walk[k]] = k;
    }
    if (cyc.empty()) continue;

    CycleCertificate cert;
    cert.cycle = canonical(std::move(cyc));
    cert.value = cycle_mean(g, cert.cycle);
    cert.kind = CycleObjective::Mean;
    if (!best || cert.value > best->value) best = std::move(cert);
  }
  return best;
}

}  // namespace dwell
