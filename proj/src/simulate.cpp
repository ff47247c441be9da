#include "dwell/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dwell {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t t) {
  // splitmix64 step; decorrelates per-trial streams
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (t + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::vector<int>> out_neighbors(const Adjacency& adj) {
  std::vector<std::vector<int>> out(adj.m);
  for (const auto& [i, j] : adj.edges) out[i].push_back(j);
  for (auto& o : out) std::sort(o.begin(), o.end());
  return out;
}

}  // namespace

int SwitchingSignal::mode_at(long t) const {
  // last interval start <= t
  auto it = std::upper_bound(switch_times.begin(), switch_times.end(), t);
  const auto k = static_cast<size_t>(std::distance(switch_times.begin(), it)) - 1;
  return modes[k];
}

SwitchingSignal generate_signal(const Adjacency& adj, SignalMode mode, int tau, int n0,
                                long horizon, std::uint64_t seed) {
  if (tau < 1) throw ValidationError("generate_signal: tau must be >= 1");
  if (horizon < 0) throw ValidationError("generate_signal: negative horizon");
  std::mt19937_64 rng(seed);
  const auto out = out_neighbors(adj);

  std::vector<int> starts;
  for (int v = 0; v < adj.m; ++v)
    if (!out[v].empty()) starts.push_back(v);

  SwitchingSignal sig;
  sig.switch_times.push_back(0);
  if (starts.empty()) {
    // no outgoing edges anywhere: a single mode, no switchings
    sig.modes.push_back(adj.m > 0
                            ? std::uniform_int_distribution<int>(0, adj.m - 1)(rng)
                            : 0);
    return sig;
  }
  int cur = starts[std::uniform_int_distribution<size_t>(0, starts.size() - 1)(rng)];
  sig.modes.push_back(cur);

  if (mode == SignalMode::MinDwell) {
    long t = 0;
    while (true) {
      const long gap = std::uniform_int_distribution<long>(tau, 3L * tau)(rng);
      t += gap;
      if (t > horizon || out[cur].empty()) break;
      cur = out[cur][std::uniform_int_distribution<size_t>(0, out[cur].size() - 1)(rng)];
      sig.switch_times.push_back(t);
      sig.modes.push_back(cur);
    }
  } else {
    std::bernoulli_distribution flip(0.5);
    long switches = 0;
    for (long t = 1; t <= horizon; ++t) {
      if (out[cur].empty()) break;
      // switching at t is admissible iff the count stays below n0 + t/tau
      const bool allowed =
          static_cast<double>(switches + 1) <= static_cast<double>(n0) +
                                                   static_cast<double>(t) / static_cast<double>(tau);
      if (allowed && flip(rng)) {
        cur = out[cur][std::uniform_int_distribution<size_t>(0, out[cur].size() - 1)(rng)];
        sig.switch_times.push_back(t);
        sig.modes.push_back(cur);
        ++switches;
      }
    }
  }
  return sig;
}

bool signal_admissible(const SwitchingSignal& sig, const Adjacency& adj, SignalMode mode, int tau,
                       int n0, long horizon) {
  if (sig.switch_times.empty() || sig.switch_times.front() != 0) return false;
  if (sig.switch_times.size() != sig.modes.size()) return false;
  std::vector<std::vector<bool>> has(adj.m, std::vector<bool>(adj.m, false));
  for (const auto& [i, j] : adj.edges) has[i][j] = true;

  for (size_t k = 0; k < sig.modes.size(); ++k) {
    if (sig.modes[k] < 0 || sig.modes[k] >= adj.m) return false;
    if (k == 0) continue;
    if (sig.switch_times[k] <= sig.switch_times[k - 1]) return false;
    if (sig.modes[k] == sig.modes[k - 1]) return false;
    if (!has[sig.modes[k - 1]][sig.modes[k]]) return false;
  }
  if (mode == SignalMode::MinDwell) {
    for (size_t k = 1; k < sig.switch_times.size(); ++k)
      if (sig.switch_times[k] - sig.switch_times[k - 1] < tau) return false;
  } else {
    // N(t) counts switchings strictly before t
    for (long t = 0; t <= horizon; ++t) {
      long n = 0;
      for (size_t k = 1; k < sig.switch_times.size(); ++k)
        if (sig.switch_times[k] < t) ++n;
      if (static_cast<double>(n) >
          static_cast<double>(n0) + static_cast<double>(t) / static_cast<double>(tau))
        return false;
    }
  }
  return true;
}

Trajectory simulate(const std::vector<RealMatrix>& mats, const SwitchingSignal& sig,
                    const RealVector& x0, long horizon) {
  if (mats.empty()) throw DimensionMismatchError("simulate: no subsystems");
  const Eigen::Index n = mats.front().rows();
  for (const auto& a : mats)
    if (a.rows() != n || a.cols() != n)
      throw DimensionMismatchError("simulate: subsystem dimensions differ");
  if (x0.size() != n) throw DimensionMismatchError("simulate: x0 has wrong dimension");
  if (horizon < 0) throw ValidationError("simulate: negative horizon");
  for (int m : sig.modes)
    if (m < 0 || m >= static_cast<int>(mats.size()))
      throw DimensionMismatchError("simulate: signal references unknown subsystem");

  Trajectory traj;
  traj.states.reserve(horizon + 1);
  traj.norms.reserve(horizon + 1);
  RealVector x = x0;
  traj.states.push_back(x);
  traj.norms.push_back(x.norm());
  for (long t = 0; t < horizon; ++t) {
    x = mats[sig.mode_at(t)] * x;
    traj.states.push_back(x);
    traj.norms.push_back(x.norm());
  }
  return traj;
}

BoundCheck verify_bound(const std::vector<ModalForm>& forms, const SwitchingSignal& sig,
                        const Trajectory& traj, int tau) {
  const int s = sig.switch_count();
  for (int k = 1; k <= s; ++k) {
    if (sig.switch_times[k] - sig.switch_times[k - 1] < tau)
      throw SignalError("verify_bound: dwell shorter than tau at switching " + std::to_string(k));
    if (sig.modes[k] == sig.modes[k - 1])
      throw SignalError("verify_bound: consecutive equal modes at switching " + std::to_string(k));
  }

  // inverses of the target bases, one per subsystem
  std::vector<ComplexMatrix> inv(forms.size());
  for (size_t j = 0; j < forms.size(); ++j) inv[j] = forms[j].basis.partialPivLu().inverse();

  BoundCheck chk;
  chk.gamma = transient_gamma(forms);
  chk.worst_margin = std::numeric_limits<double>::infinity();
  const double x0n = traj.norms.at(0);
  double alpha = 0.0;
  for (int k = 1; k <= s; ++k) {
    const int from = sig.modes[k - 1];
    const int to = sig.modes[k];
    const double wp = std::log(spectral_norm(ComplexMatrix(inv[to] * forms[from].basis)));
    alpha += wp + static_cast<double>(tau) * std::log(forms[from].factor_norm);
    const long tn = sig.switch_times[k];
    if (tn >= static_cast<long>(traj.norms.size()))
      break;  // switching beyond the simulated horizon
    const double bound = chk.gamma * std::exp(alpha) * x0n + 1e-9;
    const double margin = bound - traj.norms[tn];
    chk.margins.push_back(margin);
    chk.worst_margin = std::min(chk.worst_margin, margin);
    if (margin < 0.0) ++chk.violations;
  }
  if (chk.margins.empty()) chk.worst_margin = 0.0;
  return chk;
}

namespace {

RealVector trial_x0(Eigen::Index n, int trial, std::uint64_t ts) {
  RealVector x0(n);
  if (trial < n) {
    x0.setZero();
    x0(trial) = 1.0;  // basis directions first, then the random sphere
    return x0;
  }
  std::mt19937_64 rng(ts ^ 0x5deece66dULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  do {
    for (Eigen::Index i = 0; i < n; ++i) x0(i) = gauss(rng);
  } while (x0.norm() < 1e-12);
  return x0 / x0.norm();
}

void accumulate(DecayStats* stats, const Trajectory& traj) {
  const double base = traj.norms.front();
  stats->max_final_ratio = std::max(stats->max_final_ratio, traj.norms.back() / base);
  for (double nn : traj.norms) stats->max_peak_ratio = std::max(stats->max_peak_ratio, nn / base);
}

}  // namespace

DecayStats empirical_decay(const std::vector<RealMatrix>& mats, const Adjacency& adj, int tau,
                           int trials, long horizon, std::uint64_t seed, SignalMode mode,
                           int n0) {
  if (trials < 1) throw ValidationError("empirical_decay: trials must be >= 1");
  const Eigen::Index n = mats.empty() ? 0 : mats.front().rows();

  DecayStats stats;
  stats.trials = trials;
  stats.horizon = horizon;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t ts = mix_seed(seed, static_cast<std::uint64_t>(trial));
    SwitchingSignal sig = generate_signal(adj, mode, tau, n0, horizon, ts);
    const Trajectory traj = simulate(mats, sig, trial_x0(n, trial, ts), horizon);
    accumulate(&stats, traj);
  }
  return stats;
}

SwitchingSignal adversarial_signal(const Cycle& cycle, int tau, long horizon) {
  if (cycle.nodes.size() < 2) throw ValidationError("adversarial_signal: need a cycle");
  if (tau < 1) throw ValidationError("adversarial_signal: tau must be >= 1");
  SwitchingSignal sig;
  sig.switch_times.push_back(0);
  sig.modes.push_back(cycle.nodes.front());
  for (long t = tau; t <= horizon; t += tau) {
    sig.switch_times.push_back(t);
    sig.modes.push_back(cycle.nodes[sig.modes.size() % cycle.nodes.size()]);
  }
  return sig;
}

DecayStats adversarial_decay(const std::vector<RealMatrix>& mats, const Cycle& cycle, int tau,
                             int trials, long horizon, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("adversarial_decay: trials must be >= 1");
  const Eigen::Index n = mats.empty() ? 0 : mats.front().rows();
  const SwitchingSignal sig = adversarial_signal(cycle, tau, horizon);

  DecayStats stats;
  stats.trials = trials;
  stats.horizon = horizon;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t ts = mix_seed(seed, static_cast<std::uint64_t>(trial));
    const Trajectory traj = simulate(mats, sig, trial_x0(n, trial, ts), horizon);
    accumulate(&stats, traj);
  }
  return stats;
}

}  // namespace dwell
