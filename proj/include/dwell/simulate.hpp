#pragma once

#include <cstdint>
#include <vector>

#include "dwell/analysis.hpp"

namespace dwell {

enum class SignalMode { MinDwell, AvgDwell };

/// Admissible switching signal: mode modes[k] is active on the interval
/// [switch_times[k], switch_times[k+1]), the last mode forever after.
/// switch_times[0] == 0; the switchings themselves happen at
/// switch_times[1..].
struct SwitchingSignal {
  std::vector<long> switch_times;
  std::vector<int> modes;

  int mode_at(long t) const;
  int switch_count() const { return static_cast<int>(switch_times.size()) - 1; }
};

/// Draw a random admissible signal. MinDwell: dwell lengths uniform on
/// [tau, 3 tau]; AvgDwell: greedy random switching that never violates
/// N(t) <= n0 + t/tau. Deterministic given the seed.
SwitchingSignal generate_signal(const Adjacency& adj, SignalMode mode, int tau, int n0,
                                long horizon, std::uint64_t seed);

/// Independent validator: re-checks the digraph constraint plus the dwell
/// (or average-dwell) inequality over [0, horizon].
bool signal_admissible(const SwitchingSignal& sig, const Adjacency& adj, SignalMode mode, int tau,
                       int n0, long horizon);

struct Trajectory {
  std::vector<RealVector> states;  // x(0..T)
  std::vector<double> norms;
};

/// Iterate x(t+1) = A_{sigma(t)} x(t) for t = 0..T-1.
Trajectory simulate(const std::vector<RealMatrix>& mats, const SwitchingSignal& sig,
                    const RealVector& x0, long horizon);

struct BoundCheck {
  int violations = 0;
  double worst_margin = 0.0;         // min over switchings of bound - ||x(t_n)||
  std::vector<double> margins;       // one entry per switching instant
  double gamma = 1.0;
  bool ok() const { return violations == 0; }
};

/// Check ||x(t_n)|| <= gamma e^{alpha(n)} ||x(0)|| + 1e-9 at every switching
/// instant, with alpha accumulating the gain weights and tau ln(factor_norm)
/// per completed dwell. Throws SignalError when the signal is not in the
/// minimum-dwell set for tau.
BoundCheck verify_bound(const std::vector<ModalForm>& forms, const SwitchingSignal& sig,
                        const Trajectory& traj, int tau);

struct DecayStats {
  double max_final_ratio = 0.0;  // max over trials of ||x(T)|| / ||x(0)||
  double max_peak_ratio = 0.0;   // max over trials and t of ||x(t)|| / ||x(0)||
  int trials = 0;
  long horizon = 0;
};

/// Monte-Carlo decay check: random admissible signals from random unit-sphere
/// initial states (basis directions first). Trials are seeded independently
/// from `seed` and aggregated by trial index.
DecayStats empirical_decay(const std::vector<RealMatrix>& mats, const Adjacency& adj, int tau,
                           int trials, long horizon, std::uint64_t seed,
                           SignalMode mode = SignalMode::MinDwell, int n0 = 0);

/// The harshest signal a minimum-dwell certificate covers: dwell exactly tau
/// on each node of the cycle, looping until the horizon.
SwitchingSignal adversarial_signal(const Cycle& cycle, int tau, long horizon);

/// Decay check under the adversarial signal; trials vary the initial state
/// only (basis directions first, then the random unit sphere).
DecayStats adversarial_decay(const std::vector<RealMatrix>& mats, const Cycle& cycle, int tau,
                             int trials, long horizon, std::uint64_t seed);

}  // namespace dwell
