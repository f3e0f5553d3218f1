#pragma once

// Internal: single realization of the collapse chain, shared by the walker
// ensemble and the trajectory unraveling so both produce the same history
// from the same (base_seed, index). Not installed.

#include <functional>

#include "packetsim/ctrw.hpp"

namespace packetsim::detail {

struct ChainHooks {
  const std::vector<double>* sample_times = nullptr;  // ascending
  // k, state at sample_times[k], collapsed yet?
  std::function<void(std::size_t, const StateVector&, bool)> on_sample;
  std::function<void(const JumpEvent&, const StateVector&)> on_jump;  // pre-jump state
  StateVector* final_state = nullptr;  // state at t_final if requested
};

// Uniform draw order per segment is frozen: waiting time first, then (after
// propagating) destination cell and two in-cell jitter coordinates.
// Observers must not draw randomness.
Walker run_chain(const StateVector& psi0, const Potential& pot,
                 const EvolutionConfig& cfg, double tau, double sigma,
                 double t0, double t_final, std::uint64_t base_seed,
                 std::uint64_t index, const ChainHooks& hooks);

}  // namespace packetsim::detail
