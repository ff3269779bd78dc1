#pragma once

// Per-link two-state blockage channel (Gilbert-Elliot). Every link runs an
// independent LoS/Blocked Markov chain stepped once per slot.

#include <cstdint>
#include <vector>

#include "iabsim/core.hpp"

namespace iabsim {

enum class LinkState : std::uint8_t { LoS, Blocked };

struct ChannelParams {
  double p_block{0.0};    // LoS -> Blocked per slot
  double p_recover{1.0};  // Blocked -> LoS per slot

  // Stationary probability of the Blocked state.
  double stationary_blocked() const {
    double total = p_block + p_recover;
    return total > 0.0 ? p_block / total : 0.0;
  }
};

// Chain with stationary Blocked mass `p_blk_steady` and mean Blocked sojourn
// `mean_block_duration` slots.
inline ChannelParams derive_transition_probs(double p_blk_steady, double mean_block_duration) {
  if (!(p_blk_steady >= 0.0) || p_blk_steady >= 1.0)
    throw Error("steady-state blockage probability must lie in [0, 1)");
  if (!(mean_block_duration >= 1.0)) throw Error("mean blockage duration must be at least one slot");
  ChannelParams params;
  params.p_recover = 1.0 / mean_block_duration;
  params.p_block = p_blk_steady * params.p_recover / (1.0 - p_blk_steady);
  if (params.p_block > 1.0) throw Error("blockage parameters imply p_block > 1");
  return params;
}

struct ChannelState {
  std::vector<LinkState> links;

  std::size_t size() const { return links.size(); }
};

// Initial state drawn from the stationary distribution, one draw per link in
// link-id order.
inline ChannelState stationary_channel_state(std::size_t link_count, const ChannelParams& params,
                                             Rng& rng) {
  ChannelState state;
  state.links.resize(link_count);
  const double blocked = params.stationary_blocked();
  for (auto& s : state.links) s = rng.bernoulli(blocked) ? LinkState::Blocked : LinkState::LoS;
  return state;
}

// One slot of evolution: exactly one draw per link, in link-id order.
inline void step_channels(ChannelState& state, const ChannelParams& params, Rng& rng) {
  for (auto& s : state.links) {
    const double u = rng.uniform();
    if (s == LinkState::LoS) {
      if (u < params.p_block) s = LinkState::Blocked;
    } else {
      if (u < params.p_recover) s = LinkState::LoS;
    }
  }
}

inline bool is_available(LinkId link, const ChannelState& state) {
  if (link.index() >= state.links.size()) throw Error("unknown link id");
  return state.links[link.index()] == LinkState::LoS;
}

}  // namespace iabsim
