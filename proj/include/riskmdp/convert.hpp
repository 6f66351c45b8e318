#pragma once

#include "riskmdp/mdp.hpp"

namespace riskmdp {

/// Discounted MDP without a sink state; input to the transient conversion.
struct DiscountedMdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<std::vector<std::vector<Transition>>> transitions;
    std::vector<indvec> admissible;
    numvec initial_dist;
};

enum class RewardMode {
    /// rewards are independent of the next state; kept as-is, including on
    /// the new transitions into the sink
    StateAction,
    /// next-state dependent rewards; scaled by 1/gamma on surviving
    /// transitions and zero into the sink
    NextState,
};

/**
 * Builds the transient MDP whose expected total reward equals the discounted
 * value of the input: every row keeps gamma of its mass and routes 1-gamma to
 * a fresh sink state appended after the existing states.
 *
 * Throws model_error when gamma is outside (0,1) or a row is not stochastic.
 */
TransientMdp discounted_to_transient(const DiscountedMdp& mdp, double gamma,
                                     RewardMode mode = RewardMode::StateAction);

/// Expected discounted value of a fixed policy in the original model.
numvec discounted_values(const DiscountedMdp& mdp, const StationaryPolicy& d, double gamma);

/// Reads the same CSV schema as load_mdp_csv but without sink semantics.
DiscountedMdp load_discounted_csv(const std::string& path);

} // namespace riskmdp
