#pragma once

#include <optional>

#include "riskmdp/mdp.hpp"
#include "riskmdp/mmdp.hpp"

namespace riskmdp {

/// Gambler's ruin: capital 0..cap, bet doubles with probability win_prob.
struct GamblerSpec {
    double win_prob = 0.68;
    int cap = 7;
};

/// 7x7 cliff walk with slippery moves. Cliff cells are not states: stepping
/// into one pays the penalty and teleports to the restart cell b.
struct CliffSpec {
    int rows = 7;
    int cols = 7;
    double move_prob = 0.91;
    double slip_prob = 0.03;  // each of the other three moves
    double goal_reward = 2.0;
    double d_reward = 0.004;
    numvec cliff_rewards = {-0.5, -0.6, -0.7, -0.8, -0.9};  // left to right
};

/// Two-state chain: the single action loops with probability eps and reward r,
/// and terminates with probability 1-eps and reward 0.
struct ChainSpec {
    double r = -1.0;
    double eps = 0.5;
};

/**
 * Gambler's ruin MDP. States are 0..cap plus the sink; action 0 quits and
 * collects the capital (reward -1 when broke, cap at the cap), action a in
 * 1..s bets a. The initial distribution is uniform over capitals 1..cap.
 */
TransientMdp gamblers_ruin(const GamblerSpec& spec);

/**
 * Cliff-walk MDP on a rows x cols grid. The restart cell b is the top-right
 * corner, the goal g the bottom-right; the cliff occupies bottom-row columns
 * 1..5 and the bonus cell d sits at row 5, column 2. Entering g pays the goal
 * reward and g exits to the sink with reward 0. Moves off the grid stay in
 * place. The initial distribution is uniform over non-sink, non-goal states.
 */
TransientMdp cliff_walk(const CliffSpec& spec);

/// Grid-cell to state-id mapping for the cliff walk (row-major, skipping
/// cliff cells); -1 for cliff cells.
int cliff_state_id(const CliffSpec& spec, int row, int col);

TransientMdp chain_mdp(const ChainSpec& spec);

/**
 * ERM return of the chain in closed form: the episode return is r times a
 * truncated geometric number of loops. For an infinite horizon the value is
 * finite exactly when eps * exp(-beta r) < 1, and -inf otherwise.
 */
double chain_erm_closed_form(const ChainSpec& spec, double beta,
                             std::optional<long> horizon = std::nullopt);

/**
 * The two-model MMDP on which no Markov policy achieves sublinear regret.
 * Four states, two actions; model 1 pays 2 for reaching state 2 (paper
 * numbering), model 2 pays 3 for reaching state 4 and 2 for reaching
 * state 2. lambda is the weight of model 1. Episodes start in state 1.
 */
Mmdp counterexample_mmdp(double lambda, int horizon = 3);

} // namespace riskmdp
