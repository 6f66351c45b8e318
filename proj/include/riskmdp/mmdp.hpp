#pragma once

#include <optional>
#include <string>

#include "riskmdp/types.hpp"

namespace riskmdp {

/**
 * Finite-horizon multi-model MDP: M weighted models over a shared state and
 * action space, stationary transitions, per-stage rewards. The objective is
 * the lambda-weighted mean return of a single Markov policy.
 */
struct Mmdp {
    int horizon = 0;  // T
    int n_states = 0;
    int n_actions = 0;
    int n_models = 0;
    /// p[m][s][a] is the dense transition row of model m
    std::vector<std::vector<std::vector<numvec>>> p;
    /// r[m][t][s][a] is the stage-t reward of model m
    std::vector<std::vector<std::vector<numvec>>> r;
    numvec lambda;  // model weights, positive, sum to 1
    numvec mu;      // initial state distribution

    /// Builds stage-constant rewards from a single per-model table.
    static Mmdp stationary_rewards(int horizon, numvec lambda, numvec mu,
                                   std::vector<std::vector<std::vector<numvec>>> p,
                                   std::vector<std::vector<numvec>> r_sa);

    /// Throws model_error when rows are not stochastic, lambda is not a
    /// positive distribution, or the horizon is not positive.
    void check() const;
};

/// Deterministic Markov policy, actions[t][s].
struct MarkovPolicy {
    std::vector<indvec> actions;
    int horizon() const { return int(actions.size()); }
};

/// Randomized Markov policy, probs[t][s][a]; gradient-evaluation input only.
struct RandomizedMarkovPolicy {
    std::vector<std::vector<numvec>> probs;
    int horizon() const { return int(probs.size()); }

    static RandomizedMarkovPolicy from(const MarkovPolicy& pi, int n_actions);
    static RandomizedMarkovPolicy uniform(const Mmdp& mmdp);
};

/// Adjustable model weights b[t][m][s]: joint probability of model m and
/// state s at stage t. Marginalizes to 1 at every stage.
struct WeightTable {
    std::vector<std::vector<numvec>> b;
};

/// Per-model state-action values q[t][m][s][a] and state values v[t][m][s];
/// v has horizon+1 stages with the terminal stage zero.
struct QTensor {
    std::vector<std::vector<std::vector<numvec>>> q;
    std::vector<std::vector<numvec>> v;
};

/// lambda-weighted mean return of a policy (exact backward induction).
double mmdp_return(const Mmdp& mmdp, const MarkovPolicy& pi);
double mmdp_return(const Mmdp& mmdp, const RandomizedMarkovPolicy& pi);

/// Forward recursion for the adjustable weights.
WeightTable model_weights(const Mmdp& mmdp, const MarkovPolicy& pi);
WeightTable model_weights(const Mmdp& mmdp, const RandomizedMarkovPolicy& pi);

/// Backward induction for the per-model value tensors.
QTensor q_values(const Mmdp& mmdp, const MarkovPolicy& pi);
QTensor q_values(const Mmdp& mmdp, const RandomizedMarkovPolicy& pi);

/// Exact return gradient d rho / d pi_t(s,a) = sum_m b[t][m][s] q[t][m][s][a].
std::vector<std::vector<numvec>> policy_gradient(const Mmdp& mmdp,
                                                 const RandomizedMarkovPolicy& pi);

/// Mean value problem: dynamic programming on the lambda-averaged model.
MarkovPolicy mvp_solve(const Mmdp& mmdp);

/// Weight-select-update: backward pass choosing argmax_a sum_m lambda_m q.
MarkovPolicy wsu_solve(const Mmdp& mmdp);

/**
 * One coordinate-ascent sweep: walks stages backward, re-selecting the action
 * of every state against the supplied weights while refreshing the value
 * tables in place, so stage t sees the updated policy at stages above t.
 */
MarkovPolicy optimize_policy(const Mmdp& mmdp, const WeightTable& weights,
                             const MarkovPolicy& prev);

struct CadpResult {
    MarkovPolicy policy;
    numvec returns;  // rho after each iteration, starting with rho(pi0)
    long iterations = 0;
};

/**
 * Coordinate-ascent dynamic programming: alternates weight computation and
 * optimize_policy until the return stops improving (threshold 1e-12).
 * Defaults pi0 to the WSU solution.
 */
CadpResult cadp_solve(const Mmdp& mmdp, std::optional<MarkovPolicy> pi0 = std::nullopt,
                      long max_iterations = 10000);

/// Scales stage-t rewards by gamma^t (gamma = 1 is the identity).
Mmdp apply_discount(const Mmdp& mmdp, double gamma);

/// Directory layout: model_<k>.csv per model, weights.csv, meta.txt (T, gamma).
void save_mmdp_dir(const Mmdp& mmdp, const std::string& dir);
Mmdp load_mmdp_dir(const std::string& dir);

} // namespace riskmdp
