#pragma once

#include "riskmdp/mdp.hpp"

namespace riskmdp {

/**
 * Exponential transition model at a risk level beta: per-action matrices
 *   B^a[s][s'] = p(s,a,s') exp(-beta r(s,a,s'))   over non-sink states,
 *   b^a[s]     = p(s,a,e)  exp(-beta r(s,a,e)).
 * The affine operator w -> B^d w - b^d is the exponential Bellman operator
 * of the decision rule d.
 */
struct ExpModel {
    double beta = 0.0;
    int n = 0;  // non-sink states
    std::vector<std::vector<numvec>> B;  // [a][s][s']
    std::vector<numvec> b;               // [a][s]
    std::vector<indvec> admissible;      // actions per non-sink row
};

/// Builds the exponential model. Throws model_error when exp(-beta r)
/// overflows the double range ("risk level too large for reward scale").
ExpModel exp_model(const TransientMdp& mdp, double beta);

/// One application of the optimal exponential Bellman operator,
/// w'_s = max_a (B^a w - b^a)_s, with the greedy rule (ties -> lowest action).
/// Indices in the returned policy are non-sink row indices.
std::pair<numvec, indvec> exp_bellman(const ExpModel& model, const numvec& w);

/// B^d and b^d of a stationary policy, mixing rows for randomized rules.
std::pair<std::vector<numvec>, numvec> policy_exp_matrices(const ExpModel& model,
                                                           const TransientMdp& mdp,
                                                           const StationaryPolicy& d);

/**
 * Log-space view of the exponential model used by the value-iteration path:
 * entries log p - beta r stay representable for risk levels where B and b
 * overflow or underflow doubles.
 */
struct LogExpModel {
    double beta = 0.0;
    int n = 0;
    struct Entry {
        int to;          // non-sink row index, or -1 for the sink
        double log_coef; // log p(s,a,s') - beta r(s,a,s')
    };
    std::vector<std::vector<std::vector<Entry>>> rows;  // [s][a-slot]
    std::vector<indvec> admissible;
};

LogExpModel log_exp_model(const TransientMdp& mdp, double beta);

/// log rho(B^d) for a deterministic policy over non-sink row indices;
/// evaluated in log space so extreme risk levels stay finite.
double policy_log_radius(const LogExpModel& model, const indvec& greedy_rows);

} // namespace riskmdp
