#pragma once

#include <optional>

#include "riskmdp/exp_model.hpp"
#include "riskmdp/mdp.hpp"
#include "riskmdp/risk.hpp"

namespace riskmdp {

/**
 * Solution of one ERM total-reward problem at a fixed risk level. When
 * bounded, w is the fixed point of the optimal exponential Bellman operator,
 * v = -log(-w)/beta elementwise over non-sink states, and g_mu is the ERM of
 * the value under the initial distribution. When unbounded, g_mu is -inf and
 * the remaining fields are unspecified.
 */
struct ErmSolution {
    bool bounded = false;
    numvec w;       // exponential values over non-sink states (< 0 when bounded)
    numvec v;       // values over non-sink states
    StationaryPolicy policy;
    double beta = 0.0;
    double g_mu = NEG_INF;
    long iterations = 0;
};

/**
 * Value iteration w^{k+1} = L* w^k from w^0 = 0; the start at zero gives the
 * monotone-from-above sequence that converges whenever the optimal return is
 * bounded. Sweeps run in v-space with per-state log-sum-exp, which is exactly
 * the same operator through w = -exp(-beta v) but representable at risk
 * levels far beyond double range in w.
 *
 * Declares the instance unbounded when a component falls below w_floor, or
 * when rho(B^d) of the greedy policy reaches 1 at a periodic stability check
 * (every 1000 sweeps and at convergence).
 *
 * Throws model_error("indeterminate") when max_iter sweeps yield neither
 * verdict; the message carries the residual.
 */
ErmSolution value_iteration(const TransientMdp& mdp, double beta, double tol = 1e-9,
                            long max_iter = 1000000, double w_floor = -1e12);

/**
 * Policy iteration: evaluation w = -(I - B^d)^{-1} b^d, improvement by the
 * greedy rule, stops when the policy repeats. Without pi0 the start is the
 * greedy policy of 100 value-iteration sweeps; if that warm start is not
 * contractive the routine defers to the full value-iteration verdict.
 *
 * Throws model_error when a user-provided pi0 has rho(B^{pi0}) >= 1.
 */
ErmSolution policy_iteration(const TransientMdp& mdp, double beta,
                             std::optional<StationaryPolicy> pi0 = std::nullopt);

/**
 * Linear program min 1'w s.t. w >= -b^a + B^a w over admissible (s,a),
 * solved as max 1'y over (I - B^a) y <= b^a, y >= 0 with y = -w. An
 * unbounded program is reported as an unbounded ERM instance.
 */
ErmSolution lp_solve(const TransientMdp& mdp, double beta);

/// ERM return g of a fixed stationary policy; -inf when rho(B^pi) >= 1.
/// beta = 0 evaluates the risk-neutral expected total reward.
double erm_return(const TransientMdp& mdp, const StationaryPolicy& pi, double beta);

/// h value g + log(alpha)/beta; -inf propagates.
double h_value(double g, double beta, double alpha);

/// Result of the beta-grid EVaR reduction.
struct EvarSolution {
    StationaryPolicy policy;
    double beta_star = 0.0;
    double value = NEG_INF;       // max over the h table
    numvec h_values;              // h at each grid beta (-inf where unbounded)
    BetaGrid grid;
    double delta = 0.0;
};

/**
 * EVaR-TRC solver: picks beta0 by halving until the optimal ERM return at
 * beta0 is within delta of the risk-neutral optimum (unless beta0 is given),
 * builds B(beta0, delta), solves an ERM problem per grid point (linear
 * program with a value-iteration fallback; the grid is processed in
 * parallel), and returns the argmax of h along with its policy. Ties take
 * the smallest beta. Guaranteed within delta of the EVaR-TRC optimum.
 *
 * Throws model_error when every grid entry is unbounded.
 */
EvarSolution evar_solve(const TransientMdp& mdp, double alpha, double delta,
                        std::optional<double> beta0 = std::nullopt);

/// ERM of a value vector under the initial distribution (log-sum-exp form).
double erm_under_initial(const TransientMdp& mdp, const numvec& values_nonsink, double beta);

} // namespace riskmdp
