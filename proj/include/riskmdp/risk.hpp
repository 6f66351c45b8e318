#pragma once

#include "riskmdp/types.hpp"

namespace riskmdp {

/// Finite-support distribution of a real random variable.
struct FiniteDistribution {
    numvec outcomes;
    numvec probs;

    size_t size() const { return outcomes.size(); }
    double mean() const;
    double min_outcome() const;
    double max_outcome() const;

    static FiniteDistribution point(double x) { return {{x}, {1.0}}; }
    static FiniteDistribution empirical(const numvec& samples);
};

/**
 * Entropic risk of a finite distribution,
 *   -1/beta * log E[exp(-beta x)],
 * evaluated with a max-shift so that beta values far beyond the overflow
 * point of exp stay usable. beta = 0 returns the mean.
 */
double erm(const FiniteDistribution& dist, double beta);

/**
 * Entropic value at risk,
 *   sup_{beta in (0, beta_cap]} erm(beta) + log(alpha)/beta.
 * The objective is concave in 1/beta, so the supremum is located by seeding
 * 64 log-spaced beta values and refining the winning bracket with a
 * golden-section search in 1/beta; the bracket is extended to 1/beta -> 0
 * (essential infimum) when the cap wins. alpha = 0 returns the minimum
 * outcome and alpha = 1 the mean.
 */
double evar(const FiniteDistribution& dist, double alpha, double beta_cap = 1e4);

/// Loss used to elicit ERM, with its derivative. `overflow` is set when
/// exp(-beta z) exceeds the double range; the value saturates to +inf.
struct ErmLoss {
    double value;
    double derivative;
    bool overflow;
};
ErmLoss erm_loss(double z, double beta);

/// ERM recovered as the argmin of the expected elicitation loss; bisection
/// on the derivative to 1e-10. Agrees with erm() within 1e-8.
double erm_via_elicitation(const FiniteDistribution& dist, double beta);

/**
 * Discretized risk levels B(beta0, delta) for reducing EVaR to a finite
 * number of ERM problems. Built by
 *   beta_{k+1} = beta_k log(1/alpha) / (log(1/alpha) - beta_k delta)
 * until the first member reaches log(1/alpha)/delta.
 */
struct BetaGrid {
    numvec betas;
    double alpha;
    double delta;
    int K() const { return int(betas.size()) - 1; }
};

BetaGrid beta_grid(double beta0, double delta, double alpha);

/// Risk level that keeps the expectation-to-ERM gap below delta on a random
/// variable with the given range: 8 delta / (x_max - x_min)^2.
double hoeffding_beta0(double delta, double x_min, double x_max);

} // namespace riskmdp
