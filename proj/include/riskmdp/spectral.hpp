#pragma once

#include <optional>
#include <vector>

#include "riskmdp/mdp.hpp"

namespace riskmdp {

/**
 * Spectral radius of a nonnegative square matrix by shifted power iteration.
 * The iteration runs on M + sigma*I, which has the same Perron vector and a
 * radius of exactly rho(M) + sigma, so the shift removes oscillation on
 * periodic matrices without biasing the result. Falls back to the Gershgorin
 * row-sum upper bound if 1e5 sweeps do not converge.
 *
 * Throws model_error on NaN or negative entries.
 */
double spectral_radius(const std::vector<numvec>& M);

/// log(rho) of the matrix with entries exp(log_entries[i][j]); entries with
/// -inf are structural zeros. Safe for magnitudes far outside double range.
double log_spectral_radius(const std::vector<numvec>& log_entries);

struct TransienceReport {
    bool transient = false;
    double worst_rho = 0.0;
    std::optional<indvec> violating_policy;
    long policies_checked = 0;
};

/// Certificate rho(P^d) < 1 - 1e-12 for one stationary policy.
TransienceReport check_transient(const TransientMdp& mdp, const StationaryPolicy& d);

/**
 * Enumerates every deterministic policy and reports the worst spectral radius
 * and a violating policy if one exists. Refuses models with more than 1e6
 * deterministic policies; per-policy certificates remain available above
 * that cap.
 */
TransienceReport check_transient_exhaustive(const TransientMdp& mdp,
                                            long policy_cap = 1000000);

} // namespace riskmdp
