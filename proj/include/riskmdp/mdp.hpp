#pragma once

#include <string>
#include <vector>

#include "riskmdp/types.hpp"

namespace riskmdp {

/// One sparse transition entry of a (state, action) pair.
struct Transition {
    int to;
    double prob;
    double reward;
};

/**
 * Finite MDP with a designated absorbing sink state. The sink must satisfy
 * p(e,a,e) = 1 and r(e,a,e) = 0 for every admissible action, and the initial
 * distribution must place no mass on it. Immutable after construction; all
 * operations on it are pure.
 */
struct TransientMdp {
    int n_states = 0;  // includes the sink
    int n_actions = 0;
    int sink = -1;
    /// transitions[s][a] is the sparse row for (s, a); empty for inadmissible a
    std::vector<std::vector<std::vector<Transition>>> transitions;
    /// admissible[s] lists allowed action ids in increasing order
    std::vector<indvec> admissible;
    numvec initial_dist;

    int n_nonsink() const { return n_states - 1; }

    /// Index of state s among non-sink states (states are compacted around the sink).
    int nonsink_index(int s) const { return s < sink ? s : s - 1; }
    int nonsink_state(int idx) const { return idx < sink ? idx : idx + 1; }

    const std::vector<Transition>& row(int s, int a) const { return transitions[s][a]; }

    bool is_admissible(int s, int a) const {
        for (int b : admissible[s])
            if (b == a) return true;
        return false;
    }

    /// Largest |r(s,a,s')| over all stored transitions.
    double reward_sup_norm() const;
};

/// Stationary decision rule; deterministic (one action per state) or randomized.
struct StationaryPolicy {
    indvec actions;                 // deterministic: action per state
    std::vector<numvec> probs;      // randomized: distribution over actions per state

    bool randomized() const { return !probs.empty(); }

    static StationaryPolicy deterministic(indvec acts) {
        StationaryPolicy p;
        p.actions = std::move(acts);
        return p;
    }
    static StationaryPolicy uniform_random(const TransientMdp& mdp);

    /// Probability of action a in state s.
    double prob(int s, int a) const {
        if (!randomized()) return actions[s] == a ? 1.0 : 0.0;
        return probs[s][a];
    }
};

/// Policy-induced transition matrix over non-sink states plus the
/// per-state termination probabilities, p^d = (I - P^d) 1.
struct PolicyMatrices {
    std::vector<numvec> P;  // n_nonsink x n_nonsink, row-substochastic
    numvec p_term;          // termination probability per non-sink state
};

enum class Severity { Error, Warning };

struct ValidationFinding {
    Severity severity;
    std::string code;
    std::string message;
    std::string location;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;

    bool ok() const {
        for (const auto& f : findings)
            if (f.severity == Severity::Error) return false;
        return true;
    }
    int n_errors() const {
        int n = 0;
        for (const auto& f : findings) n += f.severity == Severity::Error;
        return n;
    }
    int n_warnings() const { return int(findings.size()) - n_errors(); }
};

/**
 * Checks row stochasticity, sink absorption with zero reward, mu(e) = 0 and
 * that mu sums to one. A non-sink state with zero initial probability is
 * reported as a warning, not an error. Does not certify transience; see
 * check_transient for the spectral-radius certificate.
 */
ValidationReport validate(const TransientMdp& mdp);

/// Builds P^d and the termination vector for a policy. Throws model_error if
/// the policy uses an inadmissible action.
PolicyMatrices policy_matrices(const TransientMdp& mdp, const StationaryPolicy& d);

/// Expected total reward of each state under a fixed policy (beta = 0 values).
numvec expected_trc_values(const TransientMdp& mdp, const StationaryPolicy& d);

/// Risk-neutral optimal values and greedy policy for the TRC objective.
struct RiskNeutralSolution {
    numvec values;  // per non-sink state
    StationaryPolicy policy;
    double value_mu = 0.0;
};
RiskNeutralSolution solve_risk_neutral(const TransientMdp& mdp, double tol = 1e-12,
                                       long max_iter = 1000000);

} // namespace riskmdp
