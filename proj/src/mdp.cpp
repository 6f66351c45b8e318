#include "riskmdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace riskmdp {

double TransientMdp::reward_sup_norm() const {
    double m = 0.0;
    for (int s = 0; s < n_states; s++)
        for (int a : admissible[s])
            for (const auto& t : transitions[s][a]) m = std::max(m, std::fabs(t.reward));
    return m;
}

StationaryPolicy StationaryPolicy::uniform_random(const TransientMdp& mdp) {
    StationaryPolicy p;
    p.probs.resize(mdp.n_states, numvec(mdp.n_actions, 0.0));
    for (int s = 0; s < mdp.n_states; s++) {
        double u = 1.0 / double(mdp.admissible[s].size());
        for (int a : mdp.admissible[s]) p.probs[s][a] = u;
    }
    return p;
}

namespace {

std::string state_loc(int s) { return "state " + std::to_string(s); }

std::string sa_loc(int s, int a) {
    return "state " + std::to_string(s) + ", action " + std::to_string(a);
}

} // namespace

ValidationReport validate(const TransientMdp& mdp) {
    ValidationReport rep;
    auto err = [&](const std::string& code, const std::string& msg, const std::string& loc) {
        rep.findings.push_back({Severity::Error, code, msg, loc});
    };
    auto warn = [&](const std::string& code, const std::string& msg, const std::string& loc) {
        rep.findings.push_back({Severity::Warning, code, msg, loc});
    };

    if (mdp.n_states < 1 || mdp.sink < 0 || mdp.sink >= mdp.n_states) {
        err("bad_shape", "model must have at least one state and a valid sink index", "model");
        return rep;
    }

    for (int s = 0; s < mdp.n_states; s++) {
        if (mdp.admissible[s].empty())
            err("no_actions", "state has no admissible action", state_loc(s));
        for (int a : mdp.admissible[s]) {
            double sum = 0.0;
            for (const auto& t : mdp.transitions[s][a]) {
                if (t.prob < 0.0 || t.prob > 1.0)
                    err("probability_out_of_range",
                        "probability " + std::to_string(t.prob) + " out of [0,1]", sa_loc(s, a));
                if (!std::isfinite(t.reward))
                    err("reward_not_finite", "reward is not finite", sa_loc(s, a));
                sum += t.prob;
            }
            if (std::fabs(sum - 1.0) > PROB_TOL)
                err("row_not_stochastic",
                    "transition probabilities sum to " + std::to_string(sum), sa_loc(s, a));
        }
    }

    // sink absorption with zero reward
    for (int a : mdp.admissible[mdp.sink]) {
        const auto& row = mdp.transitions[mdp.sink][a];
        bool self_loop = row.size() == 1 && row[0].to == mdp.sink &&
                         std::fabs(row[0].prob - 1.0) <= PROB_TOL;
        if (!self_loop)
            err("sink_not_absorbing", "sink state must loop to itself with probability 1",
                sa_loc(mdp.sink, a));
        for (const auto& t : row)
            if (t.reward != 0.0)
                err("sink_reward_nonzero", "sink reward nonzero", sa_loc(mdp.sink, a));
    }

    // initial distribution
    if (int(mdp.initial_dist.size()) != mdp.n_states) {
        err("bad_initial", "initial distribution has wrong length", "initial");
    } else {
        double sum = 0.0;
        for (int s = 0; s < mdp.n_states; s++) {
            double p = mdp.initial_dist[s];
            if (p < 0.0 || p > 1.0)
                err("initial_out_of_range", "initial probability out of [0,1]", state_loc(s));
            sum += p;
        }
        if (std::fabs(sum - 1.0) > PROB_TOL)
            err("initial_not_normalized",
                "initial distribution sums to " + std::to_string(sum), "initial");
        if (mdp.initial_dist[mdp.sink] != 0.0)
            err("initial_mass_on_sink", "initial distribution places mass on the sink",
                state_loc(mdp.sink));
        for (int s = 0; s < mdp.n_states; s++)
            if (s != mdp.sink && mdp.initial_dist[s] <= 0.0)
                warn("initial_not_strictly_positive",
                     "initial distribution not strictly positive", state_loc(s));
    }

    return rep;
}

PolicyMatrices policy_matrices(const TransientMdp& mdp, const StationaryPolicy& d) {
    const int n = mdp.n_nonsink();
    PolicyMatrices pm;
    pm.P.assign(n, numvec(n, 0.0));
    pm.p_term.assign(n, 0.0);

    for (int s = 0; s < mdp.n_states; s++) {
        if (s == mdp.sink) continue;
        int i = mdp.nonsink_index(s);
        for (int a = 0; a < mdp.n_actions; a++) {
            double da = d.prob(s, a);
            if (da == 0.0) continue;
            if (!mdp.is_admissible(s, a))
                throw model_error("policy uses inadmissible action " + std::to_string(a) +
                                  " in state " + std::to_string(s));
            for (const auto& t : mdp.transitions[s][a]) {
                if (t.to == mdp.sink)
                    pm.p_term[i] += da * t.prob;
                else
                    pm.P[i][mdp.nonsink_index(t.to)] += da * t.prob;
            }
        }
    }
    return pm;
}

numvec expected_trc_values(const TransientMdp& mdp, const StationaryPolicy& d) {
    const int n = mdp.n_nonsink();
    // expected immediate reward per non-sink state (includes rewards on sink transitions)
    numvec r(n, 0.0);
    for (int s = 0; s < mdp.n_states; s++) {
        if (s == mdp.sink) continue;
        int i = mdp.nonsink_index(s);
        for (int a = 0; a < mdp.n_actions; a++) {
            double da = d.prob(s, a);
            if (da == 0.0) continue;
            for (const auto& t : mdp.transitions[s][a]) r[i] += da * t.prob * t.reward;
        }
    }
    PolicyMatrices pm = policy_matrices(mdp, d);

    // v = r + P v; fixed-point iteration, geometric under transience
    numvec v(n, 0.0), v2(n, 0.0);
    for (long it = 0; it < 1000000; it++) {
        double resid = 0.0;
        for (int i = 0; i < n; i++) {
            double x = r[i];
            const numvec& row = pm.P[i];
            for (int j = 0; j < n; j++) x += row[j] * v[j];
            v2[i] = x;
            resid = std::max(resid, std::fabs(x - v[i]));
        }
        v.swap(v2);
        if (resid <= 1e-13 * std::max(1.0, std::fabs(v[0]))) break;
    }
    return v;
}

RiskNeutralSolution solve_risk_neutral(const TransientMdp& mdp, double tol, long max_iter) {
    const int n = mdp.n_nonsink();
    numvec v(n, 0.0), v2(n, 0.0);
    indvec greedy(mdp.n_states, 0);
    for (int s = 0; s < mdp.n_states; s++) greedy[s] = mdp.admissible[s].front();

    for (long it = 0; it < max_iter; it++) {
        double resid = 0.0;
        for (int s = 0; s < mdp.n_states; s++) {
            if (s == mdp.sink) continue;
            int i = mdp.nonsink_index(s);
            double best = NEG_INF;
            int best_a = mdp.admissible[s].front();
            for (int a : mdp.admissible[s]) {
                double q = 0.0;
                for (const auto& t : mdp.transitions[s][a]) {
                    q += t.prob * t.reward;
                    if (t.to != mdp.sink) q += t.prob * v[mdp.nonsink_index(t.to)];
                }
                if (q > best) {
                    best = q;
                    best_a = a;
                }
            }
            v2[i] = best;
            greedy[s] = best_a;
            resid = std::max(resid, std::fabs(best - v[i]));
        }
        v.swap(v2);
        if (resid <= tol) break;
    }

    RiskNeutralSolution sol;
    sol.values = v;
    sol.policy = StationaryPolicy::deterministic(greedy);
    for (int s = 0; s < mdp.n_states; s++)
        if (s != mdp.sink) sol.value_mu += mdp.initial_dist[s] * v[mdp.nonsink_index(s)];
    return sol;
}

} // namespace riskmdp
