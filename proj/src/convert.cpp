#include "riskmdp/convert.hpp"

#include <cmath>

#include "riskmdp/mdp_io.hpp"

namespace riskmdp {

TransientMdp discounted_to_transient(const DiscountedMdp& mdp, double gamma, RewardMode mode) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw model_error("gamma must be in (0,1), got " + std::to_string(gamma));

    TransientMdp out;
    out.n_states = mdp.n_states + 1;
    out.n_actions = mdp.n_actions;
    out.sink = mdp.n_states;
    out.transitions.assign(out.n_states, std::vector<std::vector<Transition>>(out.n_actions));
    out.admissible.assign(out.n_states, {});

    for (int s = 0; s < mdp.n_states; s++) {
        out.admissible[s] = mdp.admissible[s];
        for (int a : mdp.admissible[s]) {
            double row_sum = 0.0;
            double expected_r = 0.0;
            for (const auto& t : mdp.transitions[s][a]) {
                row_sum += t.prob;
                expected_r += t.prob * t.reward;
                double r = mode == RewardMode::StateAction ? t.reward : t.reward / gamma;
                out.transitions[s][a].push_back({t.to, gamma * t.prob, r});
            }
            if (std::fabs(row_sum - 1.0) > PROB_TOL)
                throw model_error("input row (" + std::to_string(s) + "," + std::to_string(a) +
                                  ") is not stochastic");
            double sink_r = mode == RewardMode::StateAction ? expected_r : 0.0;
            out.transitions[s][a].push_back({out.sink, 1.0 - gamma, sink_r});
        }
    }
    out.admissible[out.sink] = {0};
    out.transitions[out.sink][0].push_back({out.sink, 1.0, 0.0});

    out.initial_dist.assign(out.n_states, 0.0);
    for (int s = 0; s < mdp.n_states; s++) out.initial_dist[s] = mdp.initial_dist[s];
    return out;
}

numvec discounted_values(const DiscountedMdp& mdp, const StationaryPolicy& d, double gamma) {
    const int n = mdp.n_states;
    numvec r(n, 0.0);
    std::vector<numvec> P(n, numvec(n, 0.0));
    for (int s = 0; s < n; s++) {
        for (int a = 0; a < mdp.n_actions; a++) {
            double da = d.prob(s, a);
            if (da == 0.0) continue;
            for (const auto& t : mdp.transitions[s][a]) {
                r[s] += da * t.prob * t.reward;
                P[s][t.to] += da * t.prob;
            }
        }
    }
    numvec v(n, 0.0), v2(n, 0.0);
    for (long it = 0; it < 1000000; it++) {
        double resid = 0.0;
        for (int i = 0; i < n; i++) {
            double x = r[i];
            for (int j = 0; j < n; j++) x += gamma * P[i][j] * v[j];
            v2[i] = x;
            resid = std::max(resid, std::fabs(x - v[i]));
        }
        v.swap(v2);
        if (resid <= 1e-14 * std::max(1.0, std::fabs(v[0])) + 1e-15) break;
    }
    return v;
}

} // namespace riskmdp
