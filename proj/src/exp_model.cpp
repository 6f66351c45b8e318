#include "riskmdp/exp_model.hpp"

#include <cmath>

#include "riskmdp/spectral.hpp"

namespace riskmdp {

ExpModel exp_model(const TransientMdp& mdp, double beta) {
    if (!(beta > 0.0)) throw model_error("beta must be positive");
    const int n = mdp.n_nonsink();
    ExpModel m;
    m.beta = beta;
    m.n = n;
    m.B.assign(mdp.n_actions, std::vector<numvec>(n, numvec(n, 0.0)));
    m.b.assign(mdp.n_actions, numvec(n, 0.0));
    m.admissible.assign(n, {});

    for (int s = 0; s < mdp.n_states; s++) {
        if (s == mdp.sink) continue;
        int i = mdp.nonsink_index(s);
        m.admissible[i] = mdp.admissible[s];
        for (int a : mdp.admissible[s]) {
            for (const auto& t : mdp.transitions[s][a]) {
                double coef = t.prob * std::exp(-beta * t.reward);
                if (!std::isfinite(coef))
                    throw model_error("risk level too large for reward scale");
                if (t.to == mdp.sink)
                    m.b[a][i] += coef;
                else
                    m.B[a][i][mdp.nonsink_index(t.to)] += coef;
            }
        }
    }
    return m;
}

std::pair<numvec, indvec> exp_bellman(const ExpModel& model, const numvec& w) {
    const int n = model.n;
    numvec out(n, 0.0);
    indvec greedy(n, 0);
#pragma omp parallel for schedule(static) if (n > 64)
    for (int s = 0; s < n; s++) {
        double best = NEG_INF;
        int best_a = model.admissible[s].front();
        for (int a : model.admissible[s]) {
            double acc = -model.b[a][s];
            const numvec& row = model.B[a][s];
            for (int j = 0; j < n; j++) acc += row[j] * w[j];
            if (acc > best) {
                best = acc;
                best_a = a;
            }
        }
        out[s] = best;
        greedy[s] = best_a;
    }
    return {std::move(out), std::move(greedy)};
}

std::pair<std::vector<numvec>, numvec> policy_exp_matrices(const ExpModel& model,
                                                           const TransientMdp& mdp,
                                                           const StationaryPolicy& d) {
    const int n = model.n;
    std::vector<numvec> B(n, numvec(n, 0.0));
    numvec b(n, 0.0);
    for (int s = 0; s < mdp.n_states; s++) {
        if (s == mdp.sink) continue;
        int i = mdp.nonsink_index(s);
        for (int a = 0; a < mdp.n_actions; a++) {
            double da = d.prob(s, a);
            if (da == 0.0) continue;
            if (!mdp.is_admissible(s, a))
                throw model_error("policy uses inadmissible action");
            for (int j = 0; j < n; j++) B[i][j] += da * model.B[a][i][j];
            b[i] += da * model.b[a][i];
        }
    }
    return {std::move(B), std::move(b)};
}

LogExpModel log_exp_model(const TransientMdp& mdp, double beta) {
    if (!(beta > 0.0)) throw model_error("beta must be positive");
    const int n = mdp.n_nonsink();
    LogExpModel m;
    m.beta = beta;
    m.n = n;
    m.rows.assign(n, {});
    m.admissible.assign(n, {});
    for (int s = 0; s < mdp.n_states; s++) {
        if (s == mdp.sink) continue;
        int i = mdp.nonsink_index(s);
        m.admissible[i] = mdp.admissible[s];
        m.rows[i].resize(mdp.admissible[s].size());
        for (size_t k = 0; k < mdp.admissible[s].size(); k++) {
            int a = mdp.admissible[s][k];
            for (const auto& t : mdp.transitions[s][a]) {
                if (t.prob == 0.0) continue;
                double lc = std::log(t.prob) - beta * t.reward;
                int to = t.to == mdp.sink ? -1 : mdp.nonsink_index(t.to);
                m.rows[i][k].push_back({to, lc});
            }
        }
    }
    return m;
}

double policy_log_radius(const LogExpModel& model, const indvec& greedy_rows) {
    const int n = model.n;
    std::vector<numvec> logB(n, numvec(n, NEG_INF));
    for (int i = 0; i < n; i++) {
        // locate the slot of the greedy action
        size_t slot = 0;
        while (slot < model.admissible[i].size() && model.admissible[i][slot] != greedy_rows[i])
            slot++;
        if (slot == model.admissible[i].size())
            throw model_error("greedy action not admissible");
        for (const auto& e : model.rows[i][slot]) {
            if (e.to < 0) continue;
            double& cell = logB[i][e.to];
            if (cell == NEG_INF)
                cell = e.log_coef;
            else {
                double m = std::max(cell, e.log_coef);
                cell = m + std::log(std::exp(cell - m) + std::exp(e.log_coef - m));
            }
        }
    }
    return log_spectral_radius(logB);
}

} // namespace riskmdp
