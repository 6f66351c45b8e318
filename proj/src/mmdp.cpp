#include "riskmdp/mmdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "riskmdp/convert.hpp"

namespace riskmdp {

Mmdp Mmdp::stationary_rewards(int horizon, numvec lambda, numvec mu,
                              std::vector<std::vector<std::vector<numvec>>> p,
                              std::vector<std::vector<numvec>> r_sa) {
    Mmdp m;
    m.horizon = horizon;
    m.n_models = int(p.size());
    m.n_states = int(p[0].size());
    m.n_actions = int(p[0][0].size());
    m.p = std::move(p);
    m.lambda = std::move(lambda);
    m.mu = std::move(mu);
    m.r.resize(m.n_models);
    for (int mm = 0; mm < m.n_models; mm++)
        m.r[mm].assign(horizon, r_sa[mm]);
    m.check();
    return m;
}

void Mmdp::check() const {
    if (horizon < 1) throw model_error("horizon must be at least 1");
    if (n_models < 1 || int(p.size()) != n_models || int(r.size()) != n_models)
        throw model_error("model count mismatch");
    double lsum = 0.0;
    for (double l : lambda) {
        if (!(l > 0.0 && l < 1.0) && lambda.size() > 1)
            throw model_error("model weights must lie in (0,1)");
        lsum += l;
    }
    if (std::fabs(lsum - 1.0) > PROB_TOL) throw model_error("model weights must sum to 1");
    double msum = 0.0;
    for (double x : mu) msum += x;
    if (std::fabs(msum - 1.0) > PROB_TOL)
        throw model_error("initial distribution must sum to 1");
    for (int m = 0; m < n_models; m++)
        for (int s = 0; s < n_states; s++)
            for (int a = 0; a < n_actions; a++) {
                double sum = 0.0;
                for (double x : p[m][s][a]) sum += x;
                if (std::fabs(sum - 1.0) > PROB_TOL)
                    throw model_error("transition row (" + std::to_string(m) + "," +
                                      std::to_string(s) + "," + std::to_string(a) +
                                      ") is not stochastic");
            }
}

RandomizedMarkovPolicy RandomizedMarkovPolicy::from(const MarkovPolicy& pi, int n_actions) {
    RandomizedMarkovPolicy out;
    out.probs.resize(pi.horizon());
    for (int t = 0; t < pi.horizon(); t++) {
        out.probs[t].assign(pi.actions[t].size(), numvec(n_actions, 0.0));
        for (size_t s = 0; s < pi.actions[t].size(); s++)
            out.probs[t][s][pi.actions[t][s]] = 1.0;
    }
    return out;
}

RandomizedMarkovPolicy RandomizedMarkovPolicy::uniform(const Mmdp& mmdp) {
    RandomizedMarkovPolicy out;
    out.probs.assign(mmdp.horizon,
                     std::vector<numvec>(mmdp.n_states,
                                         numvec(mmdp.n_actions, 1.0 / mmdp.n_actions)));
    return out;
}

namespace {

// backward induction of v[t][m][s] for a generic action-probability lookup
template <typename ActionProb>
std::vector<std::vector<numvec>> values_backward(const Mmdp& mmdp, ActionProb prob) {
    const int T = mmdp.horizon, M = mmdp.n_models, S = mmdp.n_states, A = mmdp.n_actions;
    std::vector<std::vector<numvec>> v(T + 1, std::vector<numvec>(M, numvec(S, 0.0)));
    for (int t = T - 1; t >= 0; t--) {
#pragma omp parallel for schedule(static) if (M > 1)
        for (int m = 0; m < M; m++) {
            for (int s = 0; s < S; s++) {
                double acc = 0.0;
                for (int a = 0; a < A; a++) {
                    double pa = prob(t, s, a);
                    if (pa == 0.0) continue;
                    double q = mmdp.r[m][t][s][a];
                    const numvec& row = mmdp.p[m][s][a];
                    const numvec& vn = v[t + 1][m];
                    for (int s2 = 0; s2 < S; s2++) q += row[s2] * vn[s2];
                    acc += pa * q;
                }
                v[t][m][s] = acc;
            }
        }
    }
    return v;
}

template <typename ActionProb>
double return_from_values(const Mmdp& mmdp, const std::vector<std::vector<numvec>>& v) {
    double rho = 0.0;
    for (int m = 0; m < mmdp.n_models; m++) {
        double vm = 0.0;
        for (int s = 0; s < mmdp.n_states; s++) vm += mmdp.mu[s] * v[0][m][s];
        rho += mmdp.lambda[m] * vm;
    }
    return rho;
}

template <typename ActionProb>
WeightTable weights_forward(const Mmdp& mmdp, ActionProb prob) {
    const int T = mmdp.horizon, M = mmdp.n_models, S = mmdp.n_states, A = mmdp.n_actions;
    WeightTable wt;
    wt.b.assign(T, std::vector<numvec>(M, numvec(S, 0.0)));
    for (int m = 0; m < M; m++)
        for (int s = 0; s < S; s++) wt.b[0][m][s] = mmdp.lambda[m] * mmdp.mu[s];
    for (int t = 0; t + 1 < T; t++) {
#pragma omp parallel for schedule(static) if (M > 1)
        for (int m = 0; m < M; m++) {
            for (int s = 0; s < S; s++) {
                double mass = wt.b[t][m][s];
                if (mass == 0.0) continue;
                for (int a = 0; a < A; a++) {
                    double pa = prob(t, s, a);
                    if (pa == 0.0) continue;
                    const numvec& row = mmdp.p[m][s][a];
                    for (int s2 = 0; s2 < S; s2++)
                        wt.b[t + 1][m][s2] += mass * pa * row[s2];
                }
            }
        }
    }
    return wt;
}

template <typename ActionProb>
QTensor q_backward(const Mmdp& mmdp, ActionProb prob) {
    const int T = mmdp.horizon, M = mmdp.n_models, S = mmdp.n_states, A = mmdp.n_actions;
    QTensor out;
    out.v.assign(T + 1, std::vector<numvec>(M, numvec(S, 0.0)));
    out.q.assign(T, std::vector<std::vector<numvec>>(M, std::vector<numvec>(S, numvec(A, 0.0))));
    for (int t = T - 1; t >= 0; t--) {
#pragma omp parallel for schedule(static) if (M > 1)
        for (int m = 0; m < M; m++) {
            for (int s = 0; s < S; s++) {
                double vacc = 0.0;
                for (int a = 0; a < A; a++) {
                    double q = mmdp.r[m][t][s][a];
                    const numvec& row = mmdp.p[m][s][a];
                    const numvec& vn = out.v[t + 1][m];
                    for (int s2 = 0; s2 < S; s2++) q += row[s2] * vn[s2];
                    out.q[t][m][s][a] = q;
                    vacc += prob(t, s, a) * q;
                }
                out.v[t][m][s] = vacc;
            }
        }
    }
    return out;
}

void check_horizon(const Mmdp& mmdp, int pi_horizon) {
    if (pi_horizon != mmdp.horizon)
        throw model_error("policy horizon " + std::to_string(pi_horizon) +
                          " does not match MMDP horizon " + std::to_string(mmdp.horizon));
}

} // namespace

double mmdp_return(const Mmdp& mmdp, const MarkovPolicy& pi) {
    check_horizon(mmdp, pi.horizon());
    auto prob = [&](int t, int s, int a) { return pi.actions[t][s] == a ? 1.0 : 0.0; };
    auto v = values_backward(mmdp, prob);
    return return_from_values<decltype(prob)>(mmdp, v);
}

double mmdp_return(const Mmdp& mmdp, const RandomizedMarkovPolicy& pi) {
    check_horizon(mmdp, pi.horizon());
    auto prob = [&](int t, int s, int a) { return pi.probs[t][s][a]; };
    auto v = values_backward(mmdp, prob);
    return return_from_values<decltype(prob)>(mmdp, v);
}

WeightTable model_weights(const Mmdp& mmdp, const MarkovPolicy& pi) {
    check_horizon(mmdp, pi.horizon());
    auto prob = [&](int t, int s, int a) { return pi.actions[t][s] == a ? 1.0 : 0.0; };
    return weights_forward(mmdp, prob);
}

WeightTable model_weights(const Mmdp& mmdp, const RandomizedMarkovPolicy& pi) {
    check_horizon(mmdp, pi.horizon());
    auto prob = [&](int t, int s, int a) { return pi.probs[t][s][a]; };
    return weights_forward(mmdp, prob);
}

QTensor q_values(const Mmdp& mmdp, const MarkovPolicy& pi) {
    check_horizon(mmdp, pi.horizon());
    auto prob = [&](int t, int s, int a) { return pi.actions[t][s] == a ? 1.0 : 0.0; };
    return q_backward(mmdp, prob);
}

QTensor q_values(const Mmdp& mmdp, const RandomizedMarkovPolicy& pi) {
    check_horizon(mmdp, pi.horizon());
    auto prob = [&](int t, int s, int a) { return pi.probs[t][s][a]; };
    return q_backward(mmdp, prob);
}

std::vector<std::vector<numvec>> policy_gradient(const Mmdp& mmdp,
                                                 const RandomizedMarkovPolicy& pi) {
    check_horizon(mmdp, pi.horizon());
    WeightTable wt = model_weights(mmdp, pi);
    QTensor qt = q_values(mmdp, pi);
    std::vector<std::vector<numvec>> grad(
        mmdp.horizon, std::vector<numvec>(mmdp.n_states, numvec(mmdp.n_actions, 0.0)));
    for (int t = 0; t < mmdp.horizon; t++)
        for (int s = 0; s < mmdp.n_states; s++)
            for (int a = 0; a < mmdp.n_actions; a++) {
                double g = 0.0;
                for (int m = 0; m < mmdp.n_models; m++)
                    g += wt.b[t][m][s] * qt.q[t][m][s][a];
                grad[t][s][a] = g;
            }
    return grad;
}

MarkovPolicy mvp_solve(const Mmdp& mmdp) {
    const int T = mmdp.horizon, M = mmdp.n_models, S = mmdp.n_states, A = mmdp.n_actions;
    MarkovPolicy pi;
    pi.actions.assign(T, indvec(S, 0));
    std::vector<numvec> v(T + 1, numvec(S, 0.0));
    for (int t = T - 1; t >= 0; t--) {
        for (int s = 0; s < S; s++) {
            double best = NEG_INF;
            int best_a = 0;
            for (int a = 0; a < A; a++) {
                double q = 0.0;
                for (int m = 0; m < M; m++) {
                    double qm = mmdp.r[m][t][s][a];
                    const numvec& row = mmdp.p[m][s][a];
                    for (int s2 = 0; s2 < S; s2++) qm += row[s2] * v[t + 1][s2];
                    q += mmdp.lambda[m] * qm;
                }
                if (q > best) {
                    best = q;
                    best_a = a;
                }
            }
            v[t][s] = best;
            pi.actions[t][s] = best_a;
        }
    }
    return pi;
}

MarkovPolicy wsu_solve(const Mmdp& mmdp) {
    const int T = mmdp.horizon, M = mmdp.n_models, S = mmdp.n_states, A = mmdp.n_actions;
    MarkovPolicy pi;
    pi.actions.assign(T, indvec(S, 0));
    std::vector<std::vector<numvec>> v(T + 1, std::vector<numvec>(M, numvec(S, 0.0)));
    std::vector<std::vector<numvec>> q(M, std::vector<numvec>(S, numvec(A, 0.0)));
    for (int t = T - 1; t >= 0; t--) {
        for (int m = 0; m < M; m++)
            for (int s = 0; s < S; s++)
                for (int a = 0; a < A; a++) {
                    double qm = mmdp.r[m][t][s][a];
                    const numvec& row = mmdp.p[m][s][a];
                    for (int s2 = 0; s2 < S; s2++) qm += row[s2] * v[t + 1][m][s2];
                    q[m][s][a] = qm;
                }
        for (int s = 0; s < S; s++) {
            double best = NEG_INF;
            int best_a = 0;
            for (int a = 0; a < A; a++) {
                double acc = 0.0;
                for (int m = 0; m < M; m++) acc += mmdp.lambda[m] * q[m][s][a];
                if (acc > best) {
                    best = acc;
                    best_a = a;
                }
            }
            pi.actions[t][s] = best_a;
            for (int m = 0; m < M; m++) v[t][m][s] = q[m][s][best_a];
        }
    }
    return pi;
}

MarkovPolicy optimize_policy(const Mmdp& mmdp, const WeightTable& weights,
                             const MarkovPolicy& prev) {
    check_horizon(mmdp, prev.horizon());
    const int T = mmdp.horizon, M = mmdp.n_models, S = mmdp.n_states, A = mmdp.n_actions;
    MarkovPolicy next = prev;
    std::vector<std::vector<numvec>> v(T + 1, std::vector<numvec>(M, numvec(S, 0.0)));
    std::vector<std::vector<numvec>> q(M, std::vector<numvec>(S, numvec(A, 0.0)));
    for (int t = T - 1; t >= 0; t--) {
        for (int m = 0; m < M; m++)
            for (int s = 0; s < S; s++)
                for (int a = 0; a < A; a++) {
                    double qm = mmdp.r[m][t][s][a];
                    const numvec& row = mmdp.p[m][s][a];
                    for (int s2 = 0; s2 < S; s2++) qm += row[s2] * v[t + 1][m][s2];
                    q[m][s][a] = qm;
                }
        for (int s = 0; s < S; s++) {
            double best = NEG_INF;
            int best_a = 0;
            for (int a = 0; a < A; a++) {
                double acc = 0.0;
                for (int m = 0; m < M; m++) acc += weights.b[t][m][s] * q[m][s][a];
                if (acc > best) {
                    best = acc;
                    best_a = a;
                }
            }
            next.actions[t][s] = best_a;
            for (int m = 0; m < M; m++) v[t][m][s] = q[m][s][best_a];
        }
    }
    return next;
}

CadpResult cadp_solve(const Mmdp& mmdp, std::optional<MarkovPolicy> pi0, long max_iterations) {
    CadpResult res;
    MarkovPolicy current = pi0 ? std::move(*pi0) : wsu_solve(mmdp);
    double rho = mmdp_return(mmdp, current);
    res.returns.push_back(rho);
    for (long n = 0; n < max_iterations; n++) {
        WeightTable wt = model_weights(mmdp, current);
        MarkovPolicy next = optimize_policy(mmdp, wt, current);
        double rho_next = mmdp_return(mmdp, next);
        res.returns.push_back(rho_next);
        res.iterations = n + 1;
        bool improved = rho_next - rho > 1e-12;
        current = std::move(next);
        rho = rho_next;
        if (!improved) {
            res.policy = std::move(current);
            return res;
        }
    }
    throw model_error("CADP exceeded the iteration cap");
}

Mmdp apply_discount(const Mmdp& mmdp, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw model_error("gamma must be in (0,1]");
    Mmdp out = mmdp;
    double factor = 1.0;
    for (int t = 0; t < out.horizon; t++) {
        if (t > 0) factor *= gamma;
        for (int m = 0; m < out.n_models; m++)
            for (int s = 0; s < out.n_states; s++)
                for (int a = 0; a < out.n_actions; a++) out.r[m][t][s][a] = factor * mmdp.r[m][t][s][a];
    }
    return out;
}

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

void save_mmdp_dir(const Mmdp& mmdp, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (int m = 0; m < mmdp.n_models; m++) {
        std::ofstream out(dir + "/model_" + std::to_string(m) + ".csv");
        if (!out) throw model_error("cannot write model csv in '" + dir + "'");
        out << "idstatefrom,idaction,idstateto,probability,reward\n";
        for (int s = 0; s < mmdp.n_states; s++)
            for (int a = 0; a < mmdp.n_actions; a++)
                for (int s2 = 0; s2 < mmdp.n_states; s2++) {
                    double p = mmdp.p[m][s][a][s2];
                    if (p == 0.0) continue;
                    out << s << ',' << a << ',' << s2 << ',' << fmt17(p) << ','
                        << fmt17(mmdp.r[m][0][s][a]) << "\n";
                }
    }
    std::ofstream w(dir + "/weights.csv");
    w << "idmodel,weight\n";
    for (int m = 0; m < mmdp.n_models; m++) w << m << ',' << fmt17(mmdp.lambda[m]) << "\n";
    std::ofstream init(dir + "/initial.csv");
    init << "idstate,probability\n";
    for (int s = 0; s < mmdp.n_states; s++)
        if (mmdp.mu[s] != 0.0) init << s << ',' << fmt17(mmdp.mu[s]) << "\n";
    std::ofstream meta(dir + "/meta.txt");
    meta << "T=" << mmdp.horizon << "\n";
    meta << "gamma=1\n";
}

Mmdp load_mmdp_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    int T = 0;
    double gamma = 1.0;
    {
        std::ifstream meta(dir + "/meta.txt");
        if (!meta) throw model_error("cannot open '" + dir + "/meta.txt'");
        std::string line;
        while (std::getline(meta, line)) {
            if (line.rfind("T=", 0) == 0) T = std::atoi(line.c_str() + 2);
            if (line.rfind("gamma=", 0) == 0) gamma = std::atof(line.c_str() + 6);
        }
    }
    if (T < 1) throw model_error("meta.txt must define T >= 1");

    std::vector<std::vector<std::vector<numvec>>> p;
    std::vector<std::vector<numvec>> r_sa;
    int S = 0, A = 0;
    for (int m = 0;; m++) {
        std::string path = dir + "/model_" + std::to_string(m) + ".csv";
        if (!fs::exists(path)) break;
        DiscountedMdp* unused = nullptr;
        (void)unused;
        // parse through the shared csv loader
        auto parsed = load_discounted_csv(path);
        if (m == 0) {
            S = parsed.n_states;
            A = parsed.n_actions;
        } else if (parsed.n_states != S || parsed.n_actions != A) {
            throw model_error("model files disagree on the state or action space");
        }
        std::vector<std::vector<numvec>> pm(S, std::vector<numvec>(A, numvec(S, 0.0)));
        std::vector<numvec> rm(S, numvec(A, 0.0));
        for (int s = 0; s < S; s++)
            for (int a = 0; a < A; a++)
                for (const auto& t : parsed.transitions[s][a]) {
                    pm[s][a][t.to] += t.prob;
                    rm[s][a] += t.prob * t.reward;
                }
        p.push_back(std::move(pm));
        r_sa.push_back(std::move(rm));
    }
    if (p.empty()) throw model_error("no model_<k>.csv files in '" + dir + "'");
    const int M = int(p.size());

    numvec lambda(M, 0.0);
    {
        std::ifstream w(dir + "/weights.csv");
        if (!w) throw model_error("cannot open '" + dir + "/weights.csv'");
        std::string line;
        std::getline(w, line);
        while (std::getline(w, line)) {
            if (line.empty()) continue;
            int id = 0;
            double wt = 0.0;
            if (std::sscanf(line.c_str(), "%d,%lf", &id, &wt) != 2)
                throw model_error("malformed weights.csv line: " + line);
            if (id < 0 || id >= M) throw model_error("weights.csv model id out of range");
            lambda[id] = wt;
        }
    }

    numvec mu(S, 1.0 / double(S));
    if (fs::exists(dir + "/initial.csv")) {
        std::ifstream init(dir + "/initial.csv");
        std::string line;
        std::getline(init, line);
        std::fill(mu.begin(), mu.end(), 0.0);
        while (std::getline(init, line)) {
            if (line.empty()) continue;
            int id = 0;
            double pr = 0.0;
            if (std::sscanf(line.c_str(), "%d,%lf", &id, &pr) != 2)
                throw model_error("malformed initial.csv line: " + line);
            mu[id] = pr;
        }
    }

    Mmdp out = Mmdp::stationary_rewards(T, std::move(lambda), std::move(mu), std::move(p),
                                        std::move(r_sa));
    if (gamma != 1.0) out = apply_discount(out, gamma);
    return out;
}

} // namespace riskmdp
