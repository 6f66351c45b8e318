#include "riskmdp/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "riskmdp/simplex.hpp"
#include "riskmdp/spectral.hpp"

namespace riskmdp {

namespace {

constexpr double LOG_RHO_ONE = -1e-10;  // log rho >= this counts as rho >= 1

/// One v-space sweep of the optimal exponential Bellman operator. v entries
/// may be +inf (w = 0); the sink contributes value 0. Returns the greedy rule
/// in non-sink row indices.
void sweep_v(const LogExpModel& m, const numvec& v, numvec& out, indvec& greedy) {
    const int n = m.n;
#pragma omp parallel for schedule(static) if (n > 64)
    for (int s = 0; s < n; s++) {
        double best_v = NEG_INF;
        int best_a = m.admissible[s].front();
        bool first = true;
        for (size_t k = 0; k < m.admissible[s].size(); k++) {
            // action value: -1/beta log sum exp(lc - beta v_to)
            double mx = NEG_INF;
            for (const auto& e : m.rows[s][k]) {
                double x = e.to < 0 ? e.log_coef : e.log_coef - m.beta * v[e.to];
                if (x > mx) mx = x;
            }
            double av;
            if (mx == NEG_INF) {
                av = POS_INF;  // no finite continuation and no termination mass
            } else {
                double acc = 0.0;
                for (const auto& e : m.rows[s][k]) {
                    double x = e.to < 0 ? e.log_coef : e.log_coef - m.beta * v[e.to];
                    acc += std::exp(x - mx);
                }
                av = -(mx + std::log(acc)) / m.beta;
            }
            if (first || av > best_v) {
                best_v = av;
                best_a = m.admissible[s][k];
                first = false;
            }
        }
        out[s] = best_v;
        greedy[s] = best_a;
    }
}

StationaryPolicy rows_to_policy(const TransientMdp& mdp, const indvec& greedy_rows) {
    indvec actions(mdp.n_states, 0);
    actions[mdp.sink] = mdp.admissible[mdp.sink].front();
    for (int s = 0; s < mdp.n_states; s++)
        if (s != mdp.sink) actions[s] = greedy_rows[mdp.nonsink_index(s)];
    return StationaryPolicy::deterministic(actions);
}

numvec w_from_v(const numvec& v, double beta) {
    numvec w(v.size());
    for (size_t i = 0; i < v.size(); i++) w[i] = -std::exp(-beta * v[i]);
    return w;
}

ErmSolution make_unbounded(double beta, long iterations) {
    ErmSolution sol;
    sol.bounded = false;
    sol.beta = beta;
    sol.g_mu = NEG_INF;
    sol.iterations = iterations;
    return sol;
}

} // namespace

double erm_under_initial(const TransientMdp& mdp, const numvec& values, double beta) {
    double mx = NEG_INF;
    for (int s = 0; s < mdp.n_states; s++) {
        if (s == mdp.sink || mdp.initial_dist[s] == 0.0) continue;
        mx = std::max(mx, -beta * values[mdp.nonsink_index(s)]);
    }
    if (mx == POS_INF) return NEG_INF;  // some value is -inf
    if (mx == NEG_INF) return POS_INF;  // every reachable value is +inf
    double acc = 0.0;
    for (int s = 0; s < mdp.n_states; s++) {
        if (s == mdp.sink || mdp.initial_dist[s] == 0.0) continue;
        acc += mdp.initial_dist[s] * std::exp(-beta * values[mdp.nonsink_index(s)] - mx);
    }
    return -(mx + std::log(acc)) / beta;
}

ErmSolution value_iteration(const TransientMdp& mdp, double beta, double tol, long max_iter,
                            double w_floor) {
    if (!(beta > 0.0)) throw model_error("beta must be positive");
    LogExpModel m = log_exp_model(mdp, beta);
    const int n = m.n;
    const double v_floor = -std::log(-w_floor) / beta;

    numvec v(n, POS_INF), v2(n, 0.0);  // v = +inf is w = 0
    indvec greedy(n, 0);
    double residual = POS_INF;
    long it = 0;
    for (; it < max_iter; it++) {
        sweep_v(m, v, v2, greedy);

        bool floored = false;
        for (int s = 0; s < n; s++)
            if (v2[s] < v_floor) floored = true;
        if (floored) return make_unbounded(beta, it + 1);

        // residual both in w and v scale
        double wres = 0.0, vres = 0.0, vscale = 0.0;
        for (int s = 0; s < n; s++) {
            double w_old = -std::exp(-beta * v[s]);
            double w_new = -std::exp(-beta * v2[s]);
            wres = std::max(wres, std::fabs(w_new - w_old));
            if (!(v[s] == POS_INF && v2[s] == POS_INF))
                vres = std::max(vres, std::fabs(v2[s] - v[s]));
            if (v2[s] != POS_INF) vscale = std::max(vscale, std::fabs(v2[s]));
        }
        v.swap(v2);
        residual = wres;

        bool periodic_check = (it + 1) % 1000 == 0;
        bool converged = wres <= tol && vres <= 1e-10 * (1.0 + vscale);
        if (periodic_check || converged) {
            if (policy_log_radius(m, greedy) >= LOG_RHO_ONE)
                return make_unbounded(beta, it + 1);
        }
        if (converged) {
            it++;
            break;
        }
    }
    if (it >= max_iter)
        throw model_error("indeterminate: value iteration hit max_iter with residual " +
                          std::to_string(residual));

    ErmSolution sol;
    sol.bounded = true;
    sol.beta = beta;
    sol.v = v;
    sol.w = w_from_v(v, beta);
    sol.policy = rows_to_policy(mdp, greedy);
    sol.g_mu = erm_under_initial(mdp, v, beta);
    sol.iterations = it;
    return sol;
}

namespace {

/// Exact policy evaluation w = -(I - B^d)^{-1} b^d; nullopt when the policy
/// matrix is not contractive.
std::optional<numvec> evaluate_policy_w(const ExpModel& model, const TransientMdp& mdp,
                                        const StationaryPolicy& d) {
    auto [B, b] = policy_exp_matrices(model, mdp, d);
    if (spectral_radius(B) >= 1.0 - 1e-10) return std::nullopt;
    const int n = model.n;
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; i++) {
        rhs(i) = -b[i];
        for (int j = 0; j < n; j++) M(i, j) = (i == j ? 1.0 : 0.0) - B[i][j];
    }
    Eigen::VectorXd w = M.partialPivLu().solve(rhs);
    numvec out(n);
    for (int i = 0; i < n; i++) out[i] = w(i);
    return out;
}

} // namespace

ErmSolution policy_iteration(const TransientMdp& mdp, double beta,
                             std::optional<StationaryPolicy> pi0) {
    if (!(beta > 0.0)) throw model_error("beta must be positive");
    ExpModel model = exp_model(mdp, beta);
    const int n = model.n;

    StationaryPolicy current;
    long warm_sweeps = 0;
    if (pi0) {
        auto w0 = evaluate_policy_w(model, mdp, *pi0);
        if (!w0) throw model_error("initial policy has unbounded exponential return");
        current = *pi0;
    } else {
        // warm start from 100 VI sweeps
        LogExpModel lm = log_exp_model(mdp, beta);
        numvec v(n, POS_INF), v2(n, 0.0);
        indvec greedy(n, 0);
        for (int k = 0; k < 100; k++) {
            sweep_v(lm, v, v2, greedy);
            v.swap(v2);
        }
        warm_sweeps = 100;
        current = rows_to_policy(mdp, greedy);
        if (policy_log_radius(lm, greedy) >= LOG_RHO_ONE) {
            // the warm start is not contractive; defer to the full VI verdict
            ErmSolution vi = value_iteration(mdp, beta);
            if (!vi.bounded) return vi;
            current = vi.policy;
        }
    }

    ErmSolution sol;
    sol.beta = beta;
    long improvements = 0;
    numvec w;
    for (;; improvements++) {
        if (improvements > 100000) throw model_error("policy iteration failed to terminate");
        auto w_eval = evaluate_policy_w(model, mdp, current);
        if (!w_eval) throw model_error("policy iteration reached a non-contractive policy");
        w = *w_eval;
        auto [w_next, greedy] = exp_bellman(model, w);
        StationaryPolicy next = rows_to_policy(mdp, greedy);
        bool same = !current.randomized();
        for (int s = 0; s < mdp.n_states && same; s++)
            same = next.actions[s] == current.actions[s];
        // a greedy policy achieving the same value as the current one also
        // terminates (covers randomized starting policies)
        bool same_value = true;
        for (int i = 0; i < n && same_value; i++)
            same_value = std::fabs(w_next[i] - w[i]) <= 1e-12 * std::max(1.0, std::fabs(w[i]));
        if (same || same_value) {
            if (!same && same_value) current = next;
            break;
        }
        current = next;
    }

    sol.bounded = true;
    sol.w = w;
    sol.v.resize(n);
    for (int i = 0; i < n; i++) sol.v[i] = -std::log(-w[i]) / beta;
    sol.policy = current;
    sol.g_mu = erm_under_initial(mdp, sol.v, beta);
    sol.iterations = improvements + warm_sweeps;
    return sol;
}

ErmSolution lp_solve(const TransientMdp& mdp, double beta) {
    if (!(beta > 0.0)) throw model_error("beta must be positive");
    ExpModel model = exp_model(mdp, beta);
    const int n = model.n;

    // max 1'y s.t. (I - B^a) y <= b^a over admissible (s,a); y = -w >= 0
    std::vector<numvec> A;
    numvec rhs;
    for (int s = 0; s < n; s++) {
        for (int a : model.admissible[s]) {
            numvec row(n, 0.0);
            for (int j = 0; j < n; j++) row[j] = -model.B[a][s][j];
            row[s] += 1.0;
            A.push_back(std::move(row));
            rhs.push_back(model.b[a][s]);
        }
    }
    numvec c(n, 1.0);
    LpResult lp = simplex_solve(A, rhs, c);
    if (lp.status == LpStatus::Unbounded) return make_unbounded(beta, 0);
    if (lp.status != LpStatus::Optimal)
        throw model_error("linear program did not converge");

    ErmSolution sol;
    sol.bounded = true;
    sol.beta = beta;
    sol.w.resize(n);
    for (int i = 0; i < n; i++) sol.w[i] = -lp.x[i];
    auto [w_check, greedy] = exp_bellman(model, sol.w);
    sol.policy = rows_to_policy(mdp, greedy);
    sol.v.resize(n);
    for (int i = 0; i < n; i++) sol.v[i] = -std::log(-sol.w[i]) / beta;
    sol.g_mu = erm_under_initial(mdp, sol.v, beta);
    sol.iterations = 0;

    // the LP optimum must be the Bellman fixed point; guard against a
    // numerically degenerate basis
    double resid = 0.0, scale = 1.0;
    for (int i = 0; i < n; i++) {
        resid = std::max(resid, std::fabs(w_check[i] - sol.w[i]));
        scale = std::max(scale, std::fabs(sol.w[i]));
    }
    if (!(resid <= 1e-6 * scale))
        throw model_error("linear program solution fails the fixed-point check");
    return sol;
}

double erm_return(const TransientMdp& mdp, const StationaryPolicy& pi, double beta) {
    if (beta < 0.0) throw model_error("beta must be >= 0");
    if (beta == 0.0) {
        numvec v = expected_trc_values(mdp, pi);
        double g = 0.0;
        for (int s = 0; s < mdp.n_states; s++)
            if (s != mdp.sink) g += mdp.initial_dist[s] * v[mdp.nonsink_index(s)];
        return g;
    }

    // spectral-radius certificate in log space
    const int n = mdp.n_nonsink();
    std::vector<numvec> logB(n, numvec(n, NEG_INF));
    numvec log_b(n, NEG_INF);
    for (int s = 0; s < mdp.n_states; s++) {
        if (s == mdp.sink) continue;
        int i = mdp.nonsink_index(s);
        for (int a = 0; a < mdp.n_actions; a++) {
            double da = pi.prob(s, a);
            if (da == 0.0) continue;
            if (!mdp.is_admissible(s, a)) throw model_error("policy uses inadmissible action");
            for (const auto& t : mdp.transitions[s][a]) {
                if (t.prob == 0.0) continue;
                double lc = std::log(da * t.prob) - beta * t.reward;
                double& cell = t.to == mdp.sink ? log_b[i] : logB[i][mdp.nonsink_index(t.to)];
                if (cell == NEG_INF)
                    cell = lc;
                else {
                    double mx = std::max(cell, lc);
                    cell = mx + std::log(std::exp(cell - mx) + std::exp(lc - mx));
                }
            }
        }
    }
    if (log_spectral_radius(logB) >= -1e-12) return NEG_INF;

    // policy evaluation in v space, fixed-point iteration
    numvec v(n, POS_INF), v2(n, 0.0);
    for (long it = 0; it < 1000000; it++) {
        double resid = 0.0, vscale = 0.0;
        for (int i = 0; i < n; i++) {
            double mx = log_b[i];
            for (int j = 0; j < n; j++)
                if (logB[i][j] != NEG_INF) mx = std::max(mx, logB[i][j] - beta * v[j]);
            double nv;
            if (mx == NEG_INF)
                nv = POS_INF;
            else {
                double acc = log_b[i] == NEG_INF ? 0.0 : std::exp(log_b[i] - mx);
                for (int j = 0; j < n; j++)
                    if (logB[i][j] != NEG_INF) acc += std::exp(logB[i][j] - beta * v[j] - mx);
                nv = -(mx + std::log(acc)) / beta;
            }
            v2[i] = nv;
            if (!(v[i] == POS_INF && nv == POS_INF))
                resid = std::max(resid, std::fabs(nv - v[i]));
            if (nv != POS_INF) vscale = std::max(vscale, std::fabs(nv));
        }
        v.swap(v2);
        if (resid <= 1e-13 * (1.0 + vscale)) break;
    }
    return erm_under_initial(mdp, v, beta);
}

double h_value(double g, double beta, double alpha) {
    if (!(beta > 0.0)) throw model_error("beta must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw model_error("alpha must be in (0,1]");
    if (g == NEG_INF) return NEG_INF;
    return g + std::log(alpha) / beta;
}

EvarSolution evar_solve(const TransientMdp& mdp, double alpha, double delta,
                        std::optional<double> beta0_opt) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw model_error("alpha must be in (0,1)");
    if (!(delta > 0.0)) throw model_error("delta must be positive");
    const double L = std::log(1.0 / alpha);

    // a single bounded ERM solve, LP first with a VI fallback
    auto solve_one = [&](double beta) -> ErmSolution {
        try {
            return lp_solve(mdp, beta);
        } catch (const model_error&) {
            return value_iteration(mdp, beta);
        }
    };

    double beta0;
    if (beta0_opt) {
        beta0 = *beta0_opt;
        if (!(beta0 > 0.0)) throw model_error("beta0 must be positive");
    } else {
        // halve until the optimal ERM return is within delta of risk-neutral
        double g0 = solve_risk_neutral(mdp).value_mu;
        beta0 = 1.0;
        int halvings = 0;
        for (;; halvings++) {
            if (halvings > 200) throw model_error("no bounded ERM level found");
            if (beta0 * delta < L) {
                double g = solve_one(beta0).g_mu;
                if (g != NEG_INF && g0 - g <= delta) break;
            }
            beta0 /= 2.0;
        }
    }
    while (!(beta0 * delta < L)) beta0 /= 2.0;

    EvarSolution sol;
    sol.delta = delta;
    sol.grid = beta_grid(beta0, delta, alpha);
    const int K = int(sol.grid.betas.size());
    sol.h_values.assign(K, NEG_INF);
    std::vector<StationaryPolicy> policies(K);

#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < K; k++) {
        double beta = sol.grid.betas[k];
        ErmSolution one = solve_one(beta);
        if (one.bounded) {
            sol.h_values[k] = h_value(one.g_mu, beta, alpha);
            policies[k] = std::move(one.policy);
        }
    }

    int best = -1;
    for (int k = 0; k < K; k++)
        if (sol.h_values[k] != NEG_INF && (best < 0 || sol.h_values[k] > sol.value)) {
            best = k;
            sol.value = sol.h_values[k];
        }
    if (best < 0) throw model_error("no bounded ERM level found");
    sol.beta_star = sol.grid.betas[best];
    sol.policy = policies[best];
    return sol;
}

} // namespace riskmdp
