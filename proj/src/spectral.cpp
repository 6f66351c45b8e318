#include "riskmdp/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace riskmdp {

namespace {

// power iteration core; returns nullopt when not converged
std::optional<double> power_radius(const std::vector<numvec>& A, double shift, long max_sweeps) {
    const int n = int(A.size());
    numvec x(n, 1.0 / double(n)), y(n, 0.0);
    double lambda = 0.0;
    for (long it = 0; it < max_sweeps; it++) {
        double norm = 0.0;
        for (int i = 0; i < n; i++) {
            double acc = shift * x[i];
            const numvec& row = A[i];
            for (int j = 0; j < n; j++) acc += row[j] * x[j];
            y[i] = acc;
            norm = std::max(norm, std::fabs(acc));
        }
        if (norm == 0.0) return 0.0 - shift;  // nilpotent-in-one-step
        double new_lambda = norm;
        double resid = 0.0;
        for (int i = 0; i < n; i++) {
            resid = std::max(resid, std::fabs(y[i] - new_lambda * x[i]));
            x[i] = y[i] / norm;
        }
        bool settled = std::fabs(new_lambda - lambda) <= 1e-13 * std::max(1.0, new_lambda);
        lambda = new_lambda;
        if (settled && resid <= 1e-11 * std::max(1.0, norm)) return lambda - shift;
    }
    return std::nullopt;
}

} // namespace

double spectral_radius(const std::vector<numvec>& M) {
    const int n = int(M.size());
    if (n == 0) return 0.0;
    double max_row_sum = 0.0;
    for (int i = 0; i < n; i++) {
        if (int(M[i].size()) != n) throw model_error("spectral_radius: matrix not square");
        double rs = 0.0;
        for (double v : M[i]) {
            if (std::isnan(v) || v < 0.0)
                throw model_error("spectral_radius: NaN or negative entry");
            rs += v;
        }
        max_row_sum = std::max(max_row_sum, rs);
    }
    if (max_row_sum == 0.0) return 0.0;

    double shift = 0.5 * max_row_sum;
    auto r = power_radius(M, shift, 100000);
    if (r) return std::max(0.0, *r);
    // Gershgorin upper bound, deterministic fallback
    return max_row_sum;
}

double log_spectral_radius(const std::vector<numvec>& log_entries) {
    const int n = int(log_entries.size());
    if (n == 0) return NEG_INF;
    double m = NEG_INF;
    for (const auto& row : log_entries)
        for (double v : row) m = std::max(m, v);
    if (m == NEG_INF) return NEG_INF;
    std::vector<numvec> scaled(n, numvec(n, 0.0));
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
            scaled[i][j] = log_entries[i][j] == NEG_INF ? 0.0 : std::exp(log_entries[i][j] - m);
    return m + std::log(spectral_radius(scaled));
}

TransienceReport check_transient(const TransientMdp& mdp, const StationaryPolicy& d) {
    TransienceReport rep;
    PolicyMatrices pm = policy_matrices(mdp, d);
    rep.worst_rho = spectral_radius(pm.P);
    rep.transient = rep.worst_rho < 1.0 - 1e-12;
    rep.policies_checked = 1;
    if (!rep.transient && !d.randomized()) rep.violating_policy = d.actions;
    return rep;
}

TransienceReport check_transient_exhaustive(const TransientMdp& mdp, long policy_cap) {
    long count = 1;
    for (int s = 0; s < mdp.n_states; s++) {
        count *= long(mdp.admissible[s].size());
        if (count > policy_cap)
            throw model_error("policy space too large for exhaustive transience check");
    }

    TransienceReport rep;
    rep.transient = true;
    indvec choice(mdp.n_states, 0);  // index into admissible[s]
    for (long k = 0; k < count; k++) {
        indvec actions(mdp.n_states);
        for (int s = 0; s < mdp.n_states; s++) actions[s] = mdp.admissible[s][choice[s]];
        auto one = check_transient(mdp, StationaryPolicy::deterministic(actions));
        if (one.worst_rho > rep.worst_rho) {
            rep.worst_rho = one.worst_rho;
            if (!one.transient) {
                rep.transient = false;
                rep.violating_policy = actions;
            }
        }
        // advance mixed-radix counter
        for (int s = 0; s < mdp.n_states; s++) {
            if (++choice[s] < int(mdp.admissible[s].size())) break;
            choice[s] = 0;
        }
    }
    rep.policies_checked = count;
    return rep;
}

} // namespace riskmdp
