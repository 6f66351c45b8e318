#include "riskmdp/risk.hpp"

#include <algorithm>
#include <cmath>

namespace riskmdp {

double FiniteDistribution::mean() const {
    double m = 0.0;
    for (size_t i = 0; i < size(); i++) m += probs[i] * outcomes[i];
    return m;
}

double FiniteDistribution::min_outcome() const {
    double m = POS_INF;
    for (size_t i = 0; i < size(); i++)
        if (probs[i] > 0.0) m = std::min(m, outcomes[i]);
    return m;
}

double FiniteDistribution::max_outcome() const {
    double m = NEG_INF;
    for (size_t i = 0; i < size(); i++)
        if (probs[i] > 0.0) m = std::max(m, outcomes[i]);
    return m;
}

FiniteDistribution FiniteDistribution::empirical(const numvec& samples) {
    if (samples.empty()) throw model_error("empirical distribution needs samples");
    FiniteDistribution d;
    d.outcomes = samples;
    d.probs.assign(samples.size(), 1.0 / double(samples.size()));
    return d;
}

namespace {

void check_dist(const FiniteDistribution& dist) {
    if (dist.size() == 0) throw model_error("empty distribution");
    if (dist.probs.size() != dist.outcomes.size())
        throw model_error("distribution outcome/probability length mismatch");
}

// log E[exp(-beta x)] with max-shift stabilization
double log_mgf(const FiniteDistribution& dist, double beta) {
    double m = NEG_INF;
    for (size_t i = 0; i < dist.size(); i++)
        if (dist.probs[i] > 0.0) m = std::max(m, -beta * dist.outcomes[i]);
    double acc = 0.0;
    for (size_t i = 0; i < dist.size(); i++)
        if (dist.probs[i] > 0.0) acc += dist.probs[i] * std::exp(-beta * dist.outcomes[i] - m);
    return m + std::log(acc);
}

} // namespace

double erm(const FiniteDistribution& dist, double beta) {
    check_dist(dist);
    if (beta < 0.0 || !std::isfinite(beta)) throw model_error("beta must be finite and >= 0");
    if (beta == 0.0) return dist.mean();
    return -log_mgf(dist, beta) / beta;
}

double evar(const FiniteDistribution& dist, double alpha, double beta_cap) {
    check_dist(dist);
    if (alpha < 0.0 || alpha > 1.0) throw model_error("alpha must be in [0,1]");
    if (!(beta_cap > 0.0)) throw model_error("beta_cap must be positive");
    if (alpha == 0.0) return dist.min_outcome();
    if (alpha == 1.0) return dist.mean();

    const double log_alpha = std::log(alpha);
    // objective in t = 1/beta space, concave with f(0) = ess inf
    auto f = [&](double t) {
        if (t == 0.0) return dist.min_outcome();
        return erm(dist, 1.0 / t) + t * log_alpha;
    };

    const int n_seeds = 64;
    const double beta_lo = 1e-8;
    double best_val = NEG_INF;
    int best_i = -1;
    numvec ts(n_seeds + 1);
    ts[0] = 0.0;  // beta -> infinity endpoint
    for (int i = 0; i < n_seeds; i++) {
        double beta = beta_lo * std::pow(beta_cap / beta_lo, double(i) / double(n_seeds - 1));
        ts[n_seeds - i] = 1.0 / beta;  // descending beta = ascending t
    }
    for (int i = 0; i <= n_seeds; i++) {
        double v = f(ts[i]);
        if (v > best_val) {
            best_val = v;
            best_i = i;
        }
    }

    // golden-section refinement of the winning bracket in t space
    double lo = ts[std::max(0, best_i - 1)];
    double hi = ts[std::min(n_seeds, best_i + 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + b); it++) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return std::max(best_val, std::max(f1, f2));
}

ErmLoss erm_loss(double z, double beta) {
    if (!(beta > 0.0)) throw model_error("beta must be positive");
    double e = std::exp(-beta * z);
    if (!std::isfinite(e)) return {POS_INF, NEG_INF, true};
    return {(e - 1.0) / beta + z, 1.0 - e, false};
}

double erm_via_elicitation(const FiniteDistribution& dist, double beta) {
    check_dist(dist);
    if (!(beta > 0.0)) throw model_error("beta must be positive");

    // E[l'(x - y)] = 1 - e^{beta y} E[e^{-beta x}]; decreasing in y with the
    // unique root at the ERM value
    double lmgf = log_mgf(dist, beta);
    auto deriv = [&](double y) { return 1.0 - std::exp(beta * y + lmgf); };

    double lo = dist.min_outcome(), hi = dist.max_outcome();
    if (lo == hi) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-10; it++) {
        double mid = 0.5 * (lo + hi);
        if (deriv(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

BetaGrid beta_grid(double beta0, double delta, double alpha) {
    if (!(beta0 > 0.0)) throw model_error("beta0 must be positive");
    if (!(delta > 0.0)) throw model_error("delta must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw model_error("alpha must be in (0,1)");
    const double L = std::log(1.0 / alpha);
    if (!(beta0 * delta < L)) throw model_error("initial beta too large for precision");

    BetaGrid grid;
    grid.alpha = alpha;
    grid.delta = delta;
    grid.betas.push_back(beta0);
    const double stop = L / delta;
    while (grid.betas.back() < stop) {
        double bk = grid.betas.back();
        double denom = L - bk * delta;
        // denom > 0 is implied by bk < L/delta
        grid.betas.push_back(bk * L / denom);
    }
    return grid;
}

double hoeffding_beta0(double delta, double x_min, double x_max) {
    if (!(delta > 0.0)) throw model_error("delta must be positive");
    if (!(x_max > x_min)) throw model_error("x_max must exceed x_min");
    double range = x_max - x_min;
    return 8.0 * delta / (range * range);
}

} // namespace riskmdp
