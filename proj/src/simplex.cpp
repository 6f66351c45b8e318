#include "riskmdp/simplex.hpp"

#include <cmath>

namespace riskmdp {

LpResult simplex_solve(const std::vector<numvec>& A, const numvec& b, const numvec& c) {
    const int m = int(A.size());
    const int n = int(c.size());
    for (int i = 0; i < m; i++)
        if (b[i] < 0.0) throw model_error("simplex_solve requires b >= 0");

    // tableau: m constraint rows + objective row; columns: n vars, m slacks, rhs
    const int cols = n + m + 1;
    std::vector<numvec> T(m + 1, numvec(cols, 0.0));
    for (int i = 0; i < m; i++) {
        for (int j = 0; j < n; j++) T[i][j] = A[i][j];
        T[i][n + i] = 1.0;
        T[i][cols - 1] = b[i];
    }
    for (int j = 0; j < n; j++) T[m][j] = -c[j];

    indvec basis(m);
    for (int i = 0; i < m; i++) basis[i] = n + i;

    const double eps = 1e-11;
    const long bland_after = 20L * (m + n);
    const long max_iter = 200L * (m + n) + 10000;

    for (long it = 0; it < max_iter; it++) {
        // entering column
        int enter = -1;
        if (it < bland_after) {
            double best = -eps;
            for (int j = 0; j < n + m; j++)
                if (T[m][j] < best) {
                    best = T[m][j];
                    enter = j;
                }
        } else {
            for (int j = 0; j < n + m; j++)
                if (T[m][j] < -eps) {
                    enter = j;
                    break;
                }
        }
        if (enter < 0) {
            numvec x(n, 0.0);
            for (int i = 0; i < m; i++)
                if (basis[i] < n) x[basis[i]] = T[i][cols - 1];
            double obj = 0.0;
            for (int j = 0; j < n; j++) obj += c[j] * x[j];
            return {LpStatus::Optimal, std::move(x), obj};
        }

        // ratio test
        int leave = -1;
        double best_ratio = POS_INF;
        for (int i = 0; i < m; i++) {
            double a = T[i][enter];
            if (a > eps) {
                double ratio = T[i][cols - 1] / a;
                if (ratio < best_ratio - eps ||
                    (ratio < best_ratio + eps && (leave < 0 || basis[i] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) return {LpStatus::Unbounded, numvec(n, 0.0), POS_INF};

        // pivot
        double piv = T[leave][enter];
        for (int j = 0; j < cols; j++) T[leave][j] /= piv;
        for (int i = 0; i <= m; i++) {
            if (i == leave) continue;
            double f = T[i][enter];
            if (f == 0.0) continue;
            for (int j = 0; j < cols; j++) T[i][j] -= f * T[leave][j];
        }
        basis[leave] = enter;
    }
    return {LpStatus::IterationLimit, numvec(n, 0.0), 0.0};
}

} // namespace riskmdp
