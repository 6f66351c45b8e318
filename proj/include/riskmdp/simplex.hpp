#pragma once

#include "riskmdp/types.hpp"

namespace riskmdp {

enum class LpStatus { Optimal, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status;
    numvec x;
    double objective;
};

/**
 * Dense primal simplex for
 *   max c'x  s.t.  A x <= b,  x >= 0,
 * with b >= 0 so the slack basis is feasible. Dantzig pricing with a switch
 * to Bland's rule after stalling, which rules out cycling.
 */
LpResult simplex_solve(const std::vector<numvec>& A, const numvec& b, const numvec& c);

} // namespace riskmdp
