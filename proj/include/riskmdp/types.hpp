#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskmdp {

using prec_t = double;
using numvec = std::vector<double>;
using indvec = std::vector<int>;

constexpr double NEG_INF = -std::numeric_limits<double>::infinity();
constexpr double POS_INF = std::numeric_limits<double>::infinity();

/// Tolerance for probability-vector checks (row sums, initial distributions).
constexpr double PROB_TOL = 1e-9;

/// Thrown on contract violations (bad parameters, malformed files, ...).
class model_error : public std::runtime_error {
public:
    explicit model_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace riskmdp
