#pragma once

#include <cmath>
#include <numbers>

#include <doctest.h>

#include "qbp/factor_graph.hpp"

namespace qbp::test {

inline constexpr double kPi = std::numbers::pi;

inline FactorGraph code4() { return FactorGraph{4, {{1, 3}, {1, 2, 4}}}; }
inline FactorGraph rep3() { return FactorGraph{3, {{1, 2}, {2, 3}}}; }

#define CHECK_CLOSE(a, b, tol)                                                             \
  do {                                                                                     \
    const double qbp_a_ = (a), qbp_b_ = (b);                                               \
    CHECK_MESSAGE(std::abs(qbp_a_ - qbp_b_) <= (tol), #a " = " << qbp_a_ << ", " #b " = " << qbp_b_); \
  } while (0)

}  // namespace qbp::test
