#pragma once

// Brute-force ground truth for the decoders.

#include <optional>
#include <span>
#include <vector>

#include "qbp/channel.hpp"
#include "qbp/factor_graph.hpp"
#include "qbp/quantum.hpp"

namespace qbp {

struct HypothesisPair {
  DensityOperator rho0;
  DensityOperator rho1;
  double prior0 = 0.5;
};

struct BitHypotheses {
  std::optional<HypothesisPair> pair;  // empty when the bit is constant over the code
  bool constant_bit = false;
  int constant_value = 0;
};

// rho_b averages the output states of codewords with x_bit = b. Dense, n <= 10.
BitHypotheses bit_hypothesis_states(const FactorGraph& graph, std::span<const double> thetas, int bit);
BitHypotheses bit_hypothesis_states(const FactorGraph& graph, const PureStateChannel& w, int bit);

struct OracleReport {
  enum class Method { TraceNorm, Enumeration };
  double optimal_error = 0.0;
  Method method = Method::TraceNorm;
  bool constant_bit = false;
};

// 1/2 (1 - ||p0 rho0 - p1 rho1||_1).
OracleReport optimal_bit_error(const HypothesisPair& pair);

// Same quantity for a code's bit through the Gram matrix of the codeword
// output states, which stays small (|C| x |C|) for tree codes. n <= 12.
OracleReport oracle_bit_error(const FactorGraph& graph, std::span<const double> thetas, int bit);
OracleReport oracle_bit_error(const FactorGraph& graph, const PureStateChannel& w, int bit);

// log P(x_bit = 0 | y) / P(x_bit = 1 | y) by summing over all codewords. n <= 20.
double brute_posterior_classical(const FactorGraph& graph, std::span<const double> llrs, int bit);

// Sequential decoding error enumerating every measurement outcome of every
// round, ascending order. n <= 6.
double sequential_exact_block_error(const FactorGraph& graph, const PureStateChannel& w);
double sequential_exact_block_error(const FactorGraph& graph, std::span<const double> thetas);

}  // namespace qbp
