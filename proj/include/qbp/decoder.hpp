#pragma once

// Quantum belief propagation on tree codes: per-bit destructive decoding,
// its exact error, the coherent unitary V_j, and sequential decoding of all bits.

#include <span>
#include <vector>

#include "qbp/channel.hpp"
#include "qbp/circuit.hpp"
#include "qbp/factor_graph.hpp"

namespace qbp {

// Per-variable channel angles; thetas[v-1] belongs to variable v.
std::vector<double> uniform_angles(const FactorGraph& graph, const PureStateChannel& w);

// Wire v-1 holds the output of variable v. Checks must have degree >= 2.
DecoderCircuit build_destructive(const FactorGraph& graph, int root, std::span<const double> thetas);
DecoderCircuit build_destructive(const FactorGraph& graph, int root, const PureStateChannel& w);

DecoderCircuit build_coherent(const FactorGraph& graph, int root, std::span<const double> thetas,
                              bool tabulate = true);
DecoderCircuit build_coherent(const FactorGraph& graph, int root, const PureStateChannel& w,
                              bool tabulate = true);

// Product state of the channel outputs for codeword x.
StateVector channel_outputs(const Codeword& x, std::span<const double> thetas);

BitEstimate decode_bit_destructive(const StateVector& outputs, const DecoderCircuit& circuit, Rng& rng);

double exact_bit_error(const FactorGraph& graph, int root, std::span<const double> thetas);
double exact_bit_error(const FactorGraph& graph, int root, const PureStateChannel& w);

struct SequentialResult {
  Codeword bits;
  std::vector<BitEstimate> per_bit_estimates;  // in decoding order
  double block_error_bound = 1.0;              // min(1, 4 * sum of per-bit errors)
};

// Decodes bits one at a time with V_j, an X measurement of wire j-1, then V_j
// inverse. The default order is ascending.
class SequentialDecoder {
 public:
  SequentialDecoder(const FactorGraph& graph, std::vector<double> thetas, std::vector<int> order = {});

  const std::vector<int>& order() const { return order_; }
  const std::vector<double>& bit_errors() const { return bit_errors_; }  // indexed like order()
  double block_error_bound() const;
  const DecoderCircuit& circuit(std::size_t k) const { return circuits_[k]; }

  SequentialResult decode(StateVector outputs, Rng& rng) const;

  // 1 - average over codewords of the probability that every bit is right.
  double exact_block_error() const;

 private:
  FactorGraph graph_;
  std::vector<double> thetas_;
  std::vector<int> order_;
  std::vector<DecoderCircuit> circuits_;
  std::vector<double> bit_errors_;
};

SequentialResult sequential_decode(const StateVector& outputs, const FactorGraph& graph,
                                   const PureStateChannel& w, Rng& rng);

}  // namespace qbp
