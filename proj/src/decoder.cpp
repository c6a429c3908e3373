#include "qbp/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qbp/error.hpp"

namespace qbp {

namespace {

void check_inputs(const FactorGraph& graph, int root, std::span<const double> thetas) {
  if (thetas.size() != static_cast<std::size_t>(graph.n_vars)) {
    throw DimensionMismatch("need one channel angle per variable");
  }
  for (double t : thetas) {
    if (!(t >= 0.0 && t <= std::numbers::pi)) throw InvalidArgument("channel angle outside [0, pi]");
  }
  if (root < 1 || root > graph.n_vars) throw InvalidArgument("root variable out of range");
  for (const auto& c : graph.checks) {
    if (c.size() < 2) throw InvalidArgument("degree-1 checks pin a bit; the quantum decoder needs degree >= 2");
  }
}

}  // namespace

std::vector<double> uniform_angles(const FactorGraph& graph, const PureStateChannel& w) {
  return std::vector<double>(static_cast<std::size_t>(graph.n_vars), w.theta());
}

DecoderCircuit build_destructive(const FactorGraph& graph, int root, std::span<const double> thetas) {
  check_inputs(graph, root, thetas);
  const TreeSchedule sched = schedule(graph, root);
  std::vector<double> cosines;
  for (double t : thetas) cosines.push_back(std::cos(t));
  CircuitBuilder builder(cosines);
  std::vector<int> check_wire(graph.checks.size(), -1);
  for (const auto& visit : sched.visits) {
    if (visit.node.is_variable()) {
      const int wire = visit.node.index - 1;
      for (const auto& c : visit.children) builder.var_merge(wire, check_wire[static_cast<std::size_t>(c.index)]);
    } else {
      const int acc = visit.children.front().index - 1;
      for (std::size_t k = 1; k < visit.children.size(); ++k) builder.check_merge(acc, visit.children[k].index - 1);
      check_wire[static_cast<std::size_t>(visit.node.index)] = acc;
    }
  }
  return std::move(builder).finish(root - 1);
}

DecoderCircuit build_destructive(const FactorGraph& graph, int root, const PureStateChannel& w) {
  return build_destructive(graph, root, uniform_angles(graph, w));
}

DecoderCircuit build_coherent(const FactorGraph& graph, int root, std::span<const double> thetas, bool tabulate) {
  return to_coherent(build_destructive(graph, root, thetas), tabulate);
}

DecoderCircuit build_coherent(const FactorGraph& graph, int root, const PureStateChannel& w, bool tabulate) {
  return build_coherent(graph, root, uniform_angles(graph, w), tabulate);
}

StateVector channel_outputs(const Codeword& x, std::span<const double> thetas) {
  if (x.size() != thetas.size()) throw DimensionMismatch("codeword and channel list differ in length");
  std::vector<StateVector> factors;
  factors.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) factors.push_back(pure_state(thetas[j], x[j] ? -1 : +1));
  return StateVector::product(factors);
}

BitEstimate decode_bit_destructive(const StateVector& outputs, const DecoderCircuit& circuit, Rng& rng) {
  return run_destructive(circuit, outputs, rng);
}

double exact_bit_error(const FactorGraph& graph, int root, std::span<const double> thetas) {
  if (graph.n_vars > 12) throw TooLargeError("exact_bit_error supports n <= 12");
  return exact_circuit_error(build_destructive(graph, root, thetas));
}

double exact_bit_error(const FactorGraph& graph, int root, const PureStateChannel& w) {
  return exact_bit_error(graph, root, uniform_angles(graph, w));
}

SequentialDecoder::SequentialDecoder(const FactorGraph& graph, std::vector<double> thetas, std::vector<int> order)
    : graph_(graph), thetas_(std::move(thetas)), order_(std::move(order)) {
  if (order_.empty()) {
    for (int v = 1; v <= graph_.n_vars; ++v) order_.push_back(v);
  }
  std::vector<int> sorted = order_;
  std::sort(sorted.begin(), sorted.end());
  for (int v = 1; v <= graph_.n_vars; ++v) {
    if (sorted.size() != static_cast<std::size_t>(graph_.n_vars) || sorted[static_cast<std::size_t>(v - 1)] != v) {
      throw InvalidArgument("decoding order must be a permutation of 1..n");
    }
  }
  for (int v : order_) {
    DecoderCircuit destructive = build_destructive(graph_, v, thetas_);
    bit_errors_.push_back(exact_circuit_error(destructive));
    circuits_.push_back(to_coherent(destructive));
  }
}

double SequentialDecoder::block_error_bound() const {
  double sum = 0.0;
  for (double e : bit_errors_) sum += e;
  return std::min(1.0, 4.0 * sum);
}

SequentialResult SequentialDecoder::decode(StateVector outputs, Rng& rng) const {
  if (outputs.num_qubits() != graph_.n_vars) throw DimensionMismatch("input width does not match graph");
  SequentialResult result;
  result.bits.assign(static_cast<std::size_t>(graph_.n_vars), 0);
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const DecoderCircuit& v = circuits_[k];
    apply_coherent(v, outputs);
    const MeasurementRecord rec = measure_in_place(outputs, v.root_wire, Basis::X, uniform01(rng));
    apply_coherent_inverse(v, outputs);
    result.bits[static_cast<std::size_t>(order_[k] - 1)] = static_cast<std::uint8_t>(rec.outcome);
    BitEstimate est;
    est.bit = rec.outcome;
    est.error_probability = bit_errors_[k];
    result.per_bit_estimates.push_back(est);
  }
  result.block_error_bound = block_error_bound();
  return result;
}

double SequentialDecoder::exact_block_error() const {
  if (graph_.n_vars > 12) throw TooLargeError("exact sequential error supports n <= 12");
  const auto code = enumerate_codewords(graph_);
  double success = 0.0;
  for (const auto& x : code) {
    StateVector psi = channel_outputs(x, thetas_);
    double p = 1.0;
    for (std::size_t k = 0; k < order_.size() && p > 0.0; ++k) {
      const DecoderCircuit& v = circuits_[k];
      const int want = x[static_cast<std::size_t>(order_[k] - 1)];
      apply_coherent(v, psi);
      const double pk = outcome_probability(psi, v.root_wire, Basis::X, want);
      p *= pk;
      if (!(pk > 0.0)) break;
      project_in_place(psi, v.root_wire, Basis::X, want);
      apply_coherent_inverse(v, psi);
    }
    success += p;
  }
  return std::clamp(1.0 - success / static_cast<double>(code.size()), 0.0, 1.0);
}

SequentialResult sequential_decode(const StateVector& outputs, const FactorGraph& graph, const PureStateChannel& w,
                                   Rng& rng) {
  return SequentialDecoder(graph, uniform_angles(graph, w)).decode(outputs, rng);
}

}  // namespace qbp
