#pragma once

// Adaptive decoding circuits: a static gate list whose variable-node angles are
// expressions over earlier check-node measurement outcomes. The same object
// drives sampling, exact branch enumeration and the coherent (measurement-free)
// form.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qbp/quantum.hpp"

namespace qbp {

struct AngleNode {
  enum class Op { Leaf, Var, Check };
  Op op = Op::Leaf;
  int a = -1;
  int b = -1;
  int wire = -1;         // Check: the measured wire selecting the branch
  double leaf_cos = 1.0;
};

// DAG of overlaps. Var multiplies cosines, Check picks the branch selected by
// the outcome on its wire.
class AngleGraph {
 public:
  int leaf(double cos_theta);
  int var(int a, int b);
  int check(int a, int b, int wire);

  std::size_t size() const { return nodes_.size(); }
  const AngleNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  // Measured wires the value of `id` depends on, ascending.
  const std::vector<int>& controls(int id) const { return controls_[static_cast<std::size_t>(id)]; }

 private:
  std::vector<AngleNode> nodes_;
  std::vector<std::vector<int>> controls_;
};

// Memoised evaluation under a (partial) outcome assignment indexed by wire.
class AngleEvaluator {
 public:
  AngleEvaluator(const AngleGraph& graph, int num_wires);

  void set_outcome(int wire, int outcome);
  void clear_outcome(int wire);
  void reset();
  double cos(int id);  // throws if a needed outcome is unset

 private:
  const AngleGraph* graph_;
  std::vector<int> outcomes_;
  std::vector<double> memo_;
  std::vector<char> known_;
};

struct CircuitStep {
  GateSpec gate;
  int angle_a = -1;  // VarConv family: expressions for the two merged wires
  int angle_b = -1;
  int branch = -1;   // check measurement: index into branch_points
};

struct BranchPoint {
  std::size_t step = 0;
  int wire = 0;
  int check_node = -1;  // the Check expression this outcome resolves
};

struct DecoderCircuit {
  int num_qubits = 0;
  int root_wire = 0;
  bool coherent = false;
  AngleGraph angles;
  std::vector<CircuitStep> steps;
  std::vector<BranchPoint> branch_points;
  int root_angle = -1;
};

// Records merges on a register whose wire w initially holds |+-theta_w>.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::span<const double> wire_cos);

  int num_qubits() const { return static_cast<int>(wire_angle_.size()); }
  int angle_of(int wire) const { return wire_angle_.at(static_cast<std::size_t>(wire)); }

  void var_merge(int keep, int other);    // VarConv; `other` is left in |0>
  void check_merge(int acc, int other);   // CNOT acc->other, then Z-measure other
  void pauli_z(int wire);

  // Appends Hadamard + Z measurement on the root.
  DecoderCircuit finish(int root_wire) &&;

 private:
  DecoderCircuit circuit_;
  std::vector<int> wire_angle_;
  std::vector<char> consumed_;
};

// Drops measurements; every variable merge that depends on outcomes becomes a
// ControlledVarConv on the measured wires. With tabulate = false the tables
// are left empty (structure only, enough for gate counting); otherwise more
// than 20 controls throws TooLargeError. The root is left unmeasured.
DecoderCircuit to_coherent(const DecoderCircuit& destructive, bool tabulate = true);

struct BitEstimate {
  int bit = 0;
  std::vector<MeasurementRecord> branch_record;
  double error_probability = -1.0;  // conditional error of this run; < 0 if unknown
};

BitEstimate run_destructive(const DecoderCircuit& circuit, StateVector state, Rng& rng);

// Average error over branch patterns, assuming the input is a product of the
// modelled pure states (any codeword gives the same value).
double exact_circuit_error(const DecoderCircuit& circuit);

// Distribution of the root outcome for an arbitrary input, exact.
std::array<double, 2> destructive_outcome_distribution(const DecoderCircuit& circuit,
                                                       const StateVector& state);
std::array<double, 2> coherent_outcome_distribution(const DecoderCircuit& coherent,
                                                    const StateVector& state);

void apply_coherent(const DecoderCircuit& coherent, StateVector& state);
void apply_coherent_inverse(const DecoderCircuit& coherent, StateVector& state);

struct GateCount {
  std::size_t total = 0;
  std::array<std::size_t, 8> per_kind{};  // indexed by GateKind
};

GateCount gate_count(const DecoderCircuit& circuit);

// JSON gate list; dependent angles are listed per control pattern when tabulated.
std::string circuit_to_json(const DecoderCircuit& circuit);

}  // namespace qbp
