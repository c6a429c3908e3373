#include "qbp/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <json.hpp>

#include "qbp/channel.hpp"
#include "qbp/error.hpp"

namespace qbp {

namespace {

constexpr int kMaxControls = 20;

double angle_from_cos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

double root_error(double c) { return 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - c * c))); }

std::vector<int> merged(const std::vector<int>& x, const std::vector<int>& y) {
  std::vector<int> out;
  std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

}  // namespace

int AngleGraph::leaf(double cos_theta) {
  AngleNode n;
  n.leaf_cos = std::clamp(cos_theta, -1.0, 1.0);
  nodes_.push_back(n);
  controls_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

int AngleGraph::var(int a, int b) {
  AngleNode n;
  n.op = AngleNode::Op::Var;
  n.a = a;
  n.b = b;
  nodes_.push_back(n);
  controls_.push_back(merged(controls(a), controls(b)));
  return static_cast<int>(nodes_.size()) - 1;
}

int AngleGraph::check(int a, int b, int wire) {
  AngleNode n;
  n.op = AngleNode::Op::Check;
  n.a = a;
  n.b = b;
  n.wire = wire;
  nodes_.push_back(n);
  controls_.push_back(merged(merged(controls(a), controls(b)), {wire}));
  return static_cast<int>(nodes_.size()) - 1;
}

AngleEvaluator::AngleEvaluator(const AngleGraph& graph, int num_wires)
    : graph_(&graph),
      outcomes_(static_cast<std::size_t>(num_wires), -1),
      memo_(graph.size(), 0.0),
      known_(graph.size(), 0) {}

void AngleEvaluator::set_outcome(int wire, int outcome) {
  outcomes_.at(static_cast<std::size_t>(wire)) = outcome;
  // Only nodes depending on this wire change; drop them.
  for (std::size_t id = 0; id < known_.size(); ++id) {
    const auto& c = graph_->controls(static_cast<int>(id));
    if (known_[id] && std::binary_search(c.begin(), c.end(), wire)) known_[id] = 0;
  }
}

void AngleEvaluator::clear_outcome(int wire) { set_outcome(wire, -1); }

void AngleEvaluator::reset() {
  std::fill(outcomes_.begin(), outcomes_.end(), -1);
  std::fill(known_.begin(), known_.end(), 0);
}

double AngleEvaluator::cos(int id) {
  const auto k = static_cast<std::size_t>(id);
  if (known_.at(k)) return memo_[k];
  const AngleNode& n = graph_->node(id);
  double value = n.leaf_cos;
  switch (n.op) {
    case AngleNode::Op::Leaf: break;
    case AngleNode::Op::Var: value = cos(n.a) * cos(n.b); break;
    case AngleNode::Op::Check: {
      const int j = outcomes_[static_cast<std::size_t>(n.wire)];
      if (j < 0) throw InvalidArgument("angle depends on an unmeasured wire");
      value = check_branch_cos(cos(n.a), cos(n.b), j);
      break;
    }
  }
  memo_[k] = value;
  known_[k] = 1;
  return value;
}

CircuitBuilder::CircuitBuilder(std::span<const double> wire_cos) {
  circuit_.num_qubits = static_cast<int>(wire_cos.size());
  for (double c : wire_cos) wire_angle_.push_back(circuit_.angles.leaf(c));
  consumed_.assign(wire_cos.size(), 0);
}

void CircuitBuilder::var_merge(int keep, int other) {
  const int a = angle_of(keep), b = angle_of(other);
  if (consumed_[static_cast<std::size_t>(keep)] || consumed_[static_cast<std::size_t>(other)]) {
    throw InvalidArgument("merge reads a consumed wire");
  }
  CircuitStep step;
  step.angle_a = a;
  step.angle_b = b;
  step.gate = var_conv_gate(keep, other, 0.0, 0.0);
  const auto& ca = circuit_.angles;
  if (ca.controls(a).empty() && ca.controls(b).empty()) {
    AngleEvaluator eval(ca, num_qubits());
    step.gate.theta = angle_from_cos(eval.cos(a));
    step.gate.theta_prime = angle_from_cos(eval.cos(b));
  }
  circuit_.steps.push_back(step);
  wire_angle_[static_cast<std::size_t>(keep)] = circuit_.angles.var(a, b);
  consumed_[static_cast<std::size_t>(other)] = 1;
}

void CircuitBuilder::check_merge(int acc, int other) {
  if (consumed_[static_cast<std::size_t>(acc)] || consumed_[static_cast<std::size_t>(other)]) {
    throw InvalidArgument("merge reads a consumed wire");
  }
  const int a = angle_of(acc), b = angle_of(other);
  circuit_.steps.push_back(CircuitStep{cnot_gate(acc, other)});
  const int node = circuit_.angles.check(a, b, other);
  CircuitStep m{measure_gate(other, Basis::Z)};
  m.branch = static_cast<int>(circuit_.branch_points.size());
  circuit_.branch_points.push_back(BranchPoint{circuit_.steps.size(), other, node});
  circuit_.steps.push_back(m);
  wire_angle_[static_cast<std::size_t>(acc)] = node;
  consumed_[static_cast<std::size_t>(other)] = 1;
}

void CircuitBuilder::pauli_z(int wire) { circuit_.steps.push_back(CircuitStep{pauli_z_gate(wire)}); }

DecoderCircuit CircuitBuilder::finish(int root_wire) && {
  circuit_.root_wire = root_wire;
  circuit_.root_angle = angle_of(root_wire);
  circuit_.steps.push_back(CircuitStep{hadamard_gate(root_wire)});
  circuit_.steps.push_back(CircuitStep{measure_gate(root_wire, Basis::Z)});
  return std::move(circuit_);
}

DecoderCircuit to_coherent(const DecoderCircuit& destructive, bool tabulate) {
  if (destructive.coherent) throw InvalidArgument("circuit is already coherent");
  DecoderCircuit out;
  out.num_qubits = destructive.num_qubits;
  out.root_wire = destructive.root_wire;
  out.coherent = true;
  out.angles = destructive.angles;
  out.root_angle = destructive.root_angle;

  // The trailing Hadamard + root measurement belong to the caller.
  const std::size_t body = destructive.steps.size() - 2;
  for (std::size_t s = 0; s < body; ++s) {
    const CircuitStep& step = destructive.steps[s];
    if (is_measurement(step.gate)) continue;
    if (step.gate.kind != GateKind::VarConv) {
      out.steps.push_back(step);
      continue;
    }
    const auto controls = merged(out.angles.controls(step.angle_a), out.angles.controls(step.angle_b));
    if (controls.empty()) {
      out.steps.push_back(step);
      continue;
    }
    CircuitStep c = step;
    c.gate.kind = GateKind::ControlledVarConv;
    if (tabulate) {
      if (static_cast<int>(controls.size()) > kMaxControls) {
        throw TooLargeError("controlled merge needs " + std::to_string(controls.size()) +
                            " controls; tables are capped at 20");
      }
      std::vector<std::pair<double, double>> entries;
      entries.reserve(std::size_t{1} << controls.size());
      AngleEvaluator eval(out.angles, out.num_qubits);
      for (std::size_t pattern = 0; pattern < (std::size_t{1} << controls.size()); ++pattern) {
        for (std::size_t q = 0; q < controls.size(); ++q) {
          eval.set_outcome(controls[q], static_cast<int>((pattern >> q) & 1));
        }
        entries.emplace_back(angle_from_cos(eval.cos(step.angle_a)), angle_from_cos(eval.cos(step.angle_b)));
      }
      c.gate.table = std::make_shared<ControlTable>(controls, std::move(entries));
    } else {
      // Structure only: the control list without angles.
      c.gate.wires.insert(c.gate.wires.end(), controls.begin(), controls.end());
    }
    out.steps.push_back(std::move(c));
  }
  return out;
}

BitEstimate run_destructive(const DecoderCircuit& circuit, StateVector state, Rng& rng) {
  if (circuit.coherent) throw InvalidArgument("run_destructive needs a destructive circuit");
  if (state.num_qubits() != circuit.num_qubits) throw DimensionMismatch("input width does not match circuit");
  AngleEvaluator eval(circuit.angles, circuit.num_qubits);
  BitEstimate est;
  for (std::size_t s = 0; s < circuit.steps.size(); ++s) {
    const CircuitStep& step = circuit.steps[s];
    if (step.gate.kind == GateKind::VarConv) {
      GateSpec g = step.gate;
      g.theta = angle_from_cos(eval.cos(step.angle_a));
      g.theta_prime = angle_from_cos(eval.cos(step.angle_b));
      apply_gate_in_place(state, g);
    } else if (is_measurement(step.gate)) {
      const int wire = step.gate.wires[0];
      const MeasurementRecord rec = measure_in_place(state, wire, Basis::Z, uniform01(rng));
      if (step.branch >= 0) {
        est.branch_record.push_back(rec);
        eval.set_outcome(wire, rec.outcome);
      } else {
        est.bit = rec.outcome;
      }
    } else {
      apply_gate_in_place(state, step.gate);
    }
  }
  est.error_probability = root_error(eval.cos(circuit.root_angle));
  return est;
}

double exact_circuit_error(const DecoderCircuit& circuit) {
  const auto& bps = circuit.branch_points;
  if (bps.size() > static_cast<std::size_t>(kMaxControls)) {
    throw TooLargeError("exact enumeration limited to 20 check measurements");
  }
  AngleEvaluator eval(circuit.angles, circuit.num_qubits);
  std::function<double(std::size_t)> descend = [&](std::size_t b) -> double {
    if (b == bps.size()) return root_error(eval.cos(circuit.root_angle));
    const AngleNode& node = circuit.angles.node(bps[b].check_node);
    const double prod = eval.cos(node.a) * eval.cos(node.b);
    double total = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double p = 0.5 * (1.0 + (j == 0 ? prod : -prod));
      if (!(p > 0.0)) continue;
      eval.set_outcome(bps[b].wire, j);
      total += p * descend(b + 1);
    }
    eval.clear_outcome(bps[b].wire);
    return total;
  };
  return descend(0);
}

std::array<double, 2> destructive_outcome_distribution(const DecoderCircuit& circuit, const StateVector& state) {
  if (circuit.coherent) throw InvalidArgument("needs a destructive circuit");
  if (state.num_qubits() != circuit.num_qubits) throw DimensionMismatch("input width does not match circuit");
  std::array<double, 2> dist{0.0, 0.0};
  AngleEvaluator eval(circuit.angles, circuit.num_qubits);
  std::function<void(std::size_t, StateVector, double)> run = [&](std::size_t s, StateVector psi, double weight) {
    for (; s < circuit.steps.size(); ++s) {
      const CircuitStep& step = circuit.steps[s];
      if (step.gate.kind == GateKind::VarConv) {
        GateSpec g = step.gate;
        g.theta = angle_from_cos(eval.cos(step.angle_a));
        g.theta_prime = angle_from_cos(eval.cos(step.angle_b));
        apply_gate_in_place(psi, g);
      } else if (is_measurement(step.gate)) {
        const int wire = step.gate.wires[0];
        if (step.branch < 0) {
          for (int j = 0; j < 2; ++j) dist[static_cast<std::size_t>(j)] += weight * outcome_probability(psi, wire, Basis::Z, j);
          return;
        }
        for (int j = 0; j < 2; ++j) {
          const double p = outcome_probability(psi, wire, Basis::Z, j);
          if (!(p > 1e-300)) continue;
          StateVector branch = psi;
          project_in_place(branch, wire, Basis::Z, j);
          eval.set_outcome(wire, j);
          run(s + 1, std::move(branch), weight * p);
        }
        eval.clear_outcome(wire);
        return;
      } else {
        apply_gate_in_place(psi, step.gate);
      }
    }
  };
  run(0, state, 1.0);
  return dist;
}

void apply_coherent(const DecoderCircuit& coherent, StateVector& state) {
  if (!coherent.coherent) throw InvalidArgument("needs a coherent circuit");
  if (state.num_qubits() != coherent.num_qubits) throw DimensionMismatch("input width does not match circuit");
  for (const auto& step : coherent.steps) apply_gate_in_place(state, step.gate);
}

void apply_coherent_inverse(const DecoderCircuit& coherent, StateVector& state) {
  if (!coherent.coherent) throw InvalidArgument("needs a coherent circuit");
  if (state.num_qubits() != coherent.num_qubits) throw DimensionMismatch("input width does not match circuit");
  for (auto it = coherent.steps.rbegin(); it != coherent.steps.rend(); ++it) {
    apply_gate_in_place(state, it->gate, /*inverse=*/true);
  }
}

std::array<double, 2> coherent_outcome_distribution(const DecoderCircuit& coherent, const StateVector& state) {
  StateVector psi = state;
  apply_coherent(coherent, psi);
  const double p0 = outcome_probability(psi, coherent.root_wire, Basis::X, 0);
  return {p0, outcome_probability(psi, coherent.root_wire, Basis::X, 1)};
}

GateCount gate_count(const DecoderCircuit& circuit) {
  GateCount count;
  for (const auto& step : circuit.steps) {
    ++count.total;
    ++count.per_kind[static_cast<std::size_t>(step.gate.kind)];
  }
  return count;
}

std::string circuit_to_json(const DecoderCircuit& circuit) {
  using nlohmann::json;
  AngleEvaluator eval(circuit.angles, circuit.num_qubits);
  json gates = json::array();
  for (const auto& step : circuit.steps) {
    json g;
    g["kind"] = to_string(step.gate.kind);
    g["wires"] = step.gate.wires;
    if (step.gate.kind == GateKind::VarConv && step.angle_a >= 0) {
      if (circuit.angles.controls(step.angle_a).empty() && circuit.angles.controls(step.angle_b).empty()) {
        g["theta"] = step.gate.theta;
        g["theta_prime"] = step.gate.theta_prime;
      } else {
        g["depends_on"] = merged(circuit.angles.controls(step.angle_a), circuit.angles.controls(step.angle_b));
      }
    }
    if (step.gate.kind == GateKind::ControlledVarConv && step.gate.table) {
      g["controls"] = step.gate.table->controls();
      json entries = json::array();
      for (const auto& [t, tp] : step.gate.table->entries()) entries.push_back({t, tp});
      g["table"] = entries;
    }
    gates.push_back(g);
  }
  json doc;
  doc["num_qubits"] = circuit.num_qubits;
  doc["root_wire"] = circuit.root_wire;
  doc["coherent"] = circuit.coherent;
  doc["gates"] = gates;
  return doc.dump(2);
}

}  // namespace qbp
