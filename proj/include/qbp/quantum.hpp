#pragma once

// Dense statevector / density-operator simulation for the small registers used
// by the decoders. Wire 0 is the most significant bit of a basis index.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qbp/random.hpp"

namespace qbp {

using Complex = std::complex<double>;

enum class Basis { X, Z };

constexpr std::size_t wire_bit(int num_qubits, int wire) {
  return std::size_t{1} << (num_qubits - 1 - wire);
}

class StateVector {
 public:
  explicit StateVector(int num_qubits);  // |0...0>
  StateVector(int num_qubits, std::vector<Complex> amplitudes);

  static StateVector product(std::span<const StateVector> factors);
  static StateVector random(int num_qubits, Rng& rng);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm() const;
  Complex inner(const StateVector& other) const;  // <this|other>

 private:
  int num_qubits_;
  std::vector<Complex> amplitudes_;
};

class DensityOperator {
 public:
  // Validates Hermiticity and unit trace (1e-10); positivity is checked by is_state().
  DensityOperator(int num_qubits, Eigen::MatrixXcd matrix);

  static DensityOperator from_state(const StateVector& psi);

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  bool is_state(double tol = 1e-10) const;

 private:
  int num_qubits_;
  Eigen::MatrixXcd matrix_;
};

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// |sign*theta> = cos(theta/2)|0> + sign*sin(theta/2)|1>, theta in [0, pi].
StateVector pure_state(double theta, int sign = +1);

// Two-qubit unitary that compresses |s theta> (x) |s theta'> into
// |s theta_var> (x) |0>, cos(theta_var) = cos(theta) cos(theta'). Rows and
// columns ordered |00>,|01>,|10>,|11> with the kept qubit most significant.
// A 2x2 block whose normalisation vanishes is replaced by the identity.
Eigen::Matrix4d var_conv_matrix(double theta, double theta_prime);

enum class GateKind {
  VarConv,
  Cnot,
  Hadamard,
  PauliZ,
  ControlledVarConv,
  XBasisMeasure,
  ZBasisMeasure,
  Swap,
};

const char* to_string(GateKind kind);

// Angles of a controlled variable-node merge, one entry per bit pattern of the
// control wires (bit q of the pattern is the value of controls[q]).
class ControlTable {
 public:
  ControlTable(std::vector<int> controls, std::vector<std::pair<double, double>> entries);

  const std::vector<int>& controls() const { return controls_; }
  const std::vector<std::pair<double, double>>& entries() const { return entries_; }
  const Eigen::Matrix4d& matrix(std::size_t pattern) const { return matrices_[pattern]; }

 private:
  std::vector<int> controls_;
  std::vector<std::pair<double, double>> entries_;
  std::vector<Eigen::Matrix4d> matrices_;
};

struct GateSpec {
  GateKind kind = GateKind::Hadamard;
  std::vector<int> wires;
  double theta = 0.0;        // VarConv only
  double theta_prime = 0.0;  // VarConv only
  std::shared_ptr<const ControlTable> table;  // ControlledVarConv only
};

GateSpec var_conv_gate(int keep, int other, double theta, double theta_prime);
GateSpec controlled_var_conv_gate(int keep, int other, std::shared_ptr<const ControlTable> table);
GateSpec cnot_gate(int control, int target);
GateSpec hadamard_gate(int wire);
GateSpec pauli_z_gate(int wire);
GateSpec swap_gate(int a, int b);
GateSpec measure_gate(int wire, Basis basis);

bool is_measurement(const GateSpec& gate);

// Throws DimensionMismatch if wires are out of range or not distinct.
void validate_gate(const GateSpec& gate, int num_qubits);

// Unitary gates only; measurements go through measure().
void apply_gate_in_place(StateVector& state, const GateSpec& gate, bool inverse = false);
StateVector apply_gate(StateVector state, const GateSpec& gate);

struct MeasurementRecord {
  int wire = 0;
  Basis basis = Basis::Z;
  int outcome = 0;
  double probability = 0.0;
};

// X-basis outcome 0 is |+>, outcome 1 is |->.
double outcome_probability(const StateVector& state, int wire, Basis basis, int outcome);

// Renormalised projection onto one outcome; throws InvalidArgument if that
// outcome has zero probability.
void project_in_place(StateVector& state, int wire, Basis basis, int outcome);

// Samples an outcome with uniform_draw in [0,1): outcome 0 iff draw < p0.
MeasurementRecord measure_in_place(StateVector& state, int wire, Basis basis, double uniform_draw);
std::pair<MeasurementRecord, StateVector> measure(StateVector state, int wire, Basis basis,
                                                  double uniform_draw);

// Keeps `keep` (ascending order in the result); traces out everything else.
DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep);

struct EigenDecomposition {
  Eigen::VectorXd values;    // descending
  Eigen::MatrixXcd vectors;  // column i belongs to values[i]
};

EigenDecomposition hermitian_eig(const Eigen::MatrixXcd& a, double hermitian_tol = 1e-10);

// Entropy in bits; eigenvalues below 1e-15 contribute nothing.
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Eigen::MatrixXcd& a);

}  // namespace qbp
