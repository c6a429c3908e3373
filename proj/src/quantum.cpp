#include "qbp/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qbp/error.hpp"

namespace qbp {

namespace {

constexpr double kNormTol = 1e-10;

void check_wire(int wire, int num_qubits) {
  if (wire < 0 || wire >= num_qubits) {
    throw DimensionMismatch("wire " + std::to_string(wire) + " outside register of " +
                            std::to_string(num_qubits) + " qubits");
  }
}

// Applies a real 4x4 matrix to the (first, second) wire pair; first is the
// most significant bit of the local index.
void apply_two_qubit(std::span<Complex> amps, int n, int first, int second, const Eigen::Matrix4d& m) {
  const std::size_t b1 = wire_bit(n, first);
  const std::size_t b2 = wire_bit(n, second);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & (b1 | b2)) continue;
    const std::size_t idx[4] = {i, i | b2, i | b1, i | b1 | b2};
    Complex in[4];
    for (int k = 0; k < 4; ++k) in[k] = amps[idx[k]];
    for (int r = 0; r < 4; ++r) {
      amps[idx[r]] = m(r, 0) * in[0] + m(r, 1) * in[1] + m(r, 2) * in[2] + m(r, 3) * in[3];
    }
  }
}

Eigen::Matrix4d embed_blocks(double a_plus, double a_minus, double b_plus, double b_minus) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = a_plus;
  m(0, 3) = a_minus;
  m(1, 0) = a_minus;
  m(1, 3) = -a_plus;
  m(2, 1) = b_plus;
  m(2, 2) = b_minus;
  m(3, 1) = b_minus;
  m(3, 2) = -b_plus;
  return m;
}

}  // namespace

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 0 || num_qubits > 26) throw InvalidArgument("unsupported qubit count");
  amplitudes_.assign(std::size_t{1} << num_qubits, Complex{});
  amplitudes_[0] = 1.0;
}

StateVector::StateVector(int num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
  if (num_qubits < 0 || num_qubits > 26) throw InvalidArgument("unsupported qubit count");
  if (amplitudes_.size() != (std::size_t{1} << num_qubits)) {
    throw DimensionMismatch("amplitude count does not match 2^num_qubits");
  }
  for (const auto& a : amplitudes_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw InvalidArgument("non-finite amplitude");
    }
  }
  if (std::abs(norm() - 1.0) > kNormTol) throw InvalidArgument("state is not normalised");
}

StateVector StateVector::product(std::span<const StateVector> factors) {
  std::vector<Complex> amps{1.0};
  int n = 0;
  for (const auto& f : factors) {
    std::vector<Complex> next(amps.size() * f.dim());
    for (std::size_t i = 0; i < amps.size(); ++i) {
      for (std::size_t j = 0; j < f.dim(); ++j) next[i * f.dim() + j] = amps[i] * f[j];
    }
    amps = std::move(next);
    n += f.num_qubits();
  }
  return StateVector(n, std::move(amps));
}

StateVector StateVector::random(int num_qubits, Rng& rng) {
  std::normal_distribution<double> gauss;
  std::vector<Complex> amps(std::size_t{1} << num_qubits);
  double total = 0.0;
  for (auto& a : amps) {
    a = Complex(gauss(rng), gauss(rng));
    total += std::norm(a);
  }
  const double scale = 1.0 / std::sqrt(total);
  for (auto& a : amps) a *= scale;
  return StateVector(num_qubits, std::move(amps));
}

double StateVector::norm() const {
  double total = 0.0;
  for (const auto& a : amplitudes_) total += std::norm(a);
  return std::sqrt(total);
}

Complex StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("inner product of different registers");
  Complex total{};
  for (std::size_t i = 0; i < dim(); ++i) total += std::conj(amplitudes_[i]) * other.amplitudes_[i];
  return total;
}

DensityOperator::DensityOperator(int num_qubits, Eigen::MatrixXcd matrix)
    : num_qubits_(num_qubits), matrix_(std::move(matrix)) {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw DimensionMismatch("density operator dimension does not match 2^num_qubits");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kNormTol) {
    throw InvalidArgument("density operator is not Hermitian");
  }
  if (std::abs(matrix_.trace() - Complex(1.0)) > kNormTol) {
    throw InvalidArgument("density operator does not have unit trace");
  }
}

DensityOperator DensityOperator::from_state(const StateVector& psi) {
  Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(), static_cast<Eigen::Index>(psi.dim()));
  return DensityOperator(psi.num_qubits(), v * v.adjoint());
}

bool DensityOperator::is_state(double tol) const {
  const auto eig = hermitian_eig(matrix_, tol);
  return eig.values.minCoeff() >= -tol;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  const Eigen::Index da = a.dim(), db = b.dim();
  Eigen::MatrixXcd m(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) m.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  }
  return DensityOperator(a.num_qubits() + b.num_qubits(), std::move(m));
}

StateVector pure_state(double theta, int sign) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw InvalidArgument("angle outside [0, pi]");
  if (sign != 1 && sign != -1) throw InvalidArgument("sign must be +1 or -1");
  return StateVector(1, {std::cos(theta / 2), sign * std::sin(theta / 2)});
}

Eigen::Matrix4d var_conv_matrix(double theta, double theta_prime) {
  const double half_diff = (theta - theta_prime) / 2;
  const double half_sum = (theta + theta_prime) / 2;
  // Unnormalised coefficients; their norms are sqrt(2(1 +- cos t cos t')).
  double a_plus = std::cos(half_diff) + std::cos(half_sum);
  double a_minus = std::cos(half_diff) - std::cos(half_sum);
  double b_plus = std::sin(half_sum) - std::sin(half_diff);
  double b_minus = std::sin(half_sum) + std::sin(half_diff);

  const double a_norm = std::hypot(a_plus, a_minus);
  const double b_norm = std::hypot(b_plus, b_minus);
  constexpr double kDegenerate = 1e-150;
  Eigen::Matrix4d m = embed_blocks(a_plus / a_norm, a_minus / a_norm, b_plus / b_norm, b_minus / b_norm);
  if (!(a_norm > kDegenerate)) {
    m.row(0).setZero();
    m.row(1).setZero();
    m(0, 0) = 1.0;
    m(1, 3) = 1.0;
  }
  if (!(b_norm > kDegenerate)) {
    m.row(2).setZero();
    m.row(3).setZero();
    m(2, 1) = 1.0;
    m(3, 2) = 1.0;
  }
  return m;
}

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::VarConv: return "VarConv";
    case GateKind::Cnot: return "Cnot";
    case GateKind::Hadamard: return "Hadamard";
    case GateKind::PauliZ: return "PauliZ";
    case GateKind::ControlledVarConv: return "ControlledVarConv";
    case GateKind::XBasisMeasure: return "XBasisMeasure";
    case GateKind::ZBasisMeasure: return "ZBasisMeasure";
    case GateKind::Swap: return "Swap";
  }
  return "?";
}

ControlTable::ControlTable(std::vector<int> controls, std::vector<std::pair<double, double>> entries)
    : controls_(std::move(controls)), entries_(std::move(entries)) {
  if (controls_.size() > 20) throw TooLargeError("control table limited to 20 control wires");
  if (entries_.size() != (std::size_t{1} << controls_.size())) {
    throw InvalidArgument("control table needs one entry per control pattern");
  }
  matrices_.reserve(entries_.size());
  for (const auto& [t, tp] : entries_) matrices_.push_back(var_conv_matrix(t, tp));
}

GateSpec var_conv_gate(int keep, int other, double theta, double theta_prime) {
  return GateSpec{GateKind::VarConv, {keep, other}, theta, theta_prime, nullptr};
}

GateSpec controlled_var_conv_gate(int keep, int other, std::shared_ptr<const ControlTable> table) {
  return GateSpec{GateKind::ControlledVarConv, {keep, other}, 0.0, 0.0, std::move(table)};
}

namespace {
GateSpec plain_gate(GateKind kind, std::vector<int> wires) {
  GateSpec g;
  g.kind = kind;
  g.wires = std::move(wires);
  return g;
}
}  // namespace

GateSpec cnot_gate(int control, int target) { return plain_gate(GateKind::Cnot, {control, target}); }
GateSpec hadamard_gate(int wire) { return plain_gate(GateKind::Hadamard, {wire}); }
GateSpec pauli_z_gate(int wire) { return plain_gate(GateKind::PauliZ, {wire}); }
GateSpec swap_gate(int a, int b) { return plain_gate(GateKind::Swap, {a, b}); }

GateSpec measure_gate(int wire, Basis basis) {
  return plain_gate(basis == Basis::X ? GateKind::XBasisMeasure : GateKind::ZBasisMeasure, {wire});
}

bool is_measurement(const GateSpec& gate) {
  return gate.kind == GateKind::XBasisMeasure || gate.kind == GateKind::ZBasisMeasure;
}

void validate_gate(const GateSpec& gate, int num_qubits) {
  std::size_t arity = 1;
  switch (gate.kind) {
    case GateKind::VarConv:
    case GateKind::Cnot:
    case GateKind::Swap:
    case GateKind::ControlledVarConv: arity = 2; break;
    default: break;
  }
  if (gate.wires.size() != arity) throw DimensionMismatch(std::string(to_string(gate.kind)) + ": wrong wire count");
  std::vector<int> all = gate.wires;
  if (gate.kind == GateKind::ControlledVarConv) {
    if (!gate.table) throw InvalidArgument("controlled gate without control table");
    all.insert(all.end(), gate.table->controls().begin(), gate.table->controls().end());
  }
  for (int w : all) check_wire(w, num_qubits);
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw DimensionMismatch(std::string(to_string(gate.kind)) + ": wires must be distinct");
  }
}

void apply_gate_in_place(StateVector& state, const GateSpec& gate, bool inverse) {
  const int n = state.num_qubits();
  validate_gate(gate, n);
  auto amps = state.amplitudes();
  switch (gate.kind) {
    case GateKind::VarConv: {
      Eigen::Matrix4d m = var_conv_matrix(gate.theta, gate.theta_prime);
      if (inverse) m.transposeInPlace();
      apply_two_qubit(amps, n, gate.wires[0], gate.wires[1], m);
      break;
    }
    case GateKind::ControlledVarConv: {
      const auto& table = *gate.table;
      const std::size_t b1 = wire_bit(n, gate.wires[0]);
      const std::size_t b2 = wire_bit(n, gate.wires[1]);
      std::vector<std::size_t> control_bits;
      for (int c : table.controls()) control_bits.push_back(wire_bit(n, c));
      for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & (b1 | b2)) continue;
        std::size_t pattern = 0;
        for (std::size_t q = 0; q < control_bits.size(); ++q) {
          if (i & control_bits[q]) pattern |= std::size_t{1} << q;
        }
        const Eigen::Matrix4d& m = table.matrix(pattern);
        const std::size_t idx[4] = {i, i | b2, i | b1, i | b1 | b2};
        Complex in[4];
        for (int k = 0; k < 4; ++k) in[k] = amps[idx[k]];
        for (int r = 0; r < 4; ++r) {
          Complex out{};
          for (int c = 0; c < 4; ++c) out += (inverse ? m(c, r) : m(r, c)) * in[c];
          amps[idx[r]] = out;
        }
      }
      break;
    }
    case GateKind::Cnot: {
      const std::size_t bc = wire_bit(n, gate.wires[0]);
      const std::size_t bt = wire_bit(n, gate.wires[1]);
      for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & bc) && !(i & bt)) std::swap(amps[i], amps[i | bt]);
      }
      break;
    }
    case GateKind::Swap: {
      const std::size_t ba = wire_bit(n, gate.wires[0]);
      const std::size_t bb = wire_bit(n, gate.wires[1]);
      for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & ba) && !(i & bb)) std::swap(amps[i], amps[(i & ~ba) | bb]);
      }
      break;
    }
    case GateKind::Hadamard: {
      const std::size_t b = wire_bit(n, gate.wires[0]);
      const double s = 1.0 / std::numbers::sqrt2;
      for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & b) continue;
        const Complex a0 = amps[i], a1 = amps[i | b];
        amps[i] = s * (a0 + a1);
        amps[i | b] = s * (a0 - a1);
      }
      break;
    }
    case GateKind::PauliZ: {
      const std::size_t b = wire_bit(n, gate.wires[0]);
      for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & b) amps[i] = -amps[i];
      }
      break;
    }
    case GateKind::XBasisMeasure:
    case GateKind::ZBasisMeasure:
      throw InvalidArgument("measurements are not unitary gates; use measure()");
  }
}

StateVector apply_gate(StateVector state, const GateSpec& gate) {
  apply_gate_in_place(state, gate);
  return state;
}

double outcome_probability(const StateVector& state, int wire, Basis basis, int outcome) {
  check_wire(wire, state.num_qubits());
  if (outcome != 0 && outcome != 1) throw InvalidArgument("outcome must be 0 or 1");
  const std::size_t b = wire_bit(state.num_qubits(), wire);
  const auto amps = state.amplitudes();
  double p = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & b) continue;
    if (basis == Basis::Z) {
      p += std::norm(outcome == 0 ? amps[i] : amps[i | b]);
    } else {
      p += 0.5 * std::norm(outcome == 0 ? amps[i] + amps[i | b] : amps[i] - amps[i | b]);
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

void project_in_place(StateVector& state, int wire, Basis basis, int outcome) {
  const double p = outcome_probability(state, wire, basis, outcome);
  if (!(p > 0.0)) throw InvalidArgument("projection onto a zero-probability outcome");
  const std::size_t b = wire_bit(state.num_qubits(), wire);
  const double scale = 1.0 / std::sqrt(p);
  auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & b) continue;
    if (basis == Basis::Z) {
      amps[outcome == 0 ? i | b : i] = 0.0;
      amps[outcome == 0 ? i : i | b] *= scale;
    } else {
      // Component along |+> or |->, written back in the computational basis.
      const Complex c = (outcome == 0 ? amps[i] + amps[i | b] : amps[i] - amps[i | b]) * 0.5 * scale;
      amps[i] = c;
      amps[i | b] = outcome == 0 ? c : -c;
    }
  }
}

MeasurementRecord measure_in_place(StateVector& state, int wire, Basis basis, double uniform_draw) {
  const double p0 = outcome_probability(state, wire, basis, 0);
  const int outcome = uniform_draw < p0 ? 0 : 1;
  const double p = outcome == 0 ? p0 : 1.0 - p0;
  project_in_place(state, wire, basis, outcome);
  return MeasurementRecord{wire, basis, outcome, p};
}

std::pair<MeasurementRecord, StateVector> measure(StateVector state, int wire, Basis basis,
                                                  double uniform_draw) {
  auto record = measure_in_place(state, wire, basis, uniform_draw);
  return {record, std::move(state)};
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep) {
  const int n = rho.num_qubits();
  if (keep.empty()) throw InvalidArgument("partial trace must keep at least one wire");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw InvalidArgument("duplicate wire in keep set");
  }
  for (int w : kept) check_wire(w, n);
  std::vector<int> traced;
  for (int w = 0; w < n; ++w) {
    if (!std::binary_search(kept.begin(), kept.end(), w)) traced.push_back(w);
  }
  const int nk = static_cast<int>(kept.size());
  auto compose = [&](std::size_t kept_index, std::size_t traced_index) {
    std::size_t full = 0;
    for (int q = 0; q < nk; ++q) {
      if (kept_index & wire_bit(nk, q)) full |= wire_bit(n, kept[q]);
    }
    const int nt = static_cast<int>(traced.size());
    for (int q = 0; q < nt; ++q) {
      if (traced_index & wire_bit(nt, q)) full |= wire_bit(n, traced[q]);
    }
    return static_cast<Eigen::Index>(full);
  };
  const std::size_t dk = std::size_t{1} << nk;
  const std::size_t dt = std::size_t{1} << traced.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t i = 0; i < dk; ++i) {
    for (std::size_t j = 0; j < dk; ++j) {
      Complex s{};
      for (std::size_t t = 0; t < dt; ++t) s += rho.matrix()(compose(i, t), compose(j, t));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    }
  }
  return DensityOperator(nk, std::move(out));
}

EigenDecomposition hermitian_eig(const Eigen::MatrixXcd& a, double hermitian_tol) {
  if (a.rows() != a.cols()) throw DimensionMismatch("eigendecomposition of a non-square matrix");
  if (a.size() > 0 && (a - a.adjoint()).cwiseAbs().maxCoeff() > hermitian_tol) {
    throw InvalidArgument("matrix is not Hermitian");
  }
  const Eigen::MatrixXcd sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  // Eigen returns ascending order.
  const Eigen::Index d = a.rows();
  EigenDecomposition out{Eigen::VectorXd(d), Eigen::MatrixXcd(d, d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    out.values(i) = solver.eigenvalues()(d - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  return out;
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  const auto eig = hermitian_eig(rho);
  double h = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double l = eig.values(i);
    if (l > 1e-15) h -= l * std::log2(l);
  }
  return h;
}

double trace_norm(const Eigen::MatrixXcd& a) {
  return hermitian_eig(a).values.cwiseAbs().sum();
}

}  // namespace qbp
