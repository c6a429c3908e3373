#include "qbp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "qbp/decoder.hpp"
#include "qbp/error.hpp"

namespace qbp {

namespace {

void check_bit(const FactorGraph& graph, int bit) {
  if (bit < 1 || bit > graph.n_vars) throw InvalidArgument("bit index out of range");
}

double log_sum_exp(const std::vector<double>& terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double t : terms) hi = std::max(hi, t);
  if (std::isinf(hi)) return hi;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - hi);
  return hi + std::log(s);
}

double softplus(double z) {
  if (std::isinf(z)) return z > 0 ? z : 0.0;
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

BitHypotheses bit_hypothesis_states(const FactorGraph& graph, std::span<const double> thetas, int bit) {
  check_bit(graph, bit);
  if (graph.n_vars > 10) throw TooLargeError("dense hypothesis states limited to n <= 10");
  const auto code = enumerate_codewords(graph);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << graph.n_vars);
  Eigen::MatrixXcd rho[2] = {Eigen::MatrixXcd::Zero(dim, dim), Eigen::MatrixXcd::Zero(dim, dim)};
  std::size_t count[2] = {0, 0};
  for (const auto& x : code) {
    const StateVector psi = channel_outputs(x, thetas);
    const Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(), dim);
    const int b = x[static_cast<std::size_t>(bit - 1)];
    rho[b] += v * v.adjoint();
    ++count[b];
  }
  BitHypotheses out;
  if (count[0] == 0 || count[1] == 0) {
    out.constant_bit = true;
    out.constant_value = count[0] == 0 ? 1 : 0;
    return out;
  }
  rho[0] /= static_cast<double>(count[0]);
  rho[1] /= static_cast<double>(count[1]);
  out.pair = HypothesisPair{DensityOperator(graph.n_vars, rho[0]), DensityOperator(graph.n_vars, rho[1]),
                            static_cast<double>(count[0]) / static_cast<double>(code.size())};
  return out;
}

BitHypotheses bit_hypothesis_states(const FactorGraph& graph, const PureStateChannel& w, int bit) {
  return bit_hypothesis_states(graph, uniform_angles(graph, w), bit);
}

OracleReport optimal_bit_error(const HypothesisPair& pair) {
  if (!(pair.prior0 >= 0.0 && pair.prior0 <= 1.0)) throw InvalidArgument("prior outside [0, 1]");
  if (pair.rho0.dim() != pair.rho1.dim()) throw DimensionMismatch("hypotheses differ in dimension");
  const Eigen::MatrixXcd diff = pair.prior0 * pair.rho0.matrix() - (1.0 - pair.prior0) * pair.rho1.matrix();
  OracleReport r;
  r.optimal_error = std::max(0.0, 0.5 * (1.0 - trace_norm(diff)));
  r.method = OracleReport::Method::TraceNorm;
  return r;
}

OracleReport oracle_bit_error(const FactorGraph& graph, std::span<const double> thetas, int bit) {
  check_bit(graph, bit);
  if (graph.n_vars > 12) throw TooLargeError("quantum oracle limited to n <= 12");
  if (thetas.size() != static_cast<std::size_t>(graph.n_vars)) throw DimensionMismatch("need one angle per variable");
  const auto code = enumerate_codewords(graph);
  const auto m = static_cast<Eigen::Index>(code.size());
  OracleReport r;
  r.method = OracleReport::Method::Enumeration;
  const auto b = static_cast<std::size_t>(bit - 1);
  if (std::all_of(code.begin(), code.end(), [&](const Codeword& x) { return x[b] == code.front()[b]; })) {
    r.constant_bit = true;
    return r;
  }
  // <psi_x|psi_y> = prod over differing positions of cos(theta_j).
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = i; k < m; ++k) {
      double g = 1.0;
      for (std::size_t j = 0; j < thetas.size(); ++j) {
        if (code[static_cast<std::size_t>(i)][j] != code[static_cast<std::size_t>(k)][j]) g *= std::cos(thetas[j]);
      }
      gram(i, k) = gram(k, i) = g;
    }
  }
  // p0 rho0 - p1 rho1 = Psi S Psi^dagger shares its nonzero spectrum with G^1/2 S G^1/2.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(gram);
  const Eigen::VectorXd root = ge.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd half = ge.eigenvectors() * root.asDiagonal() * ge.eigenvectors().transpose();
  Eigen::VectorXd s(m);
  for (Eigen::Index i = 0; i < m; ++i) s(i) = (code[static_cast<std::size_t>(i)][b] ? -1.0 : 1.0) / static_cast<double>(m);
  const Eigen::MatrixXd sandwich = half * s.asDiagonal() * half;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(sandwich, Eigen::EigenvaluesOnly);
  r.optimal_error = std::max(0.0, 0.5 * (1.0 - se.eigenvalues().cwiseAbs().sum()));
  return r;
}

OracleReport oracle_bit_error(const FactorGraph& graph, const PureStateChannel& w, int bit) {
  return oracle_bit_error(graph, uniform_angles(graph, w), bit);
}

double brute_posterior_classical(const FactorGraph& graph, std::span<const double> llrs, int bit) {
  check_bit(graph, bit);
  if (graph.n_vars > 20) throw TooLargeError("classical brute force limited to n <= 20");
  if (llrs.size() != static_cast<std::size_t>(graph.n_vars)) throw DimensionMismatch("need one LLR per variable");
  std::vector<double> terms[2];
  for (const auto& x : enumerate_codewords(graph)) {
    // log P(y_j | x_j) with the LLR as the only statistic: -softplus(-l) for 0, -softplus(l) for 1.
    double w = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) w -= softplus(x[j] ? llrs[j] : -llrs[j]);
    terms[x[static_cast<std::size_t>(bit - 1)]].push_back(w);
  }
  return log_sum_exp(terms[0]) - log_sum_exp(terms[1]);
}

double sequential_exact_block_error(const FactorGraph& graph, std::span<const double> thetas) {
  if (graph.n_vars > 6) throw TooLargeError("sequential enumeration limited to n <= 6");
  const SequentialDecoder dec(graph, std::vector<double>(thetas.begin(), thetas.end()));
  const auto code = enumerate_codewords(graph);
  const auto& order = dec.order();
  double error = 0.0;
  for (const auto& x : code) {
    std::function<void(std::size_t, const StateVector&, double, bool)> descend =
        [&](std::size_t k, const StateVector& psi, double weight, bool wrong) {
          if (k == order.size()) {
            if (wrong) error += weight;
            return;
          }
          const DecoderCircuit& v = dec.circuit(k);
          StateVector rotated = psi;
          apply_coherent(v, rotated);
          for (int o = 0; o < 2; ++o) {
            const double p = outcome_probability(rotated, v.root_wire, Basis::X, o);
            if (!(p > 1e-300)) continue;
            StateVector next = rotated;
            project_in_place(next, v.root_wire, Basis::X, o);
            apply_coherent_inverse(v, next);
            descend(k + 1, next, weight * p, wrong || o != x[static_cast<std::size_t>(order[k] - 1)]);
          }
        };
    descend(0, channel_outputs(x, thetas), 1.0, false);
  }
  return std::clamp(error / static_cast<double>(code.size()), 0.0, 1.0);
}

double sequential_exact_block_error(const FactorGraph& graph, const PureStateChannel& w) {
  return sequential_exact_block_error(graph, uniform_angles(graph, w));
}

}  // namespace qbp
