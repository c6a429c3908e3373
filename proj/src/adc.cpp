#include "qbp/adc.hpp"

#include <algorithm>
#include <cmath>

#include "qbp/channel.hpp"
#include <unsupported/Eigen/KroneckerProduct>

#include "qbp/error.hpp"

namespace qbp {

namespace {

double entropy_bits(std::initializer_list<double> probs) {
  double h = 0.0;
  for (double q : probs) {
    if (q > 0.0) h -= q * std::log2(q);
  }
  return h;
}

Eigen::MatrixXcd embed(const Eigen::Matrix4d& m) { return m.cast<Complex>(); }

}  // namespace

void validate_params(const AdcParams& params) {
  if (!(params.gamma >= 0.0 && params.gamma <= 1.0)) throw InvalidArgument("gamma outside [0, 1]");
  if (!(params.p >= 0.0 && params.p <= 1.0)) throw InvalidArgument("p outside [0, 1]");
}

std::array<Eigen::Matrix2d, 2> adc_kraus(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma outside [0, 1]");
  Eigen::Matrix2d k0, k1;
  k0 << 1.0, 0.0, 0.0, std::sqrt(1.0 - gamma);
  k1 << 0.0, std::sqrt(gamma), 0.0, 0.0;
  return {k0, k1};
}

AmplitudeStats amplitude_stats(const AdcParams& params) {
  validate_params(params);
  const double g = params.gamma, p = params.p;
  AmplitudeStats s;
  s.joint[0][0] = p;
  s.joint[0][1] = 0.0;
  s.joint[1][0] = (1.0 - p) * g;
  s.joint[1][1] = (1.0 - p) * (1.0 - g);
  const double h_zb = entropy_bits({s.joint[0][0], s.joint[0][1], s.joint[1][0], s.joint[1][1]});
  const double h_b = entropy_bits({s.joint[0][0] + s.joint[1][0], s.joint[0][1] + s.joint[1][1]});
  s.H_Z_given_B = std::max(0.0, h_zb - h_b);
  return s;
}

CqJointState psi_zb(const AdcParams& params) {
  validate_params(params);
  const auto k = adc_kraus(params.gamma);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int z = 0; z < 2; ++z) {
    Eigen::Matrix2d in = Eigen::Matrix2d::Zero();
    in(z, z) = 1.0;
    const Eigen::Matrix2d out = k[0] * in * k[0].transpose() + k[1] * in * k[1].transpose();
    m.block<2, 2>(2 * z, 2 * z) = (z == 0 ? params.p : 1.0 - params.p) * out;
  }
  return {CqJointState::Label::PsiZB, DensityOperator(2, embed(m))};
}

std::array<DensityOperator, 2> phase_states(const AdcParams& params) {
  validate_params(params);
  const auto k = adc_kraus(params.gamma);
  Eigen::Vector4d phi = Eigen::Vector4d::Zero();
  phi(0) = std::sqrt(params.p);
  phi(3) = std::sqrt(1.0 - params.p);
  Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
  for (const auto& kk : k) {
    const Eigen::Matrix4d op = Eigen::kroneckerProduct(Eigen::Matrix2d::Identity(), kk);
    const Eigen::Vector4d v = op * phi;
    rho += v * v.transpose();
  }
  Eigen::Matrix4d z_a = Eigen::Matrix4d::Identity();
  z_a(2, 2) = z_a(3, 3) = -1.0;
  const Eigen::Matrix4d rho1 = z_a * rho * z_a;
  return {DensityOperator(2, embed(rho)), DensityOperator(2, embed(rho1))};
}

CqJointState xi_xba(const AdcParams& params) {
  const auto phi = phase_states(params);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8, 8);
  m.block(0, 0, 4, 4) = 0.5 * phi[0].matrix();
  m.block(4, 4, 4, 4) = 0.5 * phi[1].matrix();
  return {CqJointState::Label::XiXBA, DensityOperator(3, m)};
}

PhaseReduction phase_reduce(const AdcParams& params) {
  validate_params(params);
  const double g = params.gamma, p = params.p;
  PhaseReduction r;
  // 1 - gamma(1-p) and 1 - 2p - gamma(1-p), regrouped so neither cancels near gamma = 1.
  const double kept = (1.0 - p) * (1.0 - g);
  r.q0 = p + kept;
  r.degenerate = !(r.q0 > 0.0);
  r.cos_theta0 = r.degenerate ? 1.0 : std::clamp((kept - p) / r.q0, -1.0, 1.0);
  r.theta0 = std::acos(r.cos_theta0);

  // CNOT with A' (wire 0) as control, B as target.
  Eigen::Matrix4d cnot = Eigen::Matrix4d::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  Eigen::Matrix2d x;
  x << 0.0, 1.0, 1.0, 0.0;
  const auto phi = phase_states(params);
  for (int s = 0; s < 2; ++s) {
    const Eigen::MatrixXcd direct = embed(cnot) * phi[static_cast<std::size_t>(s)].matrix() * embed(cnot);
    Eigen::Vector2d a = Eigen::Vector2d::Zero();
    if (!r.degenerate) {
      // cos^2(theta0/2) = kept/q0 and sin^2(theta0/2) = p/q0.
      a(0) = std::sqrt(kept / r.q0);
      a(1) = (s == 0 ? 1.0 : -1.0) * std::sqrt(p / r.q0);
      a = x * a;
    }
    Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
    const Eigen::Matrix2d pa = a * a.transpose();
    // |a><a| (x) |0><0| occupies rows/cols {00, 10}; |11><11| the last entry.
    expected(0, 0) = r.q0 * pa(0, 0);
    expected(0, 2) = r.q0 * pa(0, 1);
    expected(2, 0) = r.q0 * pa(1, 0);
    expected(2, 2) = r.q0 * pa(1, 1);
    expected(3, 3) = 1.0 - r.q0;
    r.residual = std::max(r.residual, (direct - embed(expected)).cwiseAbs().maxCoeff());
  }
  return r;
}

RateReport rate(const AdcParams& params) {
  RateReport out;
  out.H_Z_given_B = amplitude_stats(params).H_Z_given_B;
  const auto xi = xi_xba(params);
  const auto phi = phase_states(params);
  const Eigen::MatrixXcd ba = 0.5 * (phi[0].matrix() + phi[1].matrix());
  out.H_X_given_BA = von_neumann_entropy(xi.op.matrix()) - von_neumann_entropy(ba);
  const PhaseReduction red = phase_reduce(params);
  const double pure_part = red.degenerate ? 0.0 : 1.0 - binary_entropy(0.5 * (1.0 + red.cos_theta0));
  out.H_X_given_BA_reduced = red.q0 * pure_part + (1.0 - red.q0);
  out.R = 1.0 - out.H_Z_given_B - out.H_X_given_BA;
  return out;
}

double capacity_objective(double gamma, double q) {
  return binary_entropy((1.0 - gamma) * q) - binary_entropy(gamma * q);
}

Maximum maximize_unit_interval(const std::function<double(double)>& f) {
  constexpr int kGrid = 1000;
  int best = 0;
  double best_val = f(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    const double v = f(static_cast<double>(k) / kGrid);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  double lo = static_cast<double>(std::max(0, best - 1)) / kGrid;
  double hi = static_cast<double>(std::min(kGrid, best + 1)) / kGrid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > 1e-9) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  Maximum m{best_val, static_cast<double>(best) / kGrid};
  const double mid = 0.5 * (lo + hi);
  const double fm = f(mid);
  if (fm > m.value) m = {fm, mid};
  return m;
}

Maximum capacity(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma outside [0, 1]");
  return maximize_unit_interval([gamma](double q) { return capacity_objective(gamma, q); });
}

Maximum max_rate(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma outside [0, 1]");
  return maximize_unit_interval([gamma](double p) { return rate(AdcParams{gamma, p}).R; });
}

RateCapacityReport rate_equals_capacity(double gamma, std::size_t grid_points) {
  RateCapacityReport rep;
  rep.gamma = gamma;
  rep.C = capacity(gamma);
  rep.R = max_rate(gamma);
  rep.gap = std::abs(rep.R.value - rep.C.value);
  rep.argmax_compared = gamma < 0.5;
  rep.argmax_gap = std::abs(rep.R.argmax - (1.0 - rep.C.argmax));
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double p = grid_points > 1 ? static_cast<double>(k) / static_cast<double>(grid_points - 1) : 0.5;
    rep.grid.push_back({p, rate(AdcParams{gamma, p}).R, capacity_objective(gamma, 1.0 - p)});
  }
  rep.ok = rep.gap < 1e-6 && (!rep.argmax_compared || rep.argmax_gap < 1e-4);
  return rep;
}

}  // namespace qbp
