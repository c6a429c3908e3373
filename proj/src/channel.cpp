#include "qbp/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qbp/error.hpp"

namespace qbp {

PureStateChannel PureStateChannel::from_angle(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw InvalidArgument("channel angle outside [0, pi]");
  PureStateChannel w;
  w.theta_ = theta;
  w.cos_theta_ = std::cos(theta);
  return w;
}

PureStateChannel PureStateChannel::from_cos(double cos_theta) {
  if (!(cos_theta >= -1.0 - 1e-12 && cos_theta <= 1.0 + 1e-12)) {
    throw InvalidArgument("overlap outside [-1, 1]");
  }
  PureStateChannel w;
  w.cos_theta_ = std::clamp(cos_theta, -1.0, 1.0);
  w.theta_ = std::acos(w.cos_theta_);
  return w;
}

double PureStateChannel::sin_theta() const {
  return std::sqrt(std::max(0.0, 1.0 - cos_theta_ * cos_theta_));
}

double check_branch_cos(double c, double c_prime, int j) {
  const double prod = c * c_prime;
  const double denom = j == 0 ? 1.0 + prod : 1.0 - prod;
  if (!(denom > 0.0)) return 1.0;
  const double num = j == 0 ? c + c_prime : c - c_prime;
  return std::clamp(num / denom, -1.0, 1.0);
}

PureStateChannel var_convolve(const PureStateChannel& w, const PureStateChannel& w_prime) {
  return PureStateChannel::from_cos(w.cos_theta() * w_prime.cos_theta());
}

CheckBranches check_convolve(const PureStateChannel& w, const PureStateChannel& w_prime) {
  const double c = w.cos_theta(), cp = w_prime.cos_theta();
  CheckBranches out;
  out.p0 = std::clamp(0.5 * (1.0 + c * cp), 0.0, 1.0);
  out.p1 = 1.0 - out.p0;
  out.reachable0 = out.p0 > 0.0;
  out.reachable1 = out.p1 > 0.0;
  out.branch0 = PureStateChannel::from_cos(check_branch_cos(c, cp, 0));
  out.branch1 = PureStateChannel::from_cos(check_branch_cos(c, cp, 1));
  return out;
}

double helstrom_error(const PureStateChannel& w) { return 0.5 * (1.0 - w.sin_theta()); }

double binary_entropy(double q) {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double holevo(const PureStateChannel& w) { return binary_entropy(0.5 * (1.0 + w.cos_theta())); }

StateVector side_info_flip(StateVector state, int wire, int bit) {
  if (bit != 0 && bit != 1) throw InvalidArgument("side-information bit must be 0 or 1");
  if (bit == 1) apply_gate_in_place(state, pauli_z_gate(wire));
  return state;
}

}  // namespace qbp
