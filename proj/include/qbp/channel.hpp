#pragma once

#include "qbp/quantum.hpp"

namespace qbp {

// Binary-input channel x -> |(-1)^x theta>. The overlap cos(theta) is kept
// alongside the angle; all combination rules work on the cosine.
class PureStateChannel {
 public:
  PureStateChannel() = default;
  static PureStateChannel from_angle(double theta);
  static PureStateChannel from_cos(double cos_theta);

  double theta() const { return theta_; }
  double cos_theta() const { return cos_theta_; }
  double sin_theta() const;

  friend bool operator==(const PureStateChannel&, const PureStateChannel&) = default;

 private:
  double theta_ = 0.0;
  double cos_theta_ = 1.0;
};

// Outcome-resolved result of the check-node combination. A branch with zero
// probability carries angle 0 and reachable = false.
struct CheckBranches {
  double p0 = 0.5;
  PureStateChannel branch0;
  double p1 = 0.5;
  PureStateChannel branch1;
  bool reachable0 = true;
  bool reachable1 = true;

  double probability(int j) const { return j == 0 ? p0 : p1; }
  const PureStateChannel& branch(int j) const { return j == 0 ? branch0 : branch1; }
};

// Cosine of branch j of the check combination of overlaps (c, c'); returns 1
// for an unreachable branch.
double check_branch_cos(double c, double c_prime, int j);

PureStateChannel var_convolve(const PureStateChannel& w, const PureStateChannel& w_prime);
CheckBranches check_convolve(const PureStateChannel& w, const PureStateChannel& w_prime);

// Optimal (sigma_x) discrimination error of |+-theta> with equal priors.
double helstrom_error(const PureStateChannel& w);

double binary_entropy(double q);

// h2((1 + cos theta) / 2), in bits.
double holevo(const PureStateChannel& w);

// Applies sigma_z on `wire` iff bit == 1, flipping the sign of |+-theta>.
StateVector side_info_flip(StateVector state, int wire, int bit);

}  // namespace qbp
