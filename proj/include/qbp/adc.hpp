#pragma once

// Amplitude-damping channel N_gamma: the classical amplitude part, the phase
// part reduced to a pure-state channel, and the rate/capacity comparison.
// Entropies are in bits.

#include <array>
#include <functional>
#include <vector>

#include "qbp/quantum.hpp"

namespace qbp {

struct AdcParams {
  double gamma = 0.0;
  double p = 0.5;  // weight of |0> in the input
};

void validate_params(const AdcParams& params);

// Kraus pair {diag(1, sqrt(1-gamma)), sqrt(gamma) |0><1|}.
std::array<Eigen::Matrix2d, 2> adc_kraus(double gamma);

struct AmplitudeStats {
  std::array<std::array<double, 2>, 2> joint{};  // joint[z][b]
  double H_Z_given_B = 0.0;
};

AmplitudeStats amplitude_stats(const AdcParams& params);

struct CqJointState {
  enum class Label { PsiZB, XiXBA };
  Label label = Label::PsiZB;
  DensityOperator op;  // classical register is wire 0
};

// p|0><0| (x) N(|0><0|) + (1-p)|1><1| (x) N(|1><1|).
CqJointState psi_zb(const AdcParams& params);

// 1/2 sum_x |x><x| (x) phi_x over X, A', B.
CqJointState xi_xba(const AdcParams& params);

// phi_x on A'B (A' is wire 0): Z^x on A' around (1 (x) N) applied to
// sqrt(p)|00> + sqrt(1-p)|11>.
std::array<DensityOperator, 2> phase_states(const AdcParams& params);

struct PhaseReduction {
  double q0 = 1.0;
  double cos_theta0 = 0.0;
  double theta0 = 0.0;
  bool degenerate = false;  // q0 == 0: only the |11> branch survives
  double residual = 0.0;    // max entry deviation of CNOT phi_x CNOT from the reduced form
};

// After CNOT A'->B, phi_+- = q0 X|+-theta0><+-theta0|X (x) |0><0| + (1-q0) |1><1| (x) |1><1|;
// the pure-state label is taken in the X-relabelled basis of A'.
PhaseReduction phase_reduce(const AdcParams& params);

struct RateReport {
  double H_Z_given_B = 0.0;
  double H_X_given_BA = 0.0;         // spectral
  double H_X_given_BA_reduced = 0.0; // through the phase reduction
  double R = 0.0;
};

RateReport rate(const AdcParams& params);

// h2((1 - gamma) q) - h2(gamma q), with q the weight of |1>.
double capacity_objective(double gamma, double q);

struct Maximum {
  double value = 0.0;
  double argmax = 0.0;
};

// 1001-point scan of [0, 1], then golden section around the best point to 1e-9 in p.
Maximum maximize_unit_interval(const std::function<double(double)>& f);

Maximum capacity(double gamma);
Maximum max_rate(double gamma);

struct RateCapacityReport {
  double gamma = 0.0;
  Maximum C;
  Maximum R;
  double gap = 0.0;            // |R.value - C.value|
  double argmax_gap = 0.0;     // |R.argmax - (1 - C.argmax)|; p weights |0>, q weights |1>
  bool argmax_compared = false;  // only where the maximiser is unique (gamma < 1/2)
  std::vector<std::array<double, 3>> grid;  // (p, R(p), objective at q = 1 - p)
  bool ok = false;
};

RateCapacityReport rate_equals_capacity(double gamma, std::size_t grid_points = 21);

}  // namespace qbp
