#include <doctest.h>

#include "qbp/channel.hpp"
#include "qbp/error.hpp"
#include "support.hpp"

using namespace qbp;
using qbp::test::kPi;

namespace {

double overlap(const StateVector& a, const StateVector& b) { return std::abs(a.inner(b)); }

// Check-node statistics straight from the simulator: CNOT, then project wire 1.
struct Measured {
  double p0, c0, c1;
};

Measured cnot_statistics(double a, double b) {
  auto after = [&](int s, int s2) {
    StateVector st = StateVector::product(std::vector<StateVector>{pure_state(a, s), pure_state(b, s2)});
    apply_gate_in_place(st, cnot_gate(0, 1));
    return st;
  };
  // Parity 0 vs parity 1 of the two inputs; only the sign on wire 1 can add a global phase.
  const StateVector plus = after(+1, +1), minus = after(-1, +1);
  Measured m{};
  m.p0 = outcome_probability(plus, 1, Basis::Z, 0);
  StateVector p0 = plus, m0 = minus, p1 = plus, m1 = minus;
  project_in_place(p0, 1, Basis::Z, 0);
  project_in_place(m0, 1, Basis::Z, 0);
  project_in_place(p1, 1, Basis::Z, 1);
  project_in_place(m1, 1, Basis::Z, 1);
  m.c0 = p0.inner(m0).real();
  m.c1 = p1.inner(m1).real();
  return m;
}

}  // namespace

TEST_CASE("channel construction") {
  CHECK_CLOSE(PureStateChannel::from_angle(kPi / 3).cos_theta(), 0.5, 1e-15);
  CHECK_CLOSE(PureStateChannel::from_cos(0.5).theta(), kPi / 3, 1e-15);
  CHECK_THROWS_AS(PureStateChannel::from_angle(-1e-3), InvalidArgument);
  CHECK_THROWS_AS(PureStateChannel::from_cos(1.5), InvalidArgument);
}

TEST_CASE("var_convolve examples") {
  const auto w = PureStateChannel::from_angle(0.8);
  CHECK_CLOSE(var_convolve(w, PureStateChannel::from_angle(0.0)).theta(), 0.8, 1e-14);
  const auto half = PureStateChannel::from_angle(kPi / 2);
  CHECK_CLOSE(var_convolve(half, half).theta(), kPi / 2, 1e-15);
  const auto third = PureStateChannel::from_angle(kPi / 3);
  CHECK_CLOSE(var_convolve(third, third).theta(), std::acos(0.25), 1e-15);
  // Against the product states themselves.
  const StateVector u = StateVector::product(std::vector<StateVector>{pure_state(kPi / 3), pure_state(kPi / 3)});
  const StateVector v =
      StateVector::product(std::vector<StateVector>{pure_state(kPi / 3, -1), pure_state(kPi / 3, -1)});
  CHECK_CLOSE(overlap(u, v), 0.25, 1e-15);
}

TEST_CASE("check_convolve examples") {
  const auto w = PureStateChannel::from_angle(1.1);
  const auto b = check_convolve(w, PureStateChannel::from_angle(kPi / 2));
  CHECK_CLOSE(b.p0, 0.5, 1e-15);
  CHECK_CLOSE(b.branch0.theta(), 1.1, 1e-14);
  CHECK_CLOSE(b.branch1.theta(), 1.1, 1e-14);

  const auto third = PureStateChannel::from_angle(kPi / 3);
  const auto t = check_convolve(third, third);
  CHECK_CLOSE(t.p0, 0.625, 1e-15);
  CHECK_CLOSE(t.p1, 0.375, 1e-15);
  CHECK_CLOSE(t.branch0.cos_theta(), 0.8, 1e-15);
  CHECK_CLOSE(t.branch1.theta(), kPi / 2, 1e-15);

  const auto z = check_convolve(w, PureStateChannel::from_angle(0.0));
  CHECK_CLOSE(z.branch0.cos_theta(), 1.0, 1e-15);
  CHECK_CLOSE(z.branch1.cos_theta(), -1.0, 1e-15);
}

TEST_CASE("check_convolve matches CNOT and measurement") {
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    const double a = 0.05 + (kPi - 0.1) * uniform01(rng), b = 0.05 + (kPi - 0.1) * uniform01(rng);
    const auto br = check_convolve(PureStateChannel::from_angle(a), PureStateChannel::from_angle(b));
    const Measured m = cnot_statistics(a, b);
    REQUIRE(std::abs(br.p0 - m.p0) < 1e-12);
    REQUIRE(std::abs(br.branch0.cos_theta() - m.c0) < 1e-12);
    REQUIRE(std::abs(br.branch1.cos_theta() - m.c1) < 1e-12);
  }
}

TEST_CASE("unreachable check branch") {
  const auto zero = PureStateChannel::from_angle(0.0);
  const auto pi = PureStateChannel::from_angle(kPi);
  const auto b = check_convolve(zero, pi);
  CHECK_CLOSE(b.p0, 0.0, 1e-15);
  CHECK_FALSE(b.reachable0);
  CHECK(b.reachable1);
  CHECK(check_branch_cos(1.0, -1.0, 0) == 1.0);
}

TEST_CASE("helstrom and holevo") {
  CHECK_CLOSE(helstrom_error(PureStateChannel::from_angle(kPi / 2)), 0.0, 1e-15);
  CHECK_CLOSE(helstrom_error(PureStateChannel::from_angle(0.0)), 0.5, 1e-15);
  CHECK_CLOSE(helstrom_error(PureStateChannel::from_angle(kPi / 3)), 0.066987298107780646, 1e-12);
  // Eigen-decomposition of (rho+ - rho-)/2.
  const auto rp = DensityOperator::from_state(pure_state(kPi / 3)).matrix();
  const auto rm = DensityOperator::from_state(pure_state(kPi / 3, -1)).matrix();
  CHECK_CLOSE(0.5 * (1.0 - trace_norm(0.5 * (rp - rm))), 0.066987298107780646, 1e-12);

  CHECK_CLOSE(holevo(PureStateChannel::from_angle(kPi / 2)), 1.0, 1e-15);
  CHECK_CLOSE(holevo(PureStateChannel::from_angle(0.0)), 0.0, 1e-15);
  CHECK_CLOSE(holevo(PureStateChannel::from_angle(kPi / 3)), 0.81127812445913283, 1e-12);
  CHECK_CLOSE(von_neumann_entropy(0.5 * (rp + rm)), 0.81127812445913283, 1e-12);

  CHECK_CLOSE(binary_entropy(0.0), 0.0, 0.0);
  CHECK_CLOSE(binary_entropy(0.5), 1.0, 1e-15);
}

TEST_CASE("side_info_flip") {
  const StateVector s = pure_state(0.9);
  CHECK_CLOSE(overlap(side_info_flip(s, 0, 0), s), 1.0, 1e-15);
  CHECK_CLOSE(overlap(side_info_flip(s, 0, 1), pure_state(0.9, -1)), 1.0, 1e-15);
  CHECK_CLOSE(overlap(side_info_flip(side_info_flip(s, 0, 1), 0, 1), s), 1.0, 1e-15);
}

TEST_CASE("conservation at one step") {
  Rng rng(9);
  for (int t = 0; t < 500; ++t) {
    const auto w = PureStateChannel::from_angle(kPi * uniform01(rng));
    const auto b = check_convolve(w, w);
    double lhs = holevo(var_convolve(w, w));
    if (b.reachable0) lhs += b.p0 * holevo(b.branch0);
    if (b.reachable1) lhs += b.p1 * holevo(b.branch1);
    REQUIRE(std::abs(lhs - 2 * holevo(w)) < 1e-9);
  }
}
