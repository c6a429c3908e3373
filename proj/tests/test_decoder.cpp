#include <doctest.h>

#include <json.hpp>

#include "qbp/decoder.hpp"
#include "qbp/error.hpp"
#include "qbp/oracle.hpp"
#include "support.hpp"

using namespace qbp;
using qbp::test::code4;
using qbp::test::kPi;
using qbp::test::rep3;

namespace {

std::size_t count_of(const GateCount& c, GateKind k) { return c.per_kind[static_cast<std::size_t>(k)]; }

std::vector<double> random_thetas(int n, Rng& rng) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (auto& x : t) x = 0.05 + (kPi / 2 - 0.05) * uniform01(rng);
  return t;
}

}  // namespace

TEST_CASE("AngleGraph and AngleEvaluator") {
  AngleGraph g;
  const int a = g.leaf(0.5), b = g.leaf(0.5);
  const int v = g.var(a, b);
  const int c = g.check(a, b, 3);
  const int top = g.var(v, c);
  CHECK(g.controls(v).empty());
  CHECK(g.controls(top) == std::vector<int>{3});
  AngleEvaluator eval(g, 4);
  CHECK_CLOSE(eval.cos(v), 0.25, 1e-15);
  CHECK_THROWS_AS(eval.cos(top), InvalidArgument);
  eval.set_outcome(3, 0);
  CHECK_CLOSE(eval.cos(top), 0.25 * 0.8, 1e-15);
  eval.set_outcome(3, 1);
  CHECK_CLOSE(eval.cos(top), 0.0, 1e-15);
}

TEST_CASE("Four-bit destructive circuit structure") {
  const double theta = 0.9;
  const DecoderCircuit circ = build_destructive(code4(), 1, PureStateChannel::from_angle(theta));
  CHECK(circ.num_qubits == 4);
  CHECK(circ.root_wire == 0);
  REQUIRE(circ.steps.size() == 6);
  CHECK(circ.steps[0].gate.kind == GateKind::Cnot);
  CHECK(circ.steps[0].gate.wires == std::vector<int>{1, 3});
  CHECK(circ.steps[1].gate.kind == GateKind::ZBasisMeasure);
  CHECK(circ.steps[1].gate.wires == std::vector<int>{3});
  CHECK(circ.steps[2].gate.kind == GateKind::VarConv);
  CHECK(circ.steps[2].gate.wires == std::vector<int>{0, 2});
  CHECK_CLOSE(circ.steps[2].gate.theta, theta, 1e-15);
  CHECK_CLOSE(circ.steps[2].gate.theta_prime, theta, 1e-15);
  CHECK(circ.steps[3].gate.kind == GateKind::VarConv);
  CHECK(circ.steps[3].gate.wires == std::vector<int>{0, 1});
  CHECK(circ.angles.controls(circ.steps[3].angle_b) == std::vector<int>{3});
  CHECK(circ.steps[4].gate.kind == GateKind::Hadamard);
  CHECK(circ.steps[5].gate.kind == GateKind::ZBasisMeasure);
  REQUIRE(circ.branch_points.size() == 1);
  CHECK(circ.branch_points[0].wire == 3);

  const GateCount gc = gate_count(circ);
  CHECK(count_of(gc, GateKind::VarConv) == 2);
  CHECK(count_of(gc, GateKind::Cnot) == 1);
  CHECK(count_of(gc, GateKind::ZBasisMeasure) == 2);
  CHECK(count_of(gc, GateKind::Hadamard) == 1);
  CHECK(count_of(gc, GateKind::Swap) == 0);
}

TEST_CASE("Four-bit coherent circuit uses one controlled merge") {
  const double theta = 0.9, c = std::cos(theta);
  const DecoderCircuit coh = build_coherent(code4(), 1, PureStateChannel::from_angle(theta));
  CHECK(coh.coherent);
  const GateCount gc = gate_count(coh);
  CHECK(count_of(gc, GateKind::ControlledVarConv) == 1);
  CHECK(count_of(gc, GateKind::VarConv) == 1);
  CHECK(count_of(gc, GateKind::ZBasisMeasure) == 0);
  const GateSpec& g = coh.steps.back().gate;
  REQUIRE(g.kind == GateKind::ControlledVarConv);
  CHECK(g.table->controls() == std::vector<int>{3});
  const auto& e = g.table->entries();
  REQUIRE(e.size() == 2);
  CHECK_CLOSE(std::cos(e[0].first), c * c, 1e-14);
  CHECK_CLOSE(std::cos(e[0].second), 2 * c / (1 + c * c), 1e-14);
  CHECK_CLOSE(std::cos(e[1].first), c * c, 1e-14);
  CHECK_CLOSE(std::cos(e[1].second), 0.0, 1e-14);

  const auto doc = nlohmann::json::parse(circuit_to_json(coh));
  CHECK(doc["gates"].size() == coh.steps.size());
  CHECK(doc["gates"].back()["controls"] == nlohmann::json::array({3}));
}

TEST_CASE("trivial circuits") {
  const FactorGraph single{1, {}};
  const DecoderCircuit d = build_destructive(single, 1, PureStateChannel::from_angle(1.0));
  const GateCount gc = gate_count(d);
  CHECK(gc.total == 2);
  CHECK(count_of(gc, GateKind::Hadamard) == 1);
  CHECK(count_of(gc, GateKind::ZBasisMeasure) == 1);
  CHECK(gate_count(build_coherent(single, 1, PureStateChannel::from_angle(1.0))).total == 0);

  // No checks at all: only unconditioned merges are possible, never controlled ones.
  const DecoderCircuit free2 = build_coherent(FactorGraph{2, {}}, 1, PureStateChannel::from_angle(1.0));
  CHECK(count_of(gate_count(free2), GateKind::ControlledVarConv) == 0);

  CHECK_THROWS_AS(build_destructive(FactorGraph{2, {{1}, {1, 2}}}, 1, PureStateChannel::from_angle(1.0)),
                  InvalidArgument);
  CHECK_THROWS_AS(build_destructive(FactorGraph{3, {{1, 2}, {2, 3}, {1, 3}}}, 1, PureStateChannel::from_angle(1.0)),
                  LoopyGraphError);
  const std::vector<double> short_list = {1.0, 1.0};
  CHECK_THROWS_AS(build_destructive(rep3(), 1, short_list), DimensionMismatch);
}

TEST_CASE("rep-3 decodes through relays") {
  const auto w = PureStateChannel::from_angle(0.6);
  const DecoderCircuit d = build_destructive(rep3(), 1, w);
  CHECK(d.branch_points.empty());  // degree-2 checks only relay
  // Repetition code: the bit sees the product of all three overlaps.
  const double c = std::cos(0.6);
  CHECK_CLOSE(exact_bit_error(rep3(), 1, w), 0.5 * (1 - std::sqrt(1 - std::pow(c, 6))), 1e-13);
}

TEST_CASE("exact_bit_error single channel and oracle agreement") {
  for (double t : {0.0, 0.3, 1.0, kPi / 2}) {
    CHECK_CLOSE(exact_bit_error(FactorGraph{1, {}}, 1, PureStateChannel::from_angle(t)), 0.5 * (1 - std::sin(t)),
                1e-15);
  }
  for (double t : {0.3, 0.7, 1.2, 2.0}) {
    const auto w = PureStateChannel::from_angle(t);
    for (int root = 1; root <= 4; ++root) {
      CHECK_CLOSE(exact_bit_error(code4(), root, w), oracle_bit_error(code4(), w, root).optimal_error, 1e-10);
    }
  }
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 7));
    const FactorGraph g = random_tree_graph(n, rng);
    const auto thetas = random_thetas(n, rng);
    const int root = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n)));
    REQUIRE(std::abs(exact_bit_error(g, root, thetas) - oracle_bit_error(g, thetas, root).optimal_error) < 1e-9);
  }
}

TEST_CASE("decode_bit_destructive examples") {
  Rng rng(5);
  const auto perfect = uniform_angles(code4(), PureStateChannel::from_angle(kPi / 2));
  for (const Codeword& x : enumerate_codewords(code4())) {
    const DecoderCircuit d = build_destructive(code4(), 1, perfect);
    for (int t = 0; t < 20; ++t) CHECK(decode_bit_destructive(channel_outputs(x, perfect), d, rng).bit == x[0]);
  }
  const auto blind = uniform_angles(code4(), PureStateChannel::from_angle(0.0));
  const DecoderCircuit d = build_destructive(code4(), 1, blind);
  int ones = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) ones += decode_bit_destructive(channel_outputs(Codeword(4, 0), blind), d, rng).bit;
  CHECK(std::abs(ones - trials / 2) < 4 * std::sqrt(trials / 4.0));
}

TEST_CASE("Monte Carlo matches exact error") {
  const auto w = PureStateChannel::from_angle(0.7);
  const auto thetas = uniform_angles(code4(), w);
  const DecoderCircuit d = build_destructive(code4(), 2, thetas);
  const double exact = exact_bit_error(code4(), 2, w);
  Rng rng(99);
  const auto code = enumerate_codewords(code4());
  const int trials = 20000;
  int errors = 0;
  for (int t = 0; t < trials; ++t) {
    const Codeword& x = code[uniform_index(rng, code.size())];
    errors += decode_bit_destructive(channel_outputs(x, thetas), d, rng).bit != x[1];
  }
  const double sigma = std::sqrt(exact * (1 - exact) / trials);
  CHECK(std::abs(errors / double(trials) - exact) < 4 * sigma);
}

TEST_CASE("coherent and destructive outcome distributions agree") {
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 5));
    const FactorGraph g = random_tree_graph(n, rng);
    const auto thetas = random_thetas(n, rng);
    const int root = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n)));
    const DecoderCircuit d = build_destructive(g, root, thetas);
    const DecoderCircuit c = build_coherent(g, root, thetas);
    for (int s = 0; s < 10; ++s) {
      const StateVector psi = StateVector::random(n, rng);
      const auto pd = destructive_outcome_distribution(d, psi);
      const auto pc = coherent_outcome_distribution(c, psi);
      REQUIRE(std::abs(pd[0] - pc[0]) < 1e-10);
      StateVector back = psi;
      apply_coherent(c, back);
      apply_coherent_inverse(c, back);
      REQUIRE(std::abs(std::abs(back.inner(psi)) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("gate counts scale linearly per bit") {
  Rng rng(64);
  for (int n : {8, 16, 32, 64}) {
    const FactorGraph g = random_tree_graph(n, rng);
    const auto w = PureStateChannel::from_angle(0.8);
    std::size_t total = 0;
    for (int root = 1; root <= n; ++root) {
      const std::size_t c = gate_count(build_coherent(g, root, w, false)).total;
      CHECK(c <= static_cast<std::size_t>(4 * n));
      total += c;
    }
    CHECK(total <= static_cast<std::size_t>(4 * n * n));
  }
}

TEST_CASE("coherent tables are capped") {
  // 22 degree-3 checks on the root: each adds one measured wire to the root's controls.
  FactorGraph g{1, {}};
  int next = 2;
  for (int arm = 0; arm < 22; ++arm) {
    g.checks.push_back({1, next, next + 1});
    next += 2;
  }
  g.n_vars = next - 1;
  CHECK_THROWS_AS(build_coherent(g, 1, PureStateChannel::from_angle(0.5)), TooLargeError);
  CHECK_NOTHROW(build_coherent(g, 1, PureStateChannel::from_angle(0.5), false));
}

TEST_CASE("sequential decoding") {
  Rng rng(17);
  const FactorGraph single{1, {}};
  const std::vector<double> one = {0.8};
  const SequentialDecoder s1(single, one);
  CHECK_CLOSE(s1.exact_block_error(), 0.5 * (1 - std::sin(0.8)), 1e-14);

  const auto perfect = PureStateChannel::from_angle(kPi / 2);
  for (const Codeword& x : enumerate_codewords(code4())) {
    const auto res = sequential_decode(channel_outputs(x, uniform_angles(code4(), perfect)), code4(), perfect, rng);
    CHECK(res.bits == x);
  }

  const auto w = PureStateChannel::from_angle(0.9);
  const SequentialDecoder dec(code4(), uniform_angles(code4(), w));
  const double exact = dec.exact_block_error();
  CHECK_CLOSE(exact, sequential_exact_block_error(code4(), w), 1e-12);
  CHECK(exact <= dec.block_error_bound() + 1e-12);
  for (int b = 1; b <= 4; ++b) CHECK(exact >= oracle_bit_error(code4(), w, b).optimal_error - 1e-12);

  const auto code = enumerate_codewords(code4());
  const int trials = 20000;
  int errors = 0;
  for (int t = 0; t < trials; ++t) {
    const Codeword& x = code[uniform_index(rng, code.size())];
    errors += dec.decode(channel_outputs(x, uniform_angles(code4(), w)), rng).bits != x;
  }
  const double sigma = std::sqrt(exact * (1 - exact) / trials);
  CHECK(std::abs(errors / double(trials) - exact) < 4 * sigma);

  const SequentialDecoder given(code4(), uniform_angles(code4(), w), {4, 2, 3, 1});
  CHECK(given.order() == std::vector<int>{4, 2, 3, 1});
  CHECK(given.exact_block_error() <= given.block_error_bound() + 1e-12);
  CHECK_THROWS_AS(SequentialDecoder(code4(), uniform_angles(code4(), w), {1, 1, 2, 3}), InvalidArgument);
}
