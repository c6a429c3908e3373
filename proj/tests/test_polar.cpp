#include <doctest.h>

#include <json.hpp>

#include "qbp/decoder.hpp"
#include "qbp/error.hpp"
#include "qbp/polar.hpp"
#include "support.hpp"

using namespace qbp;
using qbp::test::kPi;

namespace {

Codeword bits(const std::string& s) {
  Codeword c;
  for (char ch : s) c.push_back(static_cast<std::uint8_t>(ch - '0'));
  return c;
}

// x = u G with G the m-fold Kronecker power of [[1,0],[1,1]], built as a matrix.
Codeword matrix_encode(const Codeword& u) {
  const std::size_t n = u.size();
  std::vector<std::vector<int>> g{{1}};
  while (g.size() < n) {
    const std::size_t m = g.size();
    std::vector<std::vector<int>> next(2 * m, std::vector<int>(2 * m, 0));
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) {
        next[r][c] = g[r][c];
        next[m + r][c] = g[r][c];
        next[m + r][m + c] = g[r][c];
      }
    g = next;
  }
  Codeword x(n, 0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) x[c] ^= static_cast<std::uint8_t>(u[r] & g[r][c]);
  return x;
}

double eps_of_cos(double c) { return 0.5 * (1 - std::sqrt(std::max(0.0, 1 - c * c))); }

}  // namespace

TEST_CASE("polar_encode examples") {
  CHECK(polar_encode(bits("1")) == bits("1"));
  CHECK(polar_encode(bits("10")) == bits("10"));
  CHECK(polar_encode(bits("01")) == bits("11"));
  CHECK(polar_encode(bits("11")) == bits("01"));
  CHECK(polar_encode(bits("1000")) == bits("1000"));
  CHECK(polar_encode(bits("0001")) == bits("1111"));
  Rng rng(1);
  for (int n : {2, 4, 8, 16, 32}) {
    for (int t = 0; t < 20; ++t) {
      Codeword u(static_cast<std::size_t>(n));
      for (auto& b : u) b = static_cast<std::uint8_t>(rng() & 1);
      REQUIRE(polar_encode(u) == matrix_encode(u));
      REQUIRE(polar_encode(polar_encode(u)) == u);
    }
  }
  CHECK_THROWS_AS(polar_encode(bits("101")), InvalidArgument);
}

TEST_CASE("synthesis_path and code helpers") {
  CHECK(synthesis_path(1, 8) == std::vector<int>{0, 0, 0});
  CHECK(synthesis_path(8, 8) == std::vector<int>{1, 1, 1});
  CHECK(synthesis_path(5, 8) == std::vector<int>{1, 0, 0});
  CHECK(synthesis_path(1, 1).empty());
  const PolarCode code{8, {1, 2, 3, 5, 6, 7}, std::vector<std::uint8_t>(6, 0)};
  CHECK(code.k() == 2);
  CHECK(code.info_indices() == std::vector<int>{4, 8});
  CHECK(code.is_frozen(5));
  CHECK_NOTHROW(validate_code(code));
  CHECK_THROWS_AS(validate_code(PolarCode{6, {}, {}}), InvalidArgument);
  CHECK_THROWS_AS(validate_code(PolarCode{4, {2, 1}, {0, 0}}), InvalidArgument);
}

TEST_CASE("sample_synthesized_angle N = 2") {
  Rng rng(3);
  const double c = std::cos(1.0);
  const auto w = PureStateChannel::from_angle(1.0);
  const auto better = sample_synthesized_angle(w, 2, 2, rng);
  CHECK_CLOSE(std::cos(better.final_theta), c * c, 1e-14);
  CHECK_CLOSE(better.probability(), 1.0, 0.0);

  int zeros = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const auto tr = sample_synthesized_angle(w, 1, 2, rng);
    REQUIRE(tr.steps.size() == 1);
    CHECK_CLOSE(tr.replay(), tr.final_theta, 1e-14);
    if (tr.steps[0].outcome == 0) {
      ++zeros;
      REQUIRE(std::abs(std::cos(tr.final_theta) - 2 * c / (1 + c * c)) < 1e-14);
    } else {
      REQUIRE(std::abs(tr.final_theta - kPi / 2) < 1e-14);
    }
  }
  const double p0 = (1 + c * c) / 2;
  CHECK(std::abs(zeros / double(trials) - p0) < 4 * std::sqrt(p0 * (1 - p0) / trials));
}

TEST_CASE("sample_synthesized_angle N = 4, i = 1 against branch enumeration") {
  const auto w = PureStateChannel::from_angle(kPi / 3);
  const auto first = check_convolve(w, w);
  double exact = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const auto top = check_convolve(first.branch(a), first.branch(b));
      for (int j = 0; j < 2; ++j) {
        exact += first.probability(a) * first.probability(b) * top.probability(j) * eps_of_cos(top.branch(j).cos_theta());
      }
    }
  Rng rng(8);
  const int trials = 100000;
  double sum = 0, sum2 = 0;
  for (int t = 0; t < trials; ++t) {
    const double e = eps_of_cos(std::cos(sample_synthesized_angle(w, 1, 4, rng).final_theta));
    sum += e;
    sum2 += e * e;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt((sum2 / trials - mean * mean) / trials);
  CHECK(std::abs(mean - exact) < 3 * sd);
  // Also equals the exact SC error of that channel.
  CHECK_CLOSE(sc_bit_error(w, 4, 1), exact, 1e-12);
}

TEST_CASE("population sampler tracks exact synthesized errors") {
  const auto w = PureStateChannel::from_angle(1.0);
  Rng rng(10);
  for (int i = 1; i <= 8; ++i) {
    const auto pop = sample_synthesized_population(w, i, 8, 200000, rng);
    double mean = 0;
    for (double c : pop) mean += eps_of_cos(c);
    mean /= static_cast<double>(pop.size());
    CHECK_CLOSE(mean, sc_bit_error(w, 8, i), 2e-3);
  }
}

TEST_CASE("sc_bit_error at N = 2 equals the tree decoder") {
  for (double t : {0.3, kPi / 3, 1.4}) {
    const auto w = PureStateChannel::from_angle(t);
    // Worse channel: u1 seen through x1 = u1 + u2, x2 = u2; the check u1 + x1 + x2 = 0 on a free u1.
    const std::vector<double> worse = {0.0, t, t};
    CHECK_CLOSE(sc_bit_error(w, 2, 1), exact_bit_error(FactorGraph{3, {{1, 2, 3}}}, 1, worse), 1e-10);
    // Better channel with u1 known: a repetition of length 2.
    CHECK_CLOSE(sc_bit_error(w, 2, 2), exact_bit_error(FactorGraph{2, {{1, 2}}}, 1, w), 1e-10);
  }
  CHECK_CLOSE(sc_bit_error(PureStateChannel::from_angle(kPi / 3), 2, 1), 0.125, 1e-12);
}

TEST_CASE("construct examples") {
  const auto perfect = construct(PureStateChannel::from_angle(kPi / 2), 8, 1000, 3, 1);
  for (const auto& e : perfect.estimates) CHECK_CLOSE(e.eps, 0.0, 1e-15);
  CHECK(perfect.code.k() == 3);
  CHECK_NOTHROW(validate_code(perfect.code));

  const auto useless = construct(PureStateChannel::from_angle(0.0), 8, 1000, 3, 1);
  for (const auto& e : useless.estimates) CHECK_CLOSE(e.eps, 0.5, 1e-15);
  // All tied: lower indices stay unfrozen.
  CHECK(useless.code.info_indices() == std::vector<int>{1, 2, 3});

  const auto w = PureStateChannel::from_angle(kPi / 3);
  const auto a = construct(w, 8, 4000, 2, 42);
  const auto b = construct(w, 8, 4000, 2, 42);
  CHECK(construction_to_json(a) == construction_to_json(b));
  // Exact errors order the best two as 8 then 7.
  CHECK(a.code.info_indices() == std::vector<int>{7, 8});
  for (const auto& e : a.estimates) CHECK(std::abs(e.eps - sc_bit_error(w, 8, e.index)) < 5 * e.stderr_ + 1e-3);

  const auto n2 = construct(w, 2, 2000, 1, 5);
  CHECK_CLOSE(n2.estimates[0].eps, 0.125, 5 * n2.estimates[0].stderr_ + 1e-3);

  const auto one = construct(w, 1, 1000, 1, 5);
  REQUIRE(one.estimates.size() == 1);
  CHECK_CLOSE(one.estimates[0].eps, helstrom_error(w), 1e-15);

  const auto doc = nlohmann::ordered_json::parse(construction_to_json(a));
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"N", "theta", "frozen", "eps"});
  CHECK(doc["frozen"].size() == 6);

  CHECK_THROWS_AS(construct(w, 8, 999, 2, 1), InvalidArgument);
  CHECK_THROWS_AS(construct(w, 6, 1000, 2, 1), InvalidArgument);
  CHECK_THROWS_AS(construct(w, 8, 1000, 9, 1), InvalidArgument);
}

TEST_CASE("polarization_stats trivial channels") {
  const auto good = polarization_stats(PureStateChannel::from_angle(kPi / 2), 64, 1000, 1e-4, 1);
  CHECK_CLOSE(good.fraction_good, 1.0, 0.0);
  CHECK_CLOSE(good.chi_target, 1.0, 1e-15);
  const auto bad = polarization_stats(PureStateChannel::from_angle(0.0), 64, 1000, 1e-4, 1);
  CHECK_CLOSE(bad.fraction_good, 0.0, 0.0);
  // Averaged over every index the Holevo information is conserved.
  const auto all = polarization_stats(PureStateChannel::from_angle(kPi / 3), 64, 2000, 1e-4, 3);
  CHECK(all.indices == 64);
  CHECK_CLOSE(all.mean_chi, holevo(PureStateChannel::from_angle(kPi / 3)), 0.01);
  const auto sampled = polarization_stats(PureStateChannel::from_angle(kPi / 3), 1024, 1000, 1e-4, 3, 16);
  CHECK(sampled.indices == 16);
}

TEST_CASE("sc circuits") {
  const auto w = PureStateChannel::from_angle(0.9);
  const DecoderCircuit worse = sc_destructive_circuit(w, 2, 1, {});
  CHECK(worse.root_wire == 0);
  CHECK(worse.branch_points.size() == 1);
  const DecoderCircuit better = sc_destructive_circuit(w, 2, 2, bits("1"));
  std::size_t zs = 0;
  for (const auto& s : better.steps) zs += s.gate.kind == GateKind::PauliZ;
  CHECK(zs == 1);
  CHECK(sc_destructive_circuit(w, 2, 2, bits("0")).steps.size() == better.steps.size() - 1);
  const DecoderCircuit coh = sc_coherent_circuit(w, 8, 3, bits("01"));
  CHECK(coh.coherent);
  CHECK_THROWS_AS(sc_destructive_circuit(w, 4, 3, bits("1")), DimensionMismatch);
}

TEST_CASE("sc_decode examples") {
  Rng rng(6);
  const auto w = PureStateChannel::from_angle(0.8);
  const PolarCode frozen_all{4, {1, 2, 3, 4}, {0, 0, 0, 0}};
  const StateVector out = channel_outputs(Codeword(4, 0), std::vector<double>(4, 0.8));
  CHECK(sc_decode(out, frozen_all, w, rng) == Codeword(4, 0));

  const auto perfect = PureStateChannel::from_angle(kPi / 2);
  const PolarCode n2{2, {1}, {0}};
  for (int u2 = 0; u2 < 2; ++u2) {
    const Codeword u = {0, static_cast<std::uint8_t>(u2)};
    const StateVector o = channel_outputs(polar_encode(u), std::vector<double>(2, kPi / 2));
    for (int t = 0; t < 10; ++t) CHECK(sc_decode(o, n2, perfect, rng) == u);
  }

  // N = 8, k = 2: exact block error within the union bound, and Monte Carlo near it.
  const auto w3 = PureStateChannel::from_angle(kPi / 3);
  const PolarCode code{8, {1, 2, 3, 5, 6, 7}, std::vector<std::uint8_t>(6, 0)};
  const PolarScDecoder dec(code, w3);
  const double exact = dec.exact_block_error();
  double bound = 0;
  for (int i : code.info_indices()) bound += sc_bit_error(w3, 8, i);
  CHECK(exact <= std::min(1.0, 4 * bound));
  CHECK(exact >= sc_bit_error(w3, 8, 4) - 1e-12);
  int errors = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    Codeword u(8, 0);
    u[3] = static_cast<std::uint8_t>(rng() & 1);
    u[7] = static_cast<std::uint8_t>(rng() & 1);
    errors += dec.decode(channel_outputs(polar_encode(u), std::vector<double>(8, kPi / 3)), rng) != u;
  }
  CHECK(std::abs(errors / double(trials) - exact) < 4 * std::sqrt(exact * (1 - exact) / trials) + 1e-9);
}
