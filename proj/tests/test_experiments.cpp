#include <doctest.h>

#include <fstream>
#include <sstream>

#include "qbp/error.hpp"
#include "qbp/experiments.hpp"
#include "support.hpp"

using namespace qbp;

namespace {

const std::string kCode4 = std::string(QBP_FIXTURES) + "/code4.json";

std::string csv(const Table& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

ExperimentConfig bp(double theta, std::size_t trials) {
  ExperimentConfig cfg;
  cfg.graph = kCode4;
  cfg.theta = theta;
  cfg.trials = trials;
  return cfg;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(qbp::test::kPi)) == qbp::test::kPi);
  const Table t{{"a", "b"}, {{"1", "2"}, {"3", "4"}}};
  CHECK(csv(t) == "a,b\n1,2\n3,4\n");
}

TEST_CASE("bp-sim rows and determinism") {
  const auto r = run_bp_sim(bp(0.7, 20000));
  CHECK(r.failures.empty());
  REQUIRE(r.table.rows.size() == 4);
  CHECK(r.table.header == std::vector<std::string>{"bit_index", "theta", "trials", "empirical_err", "exact_err", "oracle_err"});
  for (const auto& row : r.table.rows) CHECK(std::abs(std::stod(row[4]) - std::stod(row[5])) < 1e-10);
  CHECK(csv(r.table) == csv(run_bp_sim(bp(0.7, 20000)).table));
  auto other = bp(0.7, 20000);
  other.seed = 2;
  CHECK(csv(run_bp_sim(other).table) != csv(r.table));

  const auto perfect = run_bp_sim(bp(qbp::test::kPi / 2, 500));
  for (const auto& row : perfect.table.rows) CHECK(std::stod(row[3]) == 0.0);

  const auto one = run_bp_sim(bp(0.7, 1));
  CHECK(one.table.rows.size() == 4);
  CHECK(one.failures.empty());
}

TEST_CASE("bp-sim sequential") {
  auto cfg = bp(0.9, 5000);
  cfg.sequential = true;
  const auto r = run_bp_sim(cfg);
  CHECK(r.failures.empty());
  REQUIRE(r.table.rows.size() == 1);
  CHECK(r.table.rows[0][0] == "1-2-3-4");
  CHECK(std::stod(r.table.rows[0][3]) <= std::stod(r.table.rows[0][4]));
  cfg.order = "given";
  cfg.sequence = {3, 1, 4, 2};
  CHECK(run_bp_sim(cfg).table.rows[0][0] == "3-1-4-2");
  cfg.sequence = {3, 1};
  CHECK_THROWS_AS(run_bp_sim(cfg), InvalidArgument);
}

TEST_CASE("bp-sim argument errors") {
  ExperimentConfig cfg;
  cfg.theta = 0.5;
  CHECK_THROWS_AS(run_bp_sim(cfg), InvalidArgument);
  cfg.graph = std::string(QBP_FIXTURES) + "/loopy.json";
  CHECK_THROWS_AS(run_bp_sim(cfg), LoopyGraphError);
  cfg.graph = std::string(QBP_FIXTURES) + "/bad.json";
  CHECK_THROWS_AS(run_bp_sim(cfg), ParseError);
  CHECK_THROWS_AS(run_bp_sim(bp(4.0, 10)), InvalidArgument);
}

TEST_CASE("polar-construct") {
  ExperimentConfig cfg;
  cfg.theta = qbp::test::kPi / 3;
  cfg.n = 1;
  cfg.k = 1;
  cfg.samples = 1000;
  const auto single = run_polar_construct(cfg);
  CHECK(single.table.rows.size() == 1);
  cfg.n = 2;
  const auto two = run_polar_construct(cfg);
  REQUIRE(two.table.rows.size() == 2);
  CHECK(std::abs(std::stod(two.table.rows[0][1]) - 0.125) < 5 * std::stod(two.table.rows[0][2]) + 1e-3);
  CHECK_FALSE(two.notes.empty());
  cfg.samples = 10;
  CHECK_THROWS_AS(run_polar_construct(cfg), InvalidArgument);
}

TEST_CASE("polar-sim within the bound") {
  ExperimentConfig cfg;
  cfg.theta = qbp::test::kPi / 3;
  cfg.n = 8;
  cfg.k = 2;
  cfg.trials = 4000;
  const auto r = run_polar_sim(cfg);
  CHECK(r.failures.empty());
  REQUIRE(r.table.rows.size() == 1);
  CHECK(std::stod(r.table.rows[0][4]) <= std::stod(r.table.rows[0][5]) + 0.01);
}

TEST_CASE("adc tables") {
  ExperimentConfig cfg;
  const auto sweep = run_adc(cfg);
  CHECK(sweep.failures.empty());
  REQUIRE(sweep.table.rows.size() == 21);
  CHECK(std::stod(sweep.table.rows[0][2]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(std::stod(sweep.table.rows[10][2])) < 1e-12);
  cfg.gamma = 0.25;
  cfg.rates = true;
  const auto rates = run_adc(cfg);
  CHECK(rates.failures.empty());
  CHECK(rates.table.header.back() == "R");
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(run_adc(cfg), InvalidArgument);
}

TEST_CASE("selftest and fault injection") {
  ExperimentConfig cfg;
  const auto ok = run_selftest(cfg);
  CHECK(ok.failures.empty());
  cfg.seed = 99;
  const auto other = run_selftest(cfg);
  REQUIRE(other.table.rows.size() == ok.table.rows.size());
  for (std::size_t i = 0; i < ok.table.rows.size(); ++i) CHECK(other.table.rows[i][1] == ok.table.rows[i][1]);
  cfg.inject_fault = true;
  const auto bad = run_selftest(cfg);
  CHECK(std::find(bad.failures.begin(), bad.failures.end(), "compression_identity") != bad.failures.end());
}
