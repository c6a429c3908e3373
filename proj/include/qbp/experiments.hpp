#pragma once

// Experiment drivers behind the qbpsim command line. Each returns a table plus
// the list of tolerance failures (empty on success).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qbp {

struct ExperimentConfig {
  std::string graph;
  std::optional<double> theta;
  std::optional<double> gamma;
  std::optional<double> p;
  int n = 8;  // block length for the polar commands
  int k = 2;
  std::size_t trials = 10000;
  std::size_t samples = 10000;  // trajectories per index in polar construction
  std::uint64_t seed = 1;
  double threshold = 1e-4;
  std::string out;
  std::string order = "ascending";  // ascending | given
  std::vector<int> sequence;        // used with order = given
  bool sequential = false;
  bool rates = false;
  std::string json_out;
  bool inject_fault = false;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
  Table table;
  std::vector<std::string> failures;
  std::vector<std::string> notes;  // summary lines: stdout for selftest, stderr otherwise
};

// 17 significant digits.
std::string format_double(double x);
void write_csv(std::ostream& out, const Table& table);

ExperimentResult run_bp_sim(const ExperimentConfig& cfg);
ExperimentResult run_polar_construct(const ExperimentConfig& cfg);
ExperimentResult run_polar_sim(const ExperimentConfig& cfg);
ExperimentResult run_adc(const ExperimentConfig& cfg);
ExperimentResult run_selftest(const ExperimentConfig& cfg);

}  // namespace qbp
