#pragma once

// Polar codes over the pure-state channel. Indices are 1-based like the
// decoded bits u_1..u_N; the transform is x = u F^{(x)m} in natural order.

#include <cstdint>
#include <string>
#include <vector>

#include "qbp/channel.hpp"
#include "qbp/circuit.hpp"
#include "qbp/factor_graph.hpp"

namespace qbp {

struct PolarCode {
  int N = 1;
  std::vector<int> frozen;               // ascending
  std::vector<std::uint8_t> frozen_values;  // aligned with frozen; all 0 from construct()

  int k() const { return N - static_cast<int>(frozen.size()); }
  bool is_frozen(int i) const;
  std::vector<int> info_indices() const;
};

// Throws InvalidArgument unless N is a power of two and frozen indices are valid.
void validate_code(const PolarCode& code);

// x_j = XOR of u_i over every i whose (0-based) bit set contains j's.
Codeword polar_encode(const Codeword& u);

// Bit b of i-1, most significant first: 0 is the worse (check) step, 1 the better (variable) step.
std::vector<int> synthesis_path(int i, int N);

// One combination inside a synthesized channel. Operands are earlier step
// indices, or -1 for a raw channel output.
struct TrajectoryStep {
  enum class Kind { Var, Check };
  Kind kind = Kind::Var;
  int left = -1;
  int right = -1;
  int outcome = 0;           // Check only
  double probability = 1.0;  // of the sampled outcome
  double cos_theta = 1.0;    // result
};

// A sampled realisation of synthesized channel i: every node of its binary
// combination tree, children before parents; the last step is the output.
struct AngleTrajectory {
  double theta0 = 0.0;
  std::vector<TrajectoryStep> steps;
  double final_theta = 0.0;

  double probability() const;  // product of sampled outcome probabilities
  double replay() const;       // final angle recomputed from the steps
};

// Exact sample: both inputs of every combination are independent copies. Cost O(N).
AngleTrajectory sample_synthesized_angle(const PureStateChannel& w, int i, int N, Rng& rng);

// Population approximation of the same distribution: `size` cosines carried
// level to level, each new member combining two members drawn from the
// previous level. Cost O(size * log N).
std::vector<double> sample_synthesized_population(const PureStateChannel& w, int i, int N, std::size_t size,
                                                  Rng& rng);

struct ChannelEstimate {
  int index = 1;
  double eps = 0.0;     // mean (1 - sin theta) / 2
  double stderr_ = 0.0;
  double chi = 0.0;     // mean holevo of the final angle
  std::size_t samples = 0;
};

struct Construction {
  PolarCode code;
  std::vector<ChannelEstimate> estimates;  // index order
  double theta = 0.0;
};

// Freezes the N - k largest eps; on ties the lower index stays unfrozen.
// Deterministic in seed. samples >= 1000.
Construction construct(const PureStateChannel& w, int N, std::size_t samples, int k, std::uint64_t seed);

// {"N", "theta", "frozen", "eps"} in that order.
std::string construction_to_json(const Construction& c);

struct PolarizationStats {
  double threshold = 0.0;
  double fraction_good = 0.0;
  double chi_target = 0.0;
  double mean_chi = 0.0;  // average over the examined indices
  std::size_t indices = 0;
};

// sampled_indices = 0 examines every index; otherwise that many distinct
// indices drawn uniformly.
PolarizationStats polarization_stats(const PureStateChannel& w, int N, std::size_t samples, double threshold,
                                     std::uint64_t seed, std::size_t sampled_indices = 0);

// V_i for the synthesized channel i with the decisions u_1..u_{i-1} folded in
// as sigma_z corrections. Root is wire 0.
DecoderCircuit sc_destructive_circuit(const PureStateChannel& w, int N, int i, const Codeword& decided);
DecoderCircuit sc_coherent_circuit(const PureStateChannel& w, int N, int i, const Codeword& decided);

// Exact error of the optimal measurement for u_i given correct earlier bits.
double sc_bit_error(const PureStateChannel& w, int N, int i);

class PolarScDecoder {
 public:
  PolarScDecoder(PolarCode code, const PureStateChannel& w);

  Codeword decode(StateVector outputs, Rng& rng) const;

  // Exact block error over all messages, N <= 16.
  double exact_block_error() const;

  const PolarCode& code() const { return code_; }

 private:
  PolarCode code_;
  PureStateChannel w_;
};

Codeword sc_decode(const StateVector& outputs, const PolarCode& code, const PureStateChannel& w, Rng& rng);

}  // namespace qbp
