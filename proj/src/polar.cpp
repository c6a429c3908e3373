#include "qbp/polar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include <json.hpp>

#include "qbp/decoder.hpp"
#include "qbp/error.hpp"

namespace qbp {

namespace {

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

int log2_exact(int n) {
  int m = 0;
  while ((1 << m) < n) ++m;
  return m;
}

void check_index(int i, int N) {
  if (!is_power_of_two(N)) throw InvalidArgument("block length must be a power of two");
  if (i < 1 || i > N) throw InvalidArgument("channel index outside [1, N]");
}

double mean_error(double c) { return 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - c * c))); }

double combine(int bit, double a, double b, Rng& rng, int* outcome = nullptr, double* prob = nullptr) {
  if (bit == 1) return a * b;
  const double p0 = std::clamp(0.5 * (1.0 + a * b), 0.0, 1.0);
  const int j = uniform01(rng) < p0 ? 0 : 1;
  if (outcome) *outcome = j;
  if (prob) *prob = j == 0 ? p0 : 1.0 - p0;
  return check_branch_cos(a, b, j);
}

ChannelEstimate summarise(int index, const std::vector<double>& pop) {
  ChannelEstimate e;
  e.index = index;
  e.samples = pop.size();
  double sum = 0.0, sq = 0.0, chi = 0.0;
  for (double c : pop) {
    const double err = mean_error(c);
    sum += err;
    sq += err * err;
    chi += binary_entropy(0.5 * (1.0 + c));
  }
  const double n = static_cast<double>(pop.size());
  e.eps = sum / n;
  e.chi = chi / n;
  const double var = pop.size() > 1 ? std::max(0.0, (sq - n * e.eps * e.eps) / (n - 1.0)) : 0.0;
  e.stderr_ = std::sqrt(var / n);
  return e;
}

// Wires [0, s) hold the outputs of a length-s sub-block; reduces them onto wire 0
// for sub-block index idx (0-based) whose first bit is u[offset].
void build_sc(CircuitBuilder& b, int s, int idx, int offset, const Codeword& decided) {
  if (s == 1) return;
  const int half = s / 2;
  if (idx < half) {
    for (int t = 0; t < half; ++t) b.check_merge(t, t + half);
    build_sc(b, half, idx, offset, decided);
  } else {
    const Codeword first(decided.begin() + offset, decided.begin() + offset + half);
    const Codeword a = polar_encode(first);
    for (int t = 0; t < half; ++t) {
      if (a[static_cast<std::size_t>(t)]) b.pauli_z(t);
      b.var_merge(t, t + half);
    }
    build_sc(b, half, idx - half, offset + half, decided);
  }
}

}  // namespace

bool PolarCode::is_frozen(int i) const { return std::binary_search(frozen.begin(), frozen.end(), i); }

std::vector<int> PolarCode::info_indices() const {
  std::vector<int> out;
  for (int i = 1; i <= N; ++i) {
    if (!is_frozen(i)) out.push_back(i);
  }
  return out;
}

void validate_code(const PolarCode& code) {
  if (!is_power_of_two(code.N)) throw InvalidArgument("block length must be a power of two");
  if (code.frozen_values.size() != code.frozen.size()) throw InvalidArgument("one frozen value per frozen index");
  if (!std::is_sorted(code.frozen.begin(), code.frozen.end()) ||
      std::adjacent_find(code.frozen.begin(), code.frozen.end()) != code.frozen.end()) {
    throw InvalidArgument("frozen indices must be ascending and distinct");
  }
  for (int i : code.frozen) {
    if (i < 1 || i > code.N) throw InvalidArgument("frozen index outside [1, N]");
  }
}

Codeword polar_encode(const Codeword& u) {
  const int n = static_cast<int>(u.size());
  if (!is_power_of_two(n)) throw InvalidArgument("polar_encode needs a power-of-two length");
  Codeword x = u;
  for (int h = 1; h < n; h <<= 1) {
    for (int block = 0; block < n; block += 2 * h) {
      for (int j = block; j < block + h; ++j) x[static_cast<std::size_t>(j)] ^= x[static_cast<std::size_t>(j + h)];
    }
  }
  return x;
}

std::vector<int> synthesis_path(int i, int N) {
  check_index(i, N);
  const int m = log2_exact(N);
  std::vector<int> path;
  for (int b = m - 1; b >= 0; --b) path.push_back(((i - 1) >> b) & 1);
  return path;
}

double AngleTrajectory::probability() const {
  double p = 1.0;
  for (const auto& s : steps) p *= s.probability;
  return p;
}

double AngleTrajectory::replay() const {
  const double c0 = std::cos(theta0);
  std::vector<double> value;
  value.reserve(steps.size());
  auto operand = [&](int id) { return id < 0 ? c0 : value[static_cast<std::size_t>(id)]; };
  for (const auto& s : steps) {
    const double a = operand(s.left), b = operand(s.right);
    value.push_back(s.kind == TrajectoryStep::Kind::Var ? a * b : check_branch_cos(a, b, s.outcome));
  }
  return std::acos(std::clamp(value.empty() ? c0 : value.back(), -1.0, 1.0));
}

AngleTrajectory sample_synthesized_angle(const PureStateChannel& w, int i, int N, Rng& rng) {
  const auto path = synthesis_path(i, N);
  AngleTrajectory traj;
  traj.theta0 = w.theta();
  traj.steps.reserve(static_cast<std::size_t>(N));
  std::function<int(std::size_t)> grow = [&](std::size_t depth) -> int {
    if (depth == 0) return -1;
    const int l = grow(depth - 1);
    const int r = grow(depth - 1);
    auto cos_of = [&](int id) { return id < 0 ? w.cos_theta() : traj.steps[static_cast<std::size_t>(id)].cos_theta; };
    TrajectoryStep step;
    step.left = l;
    step.right = r;
    step.kind = path[depth - 1] == 1 ? TrajectoryStep::Kind::Var : TrajectoryStep::Kind::Check;
    step.cos_theta = combine(path[depth - 1], cos_of(l), cos_of(r), rng, &step.outcome, &step.probability);
    traj.steps.push_back(step);
    return static_cast<int>(traj.steps.size()) - 1;
  };
  const int top = grow(path.size());
  traj.final_theta = top < 0 ? w.theta() : std::acos(std::clamp(traj.steps.back().cos_theta, -1.0, 1.0));
  return traj;
}

std::vector<double> sample_synthesized_population(const PureStateChannel& w, int i, int N, std::size_t size,
                                                  Rng& rng) {
  if (size == 0) throw InvalidArgument("population size must be positive");
  const auto path = synthesis_path(i, N);
  std::vector<double> pop(size, w.cos_theta()), next(size);
  for (int bit : path) {
    for (std::size_t k = 0; k < size; ++k) {
      const double a = pop[uniform_index(rng, size)];
      const double b = pop[uniform_index(rng, size)];
      next[k] = combine(bit, a, b, rng);
    }
    pop.swap(next);
  }
  return pop;
}

Construction construct(const PureStateChannel& w, int N, std::size_t samples, int k, std::uint64_t seed) {
  if (!is_power_of_two(N)) throw InvalidArgument("block length must be a power of two");
  if (k < 0 || k > N) throw InvalidArgument("k must lie in [0, N]");
  if (samples < 1000) throw InvalidArgument("construction needs at least 1000 samples per index");
  Construction out;
  out.theta = w.theta();
  out.estimates.resize(static_cast<std::size_t>(N));
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) + 1;
    Rng rng = stream_rng(seed, idx);
    out.estimates[idx] = summarise(i, sample_synthesized_population(w, i, N, samples, rng));
  });
  std::vector<int> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ea = out.estimates[static_cast<std::size_t>(a - 1)].eps;
    const double eb = out.estimates[static_cast<std::size_t>(b - 1)].eps;
    if (ea != eb) return ea > eb;
    return a > b;
  });
  out.code.N = N;
  out.code.frozen.assign(order.begin(), order.begin() + (N - k));
  std::sort(out.code.frozen.begin(), out.code.frozen.end());
  out.code.frozen_values.assign(out.code.frozen.size(), 0);
  return out;
}

std::string construction_to_json(const Construction& c) {
  nlohmann::ordered_json doc;
  doc["N"] = c.code.N;
  doc["theta"] = c.theta;
  doc["frozen"] = c.code.frozen;
  std::vector<double> eps;
  for (const auto& e : c.estimates) eps.push_back(e.eps);
  doc["eps"] = eps;
  return doc.dump();
}

PolarizationStats polarization_stats(const PureStateChannel& w, int N, std::size_t samples, double threshold,
                                     std::uint64_t seed, std::size_t sampled_indices) {
  if (!is_power_of_two(N)) throw InvalidArgument("block length must be a power of two");
  std::vector<int> indices;
  if (sampled_indices == 0 || sampled_indices >= static_cast<std::size_t>(N)) {
    indices.resize(static_cast<std::size_t>(N));
    std::iota(indices.begin(), indices.end(), 1);
  } else {
    Rng pick = stream_rng(seed, 0);
    std::set<int> chosen;
    while (chosen.size() < sampled_indices) chosen.insert(1 + static_cast<int>(uniform_index(pick, static_cast<std::size_t>(N))));
    indices.assign(chosen.begin(), chosen.end());
  }
  std::vector<ChannelEstimate> est(indices.size());
  parallel_for(indices.size(), [&](std::size_t k) {
    const int i = indices[k];
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(i));
    est[k] = summarise(i, sample_synthesized_population(w, i, N, samples, rng));
  });
  PolarizationStats s;
  s.threshold = threshold;
  s.chi_target = holevo(w);
  s.indices = indices.size();
  std::size_t good = 0;
  double chi = 0.0;
  for (const auto& e : est) {
    if (e.eps < threshold) ++good;
    chi += e.chi;
  }
  s.fraction_good = static_cast<double>(good) / static_cast<double>(est.size());
  s.mean_chi = chi / static_cast<double>(est.size());
  return s;
}

DecoderCircuit sc_destructive_circuit(const PureStateChannel& w, int N, int i, const Codeword& decided) {
  check_index(i, N);
  if (decided.size() < static_cast<std::size_t>(i - 1)) throw DimensionMismatch("need every earlier decision");
  Codeword prefix(static_cast<std::size_t>(N), 0);
  std::copy_n(decided.begin(), i - 1, prefix.begin());
  const std::vector<double> cosines(static_cast<std::size_t>(N), w.cos_theta());
  CircuitBuilder b(cosines);
  build_sc(b, N, i - 1, 0, prefix);
  return std::move(b).finish(0);
}

DecoderCircuit sc_coherent_circuit(const PureStateChannel& w, int N, int i, const Codeword& decided) {
  return to_coherent(sc_destructive_circuit(w, N, i, decided));
}

double sc_bit_error(const PureStateChannel& w, int N, int i) {
  if (N > 16) throw TooLargeError("exact synthesized-channel error limited to N <= 16");
  return exact_circuit_error(sc_destructive_circuit(w, N, i, Codeword(static_cast<std::size_t>(N), 0)));
}

PolarScDecoder::PolarScDecoder(PolarCode code, const PureStateChannel& w) : code_(std::move(code)), w_(w) {
  validate_code(code_);
  if (code_.N > 16) throw TooLargeError("statevector SC decoding limited to N <= 16");
}

Codeword PolarScDecoder::decode(StateVector outputs, Rng& rng) const {
  if (outputs.num_qubits() != code_.N) throw DimensionMismatch("input width does not match block length");
  Codeword u(static_cast<std::size_t>(code_.N), 0);
  std::size_t f = 0;
  for (int i = 1; i <= code_.N; ++i) {
    if (f < code_.frozen.size() && code_.frozen[f] == i) {
      u[static_cast<std::size_t>(i - 1)] = code_.frozen_values[f++];
      continue;
    }
    const DecoderCircuit v = sc_coherent_circuit(w_, code_.N, i, u);
    apply_coherent(v, outputs);
    const auto rec = measure_in_place(outputs, 0, Basis::X, uniform01(rng));
    apply_coherent_inverse(v, outputs);
    u[static_cast<std::size_t>(i - 1)] = static_cast<std::uint8_t>(rec.outcome);
  }
  return u;
}

double PolarScDecoder::exact_block_error() const {
  const auto info = code_.info_indices();
  const std::vector<double> thetas(static_cast<std::size_t>(code_.N), w_.theta());
  double success = 0.0;
  const std::size_t messages = std::size_t{1} << info.size();
  for (std::size_t msg = 0; msg < messages; ++msg) {
    Codeword u(static_cast<std::size_t>(code_.N), 0);
    for (std::size_t f = 0; f < code_.frozen.size(); ++f) u[static_cast<std::size_t>(code_.frozen[f] - 1)] = code_.frozen_values[f];
    for (std::size_t q = 0; q < info.size(); ++q) u[static_cast<std::size_t>(info[q] - 1)] = (msg >> q) & 1;
    StateVector psi = channel_outputs(polar_encode(u), thetas);
    double p = 1.0;
    for (int i : info) {
      const DecoderCircuit v = sc_coherent_circuit(w_, code_.N, i, u);
      apply_coherent(v, psi);
      const int want = u[static_cast<std::size_t>(i - 1)];
      const double pi = outcome_probability(psi, 0, Basis::X, want);
      p *= pi;
      if (!(pi > 0.0)) break;
      project_in_place(psi, 0, Basis::X, want);
      apply_coherent_inverse(v, psi);
    }
    success += p;
  }
  return std::clamp(1.0 - success / static_cast<double>(messages), 0.0, 1.0);
}

Codeword sc_decode(const StateVector& outputs, const PolarCode& code, const PureStateChannel& w, Rng& rng) {
  return PolarScDecoder(code, w).decode(outputs, rng);
}

}  // namespace qbp
