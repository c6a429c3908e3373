#include "qbp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

#include "qbp/adc.hpp"
#include "qbp/decoder.hpp"
#include "qbp/error.hpp"
#include "qbp/oracle.hpp"
#include "qbp/polar.hpp"

namespace qbp {

namespace {

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

PureStateChannel require_theta(const ExperimentConfig& cfg) {
  if (!cfg.theta) throw InvalidArgument("--theta is required");
  return PureStateChannel::from_angle(*cfg.theta);
}

void require_trials(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw InvalidArgument("--trials must be at least 1");
}

double binomial_sigma(double p, std::size_t trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

std::vector<int> decoding_order(const ExperimentConfig& cfg, int n) {
  if (cfg.order == "ascending") return {};
  if (cfg.order != "given") throw InvalidArgument("--order must be ascending or given");
  if (cfg.sequence.size() != static_cast<std::size_t>(n)) throw InvalidArgument("--sequence must list every variable once");
  return cfg.sequence;
}

std::string join_order(const std::vector<int>& order) {
  std::string s;
  for (std::size_t i = 0; i < order.size(); ++i) s += (i ? "-" : "") + std::to_string(order[i]);
  return s;
}

ExperimentResult bp_sequential(const ExperimentConfig& cfg, const FactorGraph& graph, const PureStateChannel& w) {
  const auto thetas = uniform_angles(graph, w);
  const SequentialDecoder dec(graph, thetas, decoding_order(cfg, graph.n_vars));
  const auto code = enumerate_codewords(graph);
  std::vector<std::uint8_t> wrong(cfg.trials, 0);
  parallel_for(cfg.trials, [&](std::size_t t) {
    Rng rng = stream_rng(cfg.seed, t);
    const Codeword& x = code[uniform_index(rng, code.size())];
    const SequentialResult r = dec.decode(channel_outputs(x, thetas), rng);
    wrong[t] = r.bits != x;
  });
  const double empirical = static_cast<double>(std::count(wrong.begin(), wrong.end(), 1)) / static_cast<double>(cfg.trials);
  const double exact = dec.exact_block_error();
  const double bound = dec.block_error_bound();

  ExperimentResult res;
  res.table.header = {"order", "trials", "block_err", "exact_block_err", "gao_bound"};
  res.table.rows.push_back({join_order(dec.order()), fmt(cfg.trials), fmt(empirical), fmt(exact), fmt(bound)});
  if (exact > bound + 1e-12) res.failures.push_back("exact block error exceeds 4 * sum of bit errors");
  if (std::abs(empirical - exact) > 4.0 * binomial_sigma(exact, cfg.trials) + 1e-12) {
    res.failures.push_back("empirical block error more than 4 sigma from exact");
  }
  return res;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const Table& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

ExperimentResult run_bp_sim(const ExperimentConfig& cfg) {
  require_trials(cfg);
  if (cfg.graph.empty()) throw InvalidArgument("--graph is required");
  const FactorGraph graph = load_graph(cfg.graph);
  if (graph.n_vars > 12) throw TooLargeError("bp-sim simulates at most 12 variables");
  const PureStateChannel w = require_theta(cfg);
  assert_tree(graph);
  if (cfg.sequential) return bp_sequential(cfg, graph, w);

  const auto thetas = uniform_angles(graph, w);
  const int n = graph.n_vars;
  std::vector<DecoderCircuit> circuits;
  for (int v = 1; v <= n; ++v) circuits.push_back(build_destructive(graph, v, thetas));
  const auto code = enumerate_codewords(graph);

  // wrong[t * n + j]: trial t got bit j+1 wrong.
  std::vector<std::uint8_t> wrong(cfg.trials * static_cast<std::size_t>(n), 0);
  parallel_for(cfg.trials, [&](std::size_t t) {
    Rng rng = stream_rng(cfg.seed, t);
    const Codeword& x = code[uniform_index(rng, code.size())];
    const StateVector outputs = channel_outputs(x, thetas);
    for (int j = 0; j < n; ++j) {
      const BitEstimate est = decode_bit_destructive(outputs, circuits[static_cast<std::size_t>(j)], rng);
      wrong[t * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] = est.bit != x[static_cast<std::size_t>(j)];
    }
  });

  ExperimentResult res;
  res.table.header = {"bit_index", "theta", "trials", "empirical_err", "exact_err", "oracle_err"};
  for (int j = 0; j < n; ++j) {
    std::size_t errors = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) errors += wrong[t * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    const double empirical = static_cast<double>(errors) / static_cast<double>(cfg.trials);
    const double exact = exact_circuit_error(circuits[static_cast<std::size_t>(j)]);
    const double oracle = oracle_bit_error(graph, thetas, j + 1).optimal_error;
    res.table.rows.push_back({fmt(j + 1), fmt(w.theta()), fmt(cfg.trials), fmt(empirical), fmt(exact), fmt(oracle)});
    if (std::abs(exact - oracle) > 1e-9) res.failures.push_back("bit " + std::to_string(j + 1) + ": exact error differs from oracle");
    if (std::abs(empirical - exact) > 4.0 * binomial_sigma(exact, cfg.trials) + 1e-12) {
      res.failures.push_back("bit " + std::to_string(j + 1) + ": empirical error more than 4 sigma from exact");
    }
  }
  return res;
}

ExperimentResult run_polar_construct(const ExperimentConfig& cfg) {
  const PureStateChannel w = require_theta(cfg);
  const Construction c = construct(w, cfg.n, cfg.samples, std::min(cfg.k, cfg.n), cfg.seed);
  ExperimentResult res;
  res.table.header = {"index", "eps", "stderr"};
  std::size_t good = 0;
  for (const auto& e : c.estimates) {
    res.table.rows.push_back({fmt(e.index), fmt(e.eps), fmt(e.stderr_)});
    good += e.eps < cfg.threshold;
  }
  res.notes.push_back("fraction with eps < " + fmt(cfg.threshold) + ": " +
                      fmt(static_cast<double>(good) / static_cast<double>(c.estimates.size())) +
                      " (holevo " + fmt(holevo(w)) + ")");
  if (!cfg.json_out.empty()) {
    std::ofstream out(cfg.json_out, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + cfg.json_out);
    out << construction_to_json(c) << '\n';
  }
  return res;
}

ExperimentResult run_polar_sim(const ExperimentConfig& cfg) {
  require_trials(cfg);
  const PureStateChannel w = require_theta(cfg);
  if (cfg.k < 0 || cfg.k > cfg.n) throw InvalidArgument("--k must lie in [0, N]");
  const Construction c = construct(w, cfg.n, cfg.samples, cfg.k, derive_seed(cfg.seed, 0xC0DE));
  const PolarScDecoder dec(c.code, w);
  const auto info = c.code.info_indices();
  const std::vector<double> thetas(static_cast<std::size_t>(cfg.n), w.theta());

  std::vector<std::uint8_t> wrong(cfg.trials, 0);
  parallel_for(cfg.trials, [&](std::size_t t) {
    Rng rng = stream_rng(cfg.seed, t);
    Codeword u(static_cast<std::size_t>(cfg.n), 0);
    for (int i : info) u[static_cast<std::size_t>(i - 1)] = uniform01(rng) < 0.5 ? 0 : 1;
    const Codeword decoded = dec.decode(channel_outputs(polar_encode(u), thetas), rng);
    wrong[t] = decoded != u;
  });
  const double block = static_cast<double>(std::count(wrong.begin(), wrong.end(), 1)) / static_cast<double>(cfg.trials);
  double sum = 0.0;
  for (int i : info) sum += c.estimates[static_cast<std::size_t>(i - 1)].eps;
  const double bound = std::min(1.0, 4.0 * sum);

  ExperimentResult res;
  res.table.header = {"N", "k", "theta", "trials", "block_err", "gao_bound"};
  res.table.rows.push_back({fmt(cfg.n), fmt(cfg.k), fmt(w.theta()), fmt(cfg.trials), fmt(block), fmt(bound)});
  const double sigma = std::max(binomial_sigma(block, cfg.trials), binomial_sigma(bound, cfg.trials));
  if (block > bound + 3.0 * sigma) res.failures.push_back("SC block error above the construction bound + 3 sigma");
  return res;
}

ExperimentResult run_adc(const ExperimentConfig& cfg) {
  std::vector<double> gammas;
  if (cfg.gamma) {
    gammas.push_back(*cfg.gamma);
  } else {
    for (int g = 0; g <= 20; ++g) gammas.push_back(g / 20.0);
  }
  ExperimentResult res;
  if (cfg.rates) {
    std::vector<double> ps;
    if (cfg.p) {
      ps.push_back(*cfg.p);
    } else {
      for (int q = 0; q <= 20; ++q) ps.push_back(q / 20.0);
    }
    res.table.header = {"gamma", "p", "H_Z_given_B", "H_X_given_BA", "R"};
    for (double g : gammas) {
      for (double p : ps) {
        const RateReport r = rate(AdcParams{g, p});
        res.table.rows.push_back({fmt(g), fmt(p), fmt(r.H_Z_given_B), fmt(r.H_X_given_BA), fmt(r.R)});
        if (std::abs(r.H_X_given_BA - r.H_X_given_BA_reduced) > 1e-9) {
          res.failures.push_back("H(X|BA') spectral and reduced values disagree at gamma=" + fmt(g) + ", p=" + fmt(p));
        }
      }
    }
    return res;
  }
  res.table.header = {"gamma", "p_star", "C", "R_max", "gap"};
  double prev_c = 2.0;
  for (double g : gammas) {
    const RateCapacityReport rep = rate_equals_capacity(g, 0);
    res.table.rows.push_back({fmt(g), fmt(rep.C.argmax), fmt(rep.C.value), fmt(rep.R.value), fmt(rep.gap)});
    if (rep.gap >= 1e-6) res.failures.push_back("max_p R differs from C at gamma=" + fmt(g));
    if (g <= 0.5) {
      if (rep.C.value > prev_c + 1e-12) res.failures.push_back("C not monotone on [0, 1/2] at gamma=" + fmt(g));
      prev_c = rep.C.value;
    }
  }
  return res;
}

ExperimentResult run_selftest(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.table.header = {"check", "passed", "worst"};
  auto record = [&](const std::string& name, double worst, double tol) {
    const bool ok = worst <= tol;
    res.table.rows.push_back({name, ok ? "1" : "0", fmt(worst)});
    char line[160];
    std::snprintf(line, sizeof line, "%s %-22s worst=%.3e tol=%.0e", ok ? "PASS" : "FAIL", name.c_str(), worst, tol);
    res.notes.push_back(line);
    if (!ok) res.failures.push_back(name);
  };
  Rng rng = stream_rng(cfg.seed, 0x5E1F);
  const double pi = std::numbers::pi;

  {
    double unit = 0.0, comp = 0.0;
    for (int t = 0; t < 200; ++t) {
      const double a = pi * uniform01(rng), b = pi * uniform01(rng);
      Eigen::Matrix4d m = var_conv_matrix(a, b);
      if (cfg.inject_fault) m(0, 0) += 1e-3;
      unit = std::max(unit, (m.transpose() * m - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff());
      for (int s : {+1, -1}) {
        const StateVector in = StateVector::product(std::vector<StateVector>{pure_state(a, s), pure_state(b, s)});
        Eigen::Vector4d v;
        for (int i = 0; i < 4; ++i) v(i) = in[static_cast<std::size_t>(i)].real();
        const Eigen::Vector4d outv = m * v;
        const double cv = std::clamp(std::cos(a) * std::cos(b), -1.0, 1.0);
        const StateVector want = pure_state(std::acos(cv), s);
        Eigen::Vector4d expect(want[0].real(), 0.0, want[1].real(), 0.0);
        comp = std::max(comp, (outv - expect).cwiseAbs().maxCoeff());
      }
    }
    record("var_conv_unitarity", unit, 1e-12);
    record("compression_identity", comp, 1e-12);
  }
  {
    double worst = 0.0;
    const FactorGraph code4{4, {{1, 3}, {1, 2, 4}}};
    for (double th : {0.3, 0.7, 1.2}) {
      const auto w = PureStateChannel::from_angle(th);
      for (int v = 1; v <= 4; ++v) worst = std::max(worst, std::abs(exact_bit_error(code4, v, w) - oracle_bit_error(code4, w, v).optimal_error));
    }
    for (int t = 0; t < 10; ++t) {
      const FactorGraph g = random_tree_graph(2 + static_cast<int>(uniform_index(rng, 5)), rng);
      const auto w = PureStateChannel::from_angle(0.2 + 1.2 * uniform01(rng));
      for (int v = 1; v <= g.n_vars; ++v) worst = std::max(worst, std::abs(exact_bit_error(g, v, w) - oracle_bit_error(g, w, v).optimal_error));
    }
    record("tree_optimality", worst, 1e-9);
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      const FactorGraph g = random_tree_graph(3 + static_cast<int>(uniform_index(rng, 3)), rng);
      const auto thetas = uniform_angles(g, PureStateChannel::from_angle(pi * uniform01(rng)));
      const DecoderCircuit d = build_destructive(g, 1, thetas);
      const DecoderCircuit c = to_coherent(d);
      for (int s = 0; s < 10; ++s) {
        const StateVector psi = StateVector::random(g.n_vars, rng);
        const auto a = destructive_outcome_distribution(d, psi);
        const auto b = coherent_outcome_distribution(c, psi);
        worst = std::max({worst, std::abs(a[0] - b[0]), std::abs(a[1] - b[1])});
      }
    }
    record("coherent_equivalence", worst, 1e-10);
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const auto w = PureStateChannel::from_angle(pi * uniform01(rng));
      const CheckBranches br = check_convolve(w, w);
      const double lhs = br.p0 * holevo(br.branch0) + br.p1 * holevo(br.branch1) + holevo(var_convolve(w, w));
      worst = std::max(worst, std::abs(lhs - 2.0 * holevo(w)));
    }
    record("polar_conservation", worst, 1e-9);
  }
  {
    double worst = 0.0;
    const FactorGraph code4{4, {{1, 3}, {1, 2, 4}}};
    for (double th : {0.5, 0.9, 1.3}) {
      const SequentialDecoder dec(code4, uniform_angles(code4, PureStateChannel::from_angle(th)));
      worst = std::max(worst, dec.exact_block_error() - dec.block_error_bound());
    }
    record("gao_bound", worst, 1e-12);
  }
  {
    double worst = 0.0;
    for (double g : {0.0, 0.1, 0.3, 0.6, 0.9}) {
      for (double p : {0.1, 0.4, 0.5, 0.8}) worst = std::max(worst, phase_reduce(AdcParams{g, p}).residual);
    }
    record("phase_reduction", worst, 1e-12);
  }
  return res;
}

}  // namespace qbp
