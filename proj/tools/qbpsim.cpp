// qbpsim: command-line driver for the decoding, polar and amplitude-damping experiments.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbp/error.hpp"
#include "qbp/experiments.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kToleranceFailure = 1;
constexpr int kUsage = 2;

// Fills every field not set on the command line from a JSON object whose keys
// are the long flag names.
void apply_config_file(const std::string& path, const CLI::App& sub, qbp::ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw qbp::ParseError("cannot open config " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw qbp::ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw qbp::ParseError("config must be a JSON object");
  auto given = [&](const std::string& flag) {
    const CLI::Option* opt = sub.get_option_no_throw("--" + flag);
    return opt != nullptr && opt->count() > 0;
  };
  try {
    for (const auto& [key, value] : doc.items()) {
      if (sub.get_option_no_throw("--" + key) == nullptr) throw qbp::ParseError("config key \"" + key + "\" is not a flag of this command");
      if (given(key)) continue;
      if (key == "graph") cfg.graph = value.get<std::string>();
      else if (key == "theta") cfg.theta = value.get<double>();
      else if (key == "gamma") cfg.gamma = value.get<double>();
      else if (key == "p") cfg.p = value.get<double>();
      else if (key == "n") cfg.n = value.get<int>();
      else if (key == "k") cfg.k = value.get<int>();
      else if (key == "trials") cfg.trials = value.get<std::size_t>();
      else if (key == "samples") cfg.samples = value.get<std::size_t>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "threshold") cfg.threshold = value.get<double>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "order") cfg.order = value.get<std::string>();
      else if (key == "sequence") cfg.sequence = value.get<std::vector<int>>();
      else if (key == "sequential") cfg.sequential = value.get<bool>();
      else if (key == "rates") cfg.rates = value.get<bool>();
      else if (key == "json") cfg.json_out = value.get<std::string>();
      else throw qbp::ParseError("config key \"" + key + "\" is not supported");
    }
  } catch (const nlohmann::json::type_error& e) {
    throw qbp::ParseError(std::string("config value has the wrong type: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum belief propagation experiments"};
  app.require_subcommand(1);
  qbp::ExperimentConfig cfg;
  std::string config_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Master seed");
    sub->add_option("--out", cfg.out, "Write CSV here instead of stdout");
    sub->add_option("--config", config_path, "JSON file of flag values; flags given on the command line win");
  };
  auto positive = CLI::Range(1.0, 1e12);

  auto* bp = app.add_subcommand("bp-sim", "Per-bit (or --sequential block) decoding on a tree code");
  bp->add_option("--graph", cfg.graph, "Graph JSON file");
  bp->add_option("--theta", cfg.theta, "Channel angle in radians");
  bp->add_option("--trials", cfg.trials, "Monte Carlo trials")->check(positive);
  bp->add_flag("--sequential", cfg.sequential, "Decode all bits sequentially and report block error");
  bp->add_option("--order", cfg.order, "Sequential decoding order")->check(CLI::IsMember({"ascending", "given"}));
  bp->add_option("--sequence", cfg.sequence, "Variable order for --order given")->delimiter(',');
  common(bp);

  auto* pc = app.add_subcommand("polar-construct", "Monte Carlo construction of a polar code");
  pc->add_option("--theta", cfg.theta, "Channel angle in radians");
  pc->add_option("--n", cfg.n, "Block length N (power of two)");
  pc->add_option("--k", cfg.k, "Information bits");
  pc->add_option("--samples", cfg.samples, "Trajectories per index (>= 1000)");
  pc->add_option("--json", cfg.json_out, "Also write the construction as JSON");
  pc->add_option("--threshold", cfg.threshold, "Report the fraction of indices with eps below this on stderr");
  common(pc);

  auto* ps = app.add_subcommand("polar-sim", "Successive-cancellation decoding of a constructed polar code");
  ps->add_option("--theta", cfg.theta, "Channel angle in radians");
  ps->add_option("--n", cfg.n, "Block length N (power of two, <= 16)");
  ps->add_option("--k", cfg.k, "Information bits");
  ps->add_option("--trials", cfg.trials, "Monte Carlo trials")->check(positive);
  ps->add_option("--samples", cfg.samples, "Construction trajectories per index");
  common(ps);

  auto* adc = app.add_subcommand("adc", "Amplitude-damping rate and capacity");
  adc->add_option("--gamma", cfg.gamma, "Damping probability (default: sweep 0..1 step 0.05)");
  adc->add_option("--p", cfg.p, "Input weight on |0> for --rates (default: sweep)");
  adc->add_flag("--rates", cfg.rates, "Emit the fixed-p rate table instead of the capacity table");
  common(adc);

  auto* st = app.add_subcommand("selftest", "Run the invariant suite");
  st->add_flag("--inject-fault", cfg.inject_fault, "Perturb the variable-node unitary")->group("");
  common(st);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  qbp::ExperimentResult result;
  try {
    if (!config_path.empty()) apply_config_file(config_path, *sub, cfg);
    const std::string name = sub->get_name();
    if (name == "bp-sim") result = qbp::run_bp_sim(cfg);
    else if (name == "polar-construct") result = qbp::run_polar_construct(cfg);
    else if (name == "polar-sim") result = qbp::run_polar_sim(cfg);
    else if (name == "adc") result = qbp::run_adc(cfg);
    else result = qbp::run_selftest(cfg);
  } catch (const std::exception& e) {
    std::cerr << "qbpsim: " << e.what() << '\n';
    return kUsage;
  }

  const bool selftest = sub->get_name() == "selftest";
  for (const auto& line : result.notes) (selftest ? std::cout : std::cerr) << line << '\n';
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) {
      std::cerr << "qbpsim: cannot write " << cfg.out << '\n';
      return kUsage;
    }
    qbp::write_csv(out, result.table);
  } else if (!selftest) {
    qbp::write_csv(std::cout, result.table);
  }
  for (const auto& f : result.failures) std::cerr << "qbpsim: FAILED " << f << '\n';
  return result.failures.empty() ? kOk : kToleranceFailure;
}
