#pragma once

// Parity-check factor graphs. Variables are 1-indexed (as in graph files);
// checks are identified by their position in FactorGraph::checks.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbp/random.hpp"

namespace qbp {

struct FactorGraph {
  int n_vars = 0;
  std::vector<std::vector<int>> checks;

  friend bool operator==(const FactorGraph&, const FactorGraph&) = default;
};

using Codeword = std::vector<std::uint8_t>;

// Parses {"n": <int>, "checks": [[<int>...], ...]}; any other key is rejected.
FactorGraph parse_graph(std::string_view json_text);
FactorGraph load_graph(const std::filesystem::path& path);
std::string to_json(const FactorGraph& graph);

// Throws ParseError on out-of-range or duplicate indices and empty checks.
void validate_graph(const FactorGraph& graph);

struct NodeRef {
  enum class Kind { Variable, Check };
  Kind kind = Kind::Variable;
  int index = 0;  // variable (1-based) or check position (0-based)

  static NodeRef variable(int v) { return {Kind::Variable, v}; }
  static NodeRef check(int c) { return {Kind::Check, c}; }
  bool is_variable() const { return kind == Kind::Variable; }
  std::string label() const;  // "x3" or "c1"

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

struct TreeCertificate {
  bool connected = true;
  // Variables of each connected component, ascending, components ordered by
  // their smallest variable.
  std::vector<std::vector<int>> components;
};

// Certifies that the variable/check graph is a forest. Throws LoopyGraphError
// naming the first cycle closed when edges are added in file order.
TreeCertificate assert_tree(const FactorGraph& graph);

struct ScheduleEntry {
  NodeRef node;
  std::optional<NodeRef> parent;
  std::vector<NodeRef> children;  // messages combined at this node, in merge order
};

// Post-order visit of the root's component: every node appears after all of
// its children. Children are ordered by ascending index.
struct TreeSchedule {
  int root = 1;
  std::vector<ScheduleEntry> visits;

  std::string to_string() const;
};

TreeSchedule schedule(const FactorGraph& graph, int root);

// Check-node rule tanh(l/2) = tanh(a/2) tanh(b/2), evaluated in a form that is
// exact for infinite inputs and stable for large finite ones.
double check_combine(double a, double b);

// Posterior log-ratio log P(x_root = 0 | y) / P(x_root = 1 | y) on a tree or
// forest; llrs[v-1] is the channel LLR of variable v.
double classical_bp(const FactorGraph& graph, std::span<const double> llrs, int root);

// 0 for positive LLR, 1 for negative, 0 on an exact tie.
int bitwise_map(double llr);

// All codewords, in lexicographic order of (x1, ..., xn). Requires n <= 24.
std::vector<Codeword> enumerate_codewords(const FactorGraph& graph);

// Random connected tree code: checks of degree 2..max_check_degree grown from
// variable 1, then variable labels shuffled.
FactorGraph random_tree_graph(int n, Rng& rng, int max_check_degree = 4);

// Every connected tree code on n labelled variables whose checks all have
// degree >= 2 (each counted once, checks in canonical order). Requires n <= 7.
std::vector<FactorGraph> enumerate_tree_codes(int n);

}  // namespace qbp
