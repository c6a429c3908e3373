#include "qbp/factor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qbp/error.hpp"

namespace qbp {

namespace {

using json = nlohmann::json;

// Bipartite adjacency with variables at ids 0..n-1 and checks at n..n+m-1.
struct Adjacency {
  int n = 0;
  std::vector<std::vector<int>> var_checks;  // per variable (0-based), ascending check ids

  explicit Adjacency(const FactorGraph& g) : n(g.n_vars), var_checks(static_cast<std::size_t>(g.n_vars)) {
    for (int c = 0; c < static_cast<int>(g.checks.size()); ++c) {
      for (int v : g.checks[static_cast<std::size_t>(c)]) var_checks[static_cast<std::size_t>(v - 1)].push_back(c);
    }
  }
};

int parse_int(const json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + " must be an integer");
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ParseError(std::string(what) + " out of range");
  }
  return static_cast<int>(v);
}

}  // namespace

std::string NodeRef::label() const {
  return (is_variable() ? "x" : "c") + std::to_string(index);
}

void validate_graph(const FactorGraph& graph) {
  if (graph.n_vars < 1) throw ParseError("graph needs at least one variable");
  for (std::size_t c = 0; c < graph.checks.size(); ++c) {
    const auto& check = graph.checks[c];
    if (check.empty()) throw ParseError("check " + std::to_string(c) + " is empty");
    std::vector<int> sorted = check;
    std::sort(sorted.begin(), sorted.end());
    for (int v : sorted) {
      if (v < 1 || v > graph.n_vars) {
        throw ParseError("check " + std::to_string(c) + ": variable index " + std::to_string(v) +
                         " outside [1, " + std::to_string(graph.n_vars) + "]");
      }
    }
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParseError("check " + std::to_string(c) + " repeats a variable");
    }
  }
}

FactorGraph parse_graph(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("graph file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("graph file must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "n" && key != "checks") throw ParseError("unknown key \"" + key + "\" in graph file");
  }
  if (!doc.contains("n") || !doc.contains("checks")) throw ParseError("graph file needs \"n\" and \"checks\"");

  FactorGraph graph;
  graph.n_vars = parse_int(doc.at("n"), "n");
  const auto& checks = doc.at("checks");
  if (!checks.is_array()) throw ParseError("\"checks\" must be an array");
  for (const auto& check : checks) {
    if (!check.is_array()) throw ParseError("each check must be an array of variable indices");
    std::vector<int> vars;
    for (const auto& v : check) vars.push_back(parse_int(v, "variable index"));
    graph.checks.push_back(std::move(vars));
  }
  validate_graph(graph);
  return graph;
}

FactorGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str());
}

std::string to_json(const FactorGraph& graph) {
  json doc;
  doc["n"] = graph.n_vars;
  doc["checks"] = graph.checks;
  return doc.dump();
}

TreeCertificate assert_tree(const FactorGraph& graph) {
  validate_graph(graph);
  const int n = graph.n_vars;
  const int total = n + static_cast<int>(graph.checks.size());
  std::vector<int> parent(static_cast<std::size_t>(total));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<std::vector<int>> forest(static_cast<std::size_t>(total));
  auto label = [&](int id) {
    return id < n ? NodeRef::variable(id + 1).label() : NodeRef::check(id - n).label();
  };

  for (int c = 0; c < static_cast<int>(graph.checks.size()); ++c) {
    const int cid = n + c;
    for (int v : graph.checks[static_cast<std::size_t>(c)]) {
      const int vid = v - 1;
      const int rv = find(vid), rc = find(cid);
      if (rv == rc) {
        // Path vid -> cid through edges accepted so far closes the cycle.
        std::vector<int> prev(static_cast<std::size_t>(total), -1);
        std::queue<int> frontier;
        frontier.push(vid);
        prev[static_cast<std::size_t>(vid)] = vid;
        while (!frontier.empty()) {
          const int u = frontier.front();
          frontier.pop();
          if (u == cid) break;
          for (int w : forest[static_cast<std::size_t>(u)]) {
            if (prev[static_cast<std::size_t>(w)] < 0) {
              prev[static_cast<std::size_t>(w)] = u;
              frontier.push(w);
            }
          }
        }
        std::vector<int> path{cid};
        while (path.back() != vid) path.push_back(prev[static_cast<std::size_t>(path.back())]);
        std::string cycle;
        for (int id : path) cycle += label(id) + " - ";
        cycle += label(cid);
        throw LoopyGraphError("factor graph has a cycle: " + cycle);
      }
      parent[static_cast<std::size_t>(rv)] = rc;
      forest[static_cast<std::size_t>(vid)].push_back(cid);
      forest[static_cast<std::size_t>(cid)].push_back(vid);
    }
  }

  TreeCertificate cert;
  std::vector<int> component_of(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    const int r = find(v);
    int slot = -1;
    for (int u = 0; u < v; ++u) {
      if (find(u) == r) {
        slot = component_of[static_cast<std::size_t>(u)];
        break;
      }
    }
    if (slot < 0) {
      slot = static_cast<int>(cert.components.size());
      cert.components.emplace_back();
    }
    component_of[static_cast<std::size_t>(v)] = slot;
    cert.components[static_cast<std::size_t>(slot)].push_back(v + 1);
  }
  cert.connected = cert.components.size() == 1;
  return cert;
}

std::string TreeSchedule::to_string() const {
  std::ostringstream out;
  out << "root x" << root << "\n";
  for (const auto& e : visits) {
    out << e.node.label() << " <-";
    for (const auto& c : e.children) out << ' ' << c.label();
    out << "\n";
  }
  return out.str();
}

TreeSchedule schedule(const FactorGraph& graph, int root) {
  if (root < 1 || root > graph.n_vars) throw InvalidArgument("root variable out of range");
  assert_tree(graph);
  const Adjacency adj(graph);

  TreeSchedule out;
  out.root = root;
  std::function<void(NodeRef, std::optional<NodeRef>)> visit = [&](NodeRef node, std::optional<NodeRef> parent) {
    ScheduleEntry entry{node, parent, {}};
    if (node.is_variable()) {
      for (int c : adj.var_checks[static_cast<std::size_t>(node.index - 1)]) {
        if (parent && parent->index == c) continue;
        entry.children.push_back(NodeRef::check(c));
      }
    } else {
      std::vector<int> vars = graph.checks[static_cast<std::size_t>(node.index)];
      std::sort(vars.begin(), vars.end());
      for (int v : vars) {
        if (parent && parent->index == v) continue;
        entry.children.push_back(NodeRef::variable(v));
      }
    }
    for (const auto& child : entry.children) visit(child, node);
    out.visits.push_back(std::move(entry));
  };
  visit(NodeRef::variable(root), std::nullopt);
  return out;
}

double check_combine(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(a)) return a > 0 ? b : -b;
  if (std::isinf(b)) return b > 0 ? a : -a;
  const double sign = (a < 0) == (b < 0) ? 1.0 : -1.0;
  return sign * std::min(std::abs(a), std::abs(b)) + std::log1p(std::exp(-std::abs(a + b))) -
         std::log1p(std::exp(-std::abs(a - b)));
}

double classical_bp(const FactorGraph& graph, std::span<const double> llrs, int root) {
  if (llrs.size() != static_cast<std::size_t>(graph.n_vars)) {
    throw DimensionMismatch("need one LLR per variable");
  }
  const TreeSchedule sched = schedule(graph, root);
  std::vector<double> var_msg(static_cast<std::size_t>(graph.n_vars), 0.0);
  std::vector<double> check_msg(graph.checks.size(), 0.0);
  for (const auto& e : sched.visits) {
    if (e.node.is_variable()) {
      double total = llrs[static_cast<std::size_t>(e.node.index - 1)];
      for (const auto& c : e.children) total += check_msg[static_cast<std::size_t>(c.index)];
      var_msg[static_cast<std::size_t>(e.node.index - 1)] = total;
    } else {
      double total = std::numeric_limits<double>::infinity();
      for (const auto& v : e.children) total = check_combine(total, var_msg[static_cast<std::size_t>(v.index - 1)]);
      check_msg[static_cast<std::size_t>(e.node.index)] = total;
    }
  }
  return var_msg[static_cast<std::size_t>(root - 1)];
}

int bitwise_map(double llr) {
  if (std::isnan(llr)) throw InvalidArgument("LLR is NaN");
  return llr < 0 ? 1 : 0;
}

std::vector<Codeword> enumerate_codewords(const FactorGraph& graph) {
  validate_graph(graph);
  const int n = graph.n_vars;
  if (n > 24) throw TooLargeError("codeword enumeration limited to 24 variables");
  // x_1 is the most significant bit, so numeric order is lexicographic order.
  auto bit_of = [n](int v) { return std::uint32_t{1} << (n - v); };

  // Row-reduce the parity-check matrix, then enumerate the null space.
  std::vector<std::uint32_t> rows;
  for (const auto& check : graph.checks) {
    std::uint32_t r = 0;
    for (int v : check) r ^= bit_of(v);
    rows.push_back(r);
  }
  std::vector<int> pivots;
  std::size_t rank = 0;
  for (int v = 1; v <= n && rank < rows.size(); ++v) {
    const std::uint32_t b = bit_of(v);
    auto it = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                           [b](std::uint32_t r) { return (r & b) != 0; });
    if (it == rows.end()) continue;
    std::iter_swap(rows.begin() + static_cast<std::ptrdiff_t>(rank), it);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != rank && (rows[i] & b)) rows[i] ^= rows[rank];
    }
    pivots.push_back(v);
    ++rank;
  }
  std::vector<int> free_vars;
  for (int v = 1; v <= n; ++v) {
    if (std::find(pivots.begin(), pivots.end(), v) == pivots.end()) free_vars.push_back(v);
  }
  std::vector<std::uint32_t> basis;
  for (int f : free_vars) {
    std::uint32_t word = bit_of(f);
    for (std::size_t i = 0; i < rank; ++i) {
      if (rows[i] & bit_of(f)) word |= bit_of(pivots[i]);
    }
    basis.push_back(word);
  }
  std::vector<std::uint32_t> words;
  words.reserve(std::size_t{1} << basis.size());
  for (std::uint64_t combo = 0; combo < (std::uint64_t{1} << basis.size()); ++combo) {
    std::uint32_t w = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (combo >> i & 1) w ^= basis[i];
    }
    words.push_back(w);
  }
  std::sort(words.begin(), words.end());
  std::vector<Codeword> out;
  out.reserve(words.size());
  for (std::uint32_t w : words) {
    Codeword x(static_cast<std::size_t>(n));
    for (int v = 1; v <= n; ++v) x[static_cast<std::size_t>(v - 1)] = (w & bit_of(v)) ? 1 : 0;
    out.push_back(std::move(x));
  }
  return out;
}

FactorGraph random_tree_graph(int n, Rng& rng, int max_check_degree) {
  if (n < 1) throw InvalidArgument("tree needs at least one variable");
  if (max_check_degree < 2) throw InvalidArgument("checks need degree >= 2");
  FactorGraph g;
  g.n_vars = n;
  int placed = 1;
  while (placed < n) {
    const int anchor = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(placed)));
    const int room = std::min(max_check_degree - 1, n - placed);
    const int fresh = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(room)));
    std::vector<int> check{anchor};
    for (int k = 0; k < fresh; ++k) check.push_back(++placed);
    g.checks.push_back(std::move(check));
  }
  std::vector<int> relabel(static_cast<std::size_t>(n));
  std::iota(relabel.begin(), relabel.end(), 1);
  for (int i = n - 1; i > 0; --i) {
    const auto j = uniform_index(rng, static_cast<std::size_t>(i + 1));
    std::swap(relabel[static_cast<std::size_t>(i)], relabel[j]);
  }
  for (auto& check : g.checks) {
    for (int& v : check) v = relabel[static_cast<std::size_t>(v - 1)];
    std::sort(check.begin(), check.end());
  }
  return g;
}

std::vector<FactorGraph> enumerate_tree_codes(int n) {
  if (n < 1 || n > 7) throw TooLargeError("tree-code enumeration supports 1 <= n <= 7");
  using Checks = std::vector<std::vector<int>>;
  auto canonical = [](Checks checks) {
    for (auto& c : checks) std::sort(c.begin(), c.end());
    std::sort(checks.begin(), checks.end());
    return checks;
  };

  // Grow every shape from variable 1, then apply every relabelling.
  std::set<Checks> shapes;
  std::function<void(int, Checks&)> grow = [&](int placed, Checks& checks) {
    if (placed == n) {
      shapes.insert(canonical(checks));
      return;
    }
    for (int anchor = 1; anchor <= placed; ++anchor) {
      for (int fresh = 1; placed + fresh <= n; ++fresh) {
        std::vector<int> check{anchor};
        for (int k = 1; k <= fresh; ++k) check.push_back(placed + k);
        checks.push_back(check);
        grow(placed + fresh, checks);
        checks.pop_back();
      }
    }
  };
  Checks scratch;
  grow(1, scratch);

  std::set<Checks> labelled;
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (const auto& shape : shapes) {
    std::iota(perm.begin(), perm.end(), 1);
    do {
      Checks relabelled = shape;
      for (auto& c : relabelled) {
        for (int& v : c) v = perm[static_cast<std::size_t>(v - 1)];
      }
      labelled.insert(canonical(std::move(relabelled)));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  std::vector<FactorGraph> out;
  out.reserve(labelled.size());
  for (const auto& checks : labelled) out.push_back(FactorGraph{n, checks});
  return out;
}

}  // namespace qbp
