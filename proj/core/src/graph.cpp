#include "pcdag/graph.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

namespace pcdag {

PartiallyDirectedGraph::PartiallyDirectedGraph(int p) : p_(p) {
  if (p < 0) throw ContractViolation("node count must be nonnegative");
  marks_.assign(static_cast<std::size_t>(p) * static_cast<std::size_t>(p), 0);
}

PartiallyDirectedGraph PartiallyDirectedGraph::complete_undirected(int p) {
  PartiallyDirectedGraph g(p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) g.add_undirected(i, j);
  }
  return g;
}

void PartiallyDirectedGraph::check_pair(int a, int b) const {
  if (a < 0 || a >= p_ || b < 0 || b >= p_) throw ContractViolation("node index out of range");
  if (a == b) throw ContractViolation("self-edges are not allowed");
}

void PartiallyDirectedGraph::add_undirected(int a, int b) {
  check_pair(a, b);
  set_arrow(a, b, true);
  set_arrow(b, a, true);
}

void PartiallyDirectedGraph::add_directed(int from, int to) {
  check_pair(from, to);
  set_arrow(from, to, true);
  set_arrow(to, from, false);
}

void PartiallyDirectedGraph::remove_edge(int a, int b) {
  check_pair(a, b);
  set_arrow(a, b, false);
  set_arrow(b, a, false);
}

void PartiallyDirectedGraph::orient(int from, int to) {
  check_pair(from, to);
  if (!has_undirected(from, to)) {
    throw ContractViolation("orient requires an existing undirected edge");
  }
  set_arrow(to, from, false);
}

std::vector<int> PartiallyDirectedGraph::adjacency(int v) const {
  std::vector<int> out;
  for (int u = 0; u < p_; ++u) {
    if (u != v && adjacent(v, u)) out.push_back(u);
  }
  return out;
}

std::vector<int> PartiallyDirectedGraph::parents(int v) const {
  std::vector<int> out;
  for (int u = 0; u < p_; ++u) {
    if (u != v && has_directed(u, v)) out.push_back(u);
  }
  return out;
}

std::vector<int> PartiallyDirectedGraph::children(int v) const {
  std::vector<int> out;
  for (int u = 0; u < p_; ++u) {
    if (u != v && has_directed(v, u)) out.push_back(u);
  }
  return out;
}

std::vector<int> PartiallyDirectedGraph::undirected_neighbors(int v) const {
  std::vector<int> out;
  for (int u = 0; u < p_; ++u) {
    if (u != v && has_undirected(v, u)) out.push_back(u);
  }
  return out;
}

int PartiallyDirectedGraph::degree(int v) const {
  int d = 0;
  for (int u = 0; u < p_; ++u) {
    if (u != v && adjacent(v, u)) ++d;
  }
  return d;
}

int PartiallyDirectedGraph::edge_count() const {
  int count = 0;
  for (int i = 0; i < p_; ++i) {
    for (int j = i + 1; j < p_; ++j) {
      if (adjacent(i, j)) ++count;
    }
  }
  return count;
}

int PartiallyDirectedGraph::undirected_edge_count() const {
  int count = 0;
  for (int i = 0; i < p_; ++i) {
    for (int j = i + 1; j < p_; ++j) {
      if (has_undirected(i, j)) ++count;
    }
  }
  return count;
}

bool PartiallyDirectedGraph::fully_directed() const {
  for (int i = 0; i < p_; ++i) {
    for (int j = i + 1; j < p_; ++j) {
      if (has_undirected(i, j)) return false;
    }
  }
  return true;
}

bool PartiallyDirectedGraph::fully_undirected() const {
  for (int i = 0; i < p_; ++i) {
    for (int j = i + 1; j < p_; ++j) {
      if (adjacent(i, j) && !has_undirected(i, j)) return false;
    }
  }
  return true;
}

std::vector<std::array<int, 2>> PartiallyDirectedGraph::edges() const {
  std::vector<std::array<int, 2>> out;
  for (int i = 0; i < p_; ++i) {
    for (int j = i + 1; j < p_; ++j) {
      if (adjacent(i, j)) out.push_back({i, j});
    }
  }
  return out;
}

PartiallyDirectedGraph skeleton(const PartiallyDirectedGraph& g) {
  PartiallyDirectedGraph out(g.node_count());
  for (const auto& [a, b] : g.edges()) out.add_undirected(a, b);
  return out;
}

bool is_acyclic(const PartiallyDirectedGraph& g) {
  if (!g.fully_directed()) {
    throw ContractViolation("is_acyclic requires a fully directed graph");
  }
  const int p = g.node_count();
  std::vector<int> indegree(p, 0);
  for (int v = 0; v < p; ++v) indegree[v] = static_cast<int>(g.parents(v).size());
  std::deque<int> ready;
  for (int v = 0; v < p; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  int emitted = 0;
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    ++emitted;
    for (int c : g.children(v)) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  return emitted == p;
}

Dag::Dag(PartiallyDirectedGraph g) : g_(std::move(g)) {
  if (!g_.fully_directed()) throw ContractViolation("DAG requires all edges directed");
  const int p = g_.node_count();
  std::vector<int> indegree(p, 0);
  for (int v = 0; v < p; ++v) indegree[v] = static_cast<int>(g_.parents(v).size());
  std::deque<int> ready;
  for (int v = 0; v < p; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  topo_.reserve(p);
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    topo_.push_back(v);
    for (int c : g_.children(v)) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  if (static_cast<int>(topo_.size()) != p) {
    throw ContractViolation("directed graph contains a cycle");
  }
}

std::vector<std::array<int, 3>> v_structures(const PartiallyDirectedGraph& g) {
  std::vector<std::array<int, 3>> out;
  const int p = g.node_count();
  for (int k = 0; k < p; ++k) {
    const std::vector<int> pa = g.parents(k);
    for (std::size_t x = 0; x < pa.size(); ++x) {
      for (std::size_t y = x + 1; y < pa.size(); ++y) {
        int i = pa[x], j = pa[y];
        if (!g.adjacent(i, j)) out.push_back({std::min(i, j), k, std::max(i, j)});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PartiallyDirectedGraph meek_orient(PartiallyDirectedGraph g) {
  const int p = g.node_count();
  bool changed = true;
  while (changed) {
    changed = false;
    // R1: a -> b, b - c, a and c nonadjacent  =>  b -> c
    for (int b = 0; b < p; ++b) {
      for (int a : g.parents(b)) {
        for (int c : g.undirected_neighbors(b)) {
          if (c != a && !g.adjacent(a, c)) {
            g.orient(b, c);
            changed = true;
          }
        }
      }
    }
    // R2: a - b with a chain a -> c -> b  =>  a -> b
    for (int a = 0; a < p; ++a) {
      for (int b : g.undirected_neighbors(a)) {
        bool chain = false;
        for (int c : g.children(a)) {
          if (g.has_directed(c, b)) {
            chain = true;
            break;
          }
        }
        if (chain) {
          g.orient(a, b);
          changed = true;
        }
      }
    }
    // R3: a - b with a - c -> b, a - d -> b, c and d nonadjacent  =>  a -> b
    for (int a = 0; a < p; ++a) {
      for (int b : g.undirected_neighbors(a)) {
        std::vector<int> spouses;
        for (int c : g.undirected_neighbors(a)) {
          if (c != b && g.has_directed(c, b)) spouses.push_back(c);
        }
        bool fires = false;
        for (std::size_t x = 0; x < spouses.size() && !fires; ++x) {
          for (std::size_t y = x + 1; y < spouses.size() && !fires; ++y) {
            if (!g.adjacent(spouses[x], spouses[y])) fires = true;
          }
        }
        if (fires) {
          g.orient(a, b);
          changed = true;
        }
      }
    }
  }
  return g;
}

namespace {

// Directed path from `from` to `to` using only directed marks.
bool directed_path_exists(const PartiallyDirectedGraph& g, int from, int to) {
  if (from == to) return true;
  std::vector<char> seen(g.node_count(), 0);
  std::deque<int> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int c : g.children(v)) {
      if (c == to) return true;
      if (!seen[c]) {
        seen[c] = 1;
        queue.push_back(c);
      }
    }
  }
  return false;
}

// Would orienting u -> v create a v-structure that is not already
// present, i.e. an existing arrow w -> v with w nonadjacent to u?
bool creates_new_v_structure(const PartiallyDirectedGraph& g, int u, int v) {
  for (int w : g.parents(v)) {
    if (w != u && !g.adjacent(w, u)) return true;
  }
  return false;
}

constexpr int kExtensionRetries = 100;

// One greedy pass: orient undirected edges in random legal directions
// with rule closure after each step, then validate the result against
// the original skeleton and v-structures.
std::optional<PartiallyDirectedGraph> try_extend_once(const PartiallyDirectedGraph& cpdag_graph,
                                                      Rng& rng) {
  PartiallyDirectedGraph g = cpdag_graph;
  while (true) {
    std::vector<std::array<int, 2>> undirected;
    for (const auto& [a, b] : g.edges()) {
      if (g.has_undirected(a, b)) undirected.push_back({a, b});
    }
    if (undirected.empty()) break;
    const auto [a, b] = undirected[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(undirected.size()) - 1))];
    std::vector<std::pair<int, int>> legal;
    if (!creates_new_v_structure(g, a, b) && !directed_path_exists(g, b, a)) legal.push_back({a, b});
    if (!creates_new_v_structure(g, b, a) && !directed_path_exists(g, a, b)) legal.push_back({b, a});
    if (legal.empty()) return std::nullopt;
    const auto [from, to] =
        legal[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(legal.size()) - 1))];
    g.orient(from, to);
    g = meek_orient(g);
  }
  if (!g.fully_directed()) return std::nullopt;
  if (!is_acyclic(g)) return std::nullopt;
  if (skeleton(g) != skeleton(cpdag_graph)) return std::nullopt;
  if (v_structures(g) != v_structures(cpdag_graph)) return std::nullopt;
  return g;
}

std::optional<PartiallyDirectedGraph> try_extend(const PartiallyDirectedGraph& cpdag_graph,
                                                 Rng& rng) {
  for (int attempt = 0; attempt < kExtensionRetries; ++attempt) {
    if (auto g = try_extend_once(cpdag_graph, rng)) return g;
  }
  return std::nullopt;
}

}  // namespace

Cpdag::Cpdag(PartiallyDirectedGraph g) : g_(std::move(g)), valid_(false) {
  if (meek_orient(g_) != g_) {
    throw ContractViolation("CPDAG must be closed under the orientation rules");
  }
  Rng probe(0x9D2C5680);  // fixed probe seed: validity must be deterministic
  valid_ = try_extend(g_, probe).has_value();
}

Dag extend_to_dag(const Cpdag& c, Rng& rng) {
  if (auto g = try_extend(c.graph(), rng)) return Dag(std::move(*g));
  throw InvalidCpdagError("no consistent DAG extension found within the retry budget");
}

Cpdag cpdag_of(const Dag& d) {
  PartiallyDirectedGraph g = skeleton(d.graph());
  // Overlapping v-structures may share an edge; all arrowheads come from
  // the same DAG, so repeated orientations agree.
  for (const auto& [i, k, j] : v_structures(d.graph())) {
    if (g.has_undirected(i, k)) g.orient(i, k);
    if (g.has_undirected(j, k)) g.orient(j, k);
  }
  return Cpdag(meek_orient(std::move(g)));
}

bool d_separated(const Dag& d, const std::vector<int>& a, const std::vector<int>& b,
                 const std::vector<int>& s) {
  const int p = d.node_count();
  std::vector<char> in_a(p, 0), in_b(p, 0), in_s(p, 0);
  auto mark = [p](std::vector<char>& flags, const std::vector<int>& nodes) {
    for (int v : nodes) {
      if (v < 0 || v >= p) throw ContractViolation("node index out of range");
      flags[v] = 1;
    }
  };
  mark(in_a, a);
  mark(in_b, b);
  mark(in_s, s);
  for (int v = 0; v < p; ++v) {
    if (in_a[v] + in_b[v] + in_s[v] > 1) {
      throw ContractViolation("d-separation sets must be pairwise disjoint");
    }
  }

  // Nodes in s or with a descendant in s (ancestors of s, inclusive).
  std::vector<char> anc_s(p, 0);
  {
    std::deque<int> queue;
    for (int v : s) {
      anc_s[v] = 1;
      queue.push_back(v);
    }
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int u : d.parents(v)) {
        if (!anc_s[u]) {
          anc_s[u] = 1;
          queue.push_back(u);
        }
      }
    }
  }

  // Reachability over (node, arrival direction) states. Arriving "up"
  // means the last step went child -> parent (or the node is a source);
  // arriving "down" means parent -> child. A collider passes only when
  // it can reach s through descendants.
  enum : int { kUp = 0, kDown = 1 };
  std::vector<std::array<char, 2>> visited(p, {0, 0});
  std::deque<std::pair<int, int>> queue;
  for (int v : a) queue.push_back({v, kUp});
  while (!queue.empty()) {
    auto [v, dir] = queue.front();
    queue.pop_front();
    if (visited[v][dir]) continue;
    visited[v][dir] = 1;
    if (!in_s[v] && in_b[v]) return false;  // active path reached b
    if (dir == kUp && !in_s[v]) {
      for (int u : d.parents(v)) queue.push_back({u, kUp});
      for (int u : d.graph().children(v)) queue.push_back({u, kDown});
    } else if (dir == kDown) {
      if (!in_s[v]) {
        for (int u : d.graph().children(v)) queue.push_back({u, kDown});
      }
      if (anc_s[v]) {
        for (int u : d.parents(v)) queue.push_back({u, kUp});
      }
    }
  }
  return true;
}

std::string graph_to_json(const PartiallyDirectedGraph& g) {
  nlohmann::ordered_json j;
  j["p"] = g.node_count();
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : g.edges()) {
    nlohmann::ordered_json e;
    e["a"] = a;
    e["b"] = b;
    e["mark"] = g.has_undirected(a, b) ? "undirected" : (g.has_directed(a, b) ? "a->b" : "b->a");
    j["edges"].push_back(std::move(e));
  }
  return j.dump();
}

PartiallyDirectedGraph graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph JSON parse failure: ") + e.what());
  }
  if (!j.contains("p") || !j["p"].is_number_integer()) {
    throw InputError("graph JSON missing integer field 'p'");
  }
  PartiallyDirectedGraph g(j["p"].get<int>());
  for (const auto& e : j.value("edges", nlohmann::json::array())) {
    const int a = e.at("a").get<int>();
    const int b = e.at("b").get<int>();
    const std::string mark = e.at("mark").get<std::string>();
    if (mark == "undirected") {
      g.add_undirected(a, b);
    } else if (mark == "a->b") {
      g.add_directed(a, b);
    } else if (mark == "b->a") {
      g.add_directed(b, a);
    } else {
      throw InputError("unknown edge mark '" + mark + "'");
    }
  }
  return g;
}

}  // namespace pcdag
