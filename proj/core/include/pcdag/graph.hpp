#ifndef PCDAG_GRAPH_HPP
#define PCDAG_GRAPH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pcdag/errors.hpp"
#include "pcdag/rng.hpp"

namespace pcdag {

// Graph on nodes 0..p-1 where each unordered pair carries one mark:
// absent, undirected, or directed one way. Stored as a dense p x p
// arrow matrix: arrow(i,j) means "the pair {i,j} has an edge whose mark
// permits i -> j"; an undirected edge sets both arrow(i,j) and
// arrow(j,i), a directed edge i -> j sets only arrow(i,j).
//
// Values are immutable in all module operations: functions take graphs
// by const reference and return new ones, so sharing across benchmark
// workers needs no synchronization.
class PartiallyDirectedGraph {
 public:
  explicit PartiallyDirectedGraph(int p);

  static PartiallyDirectedGraph complete_undirected(int p);

  int node_count() const { return p_; }

  bool adjacent(int a, int b) const { return arrow(a, b) || arrow(b, a); }
  bool has_undirected(int a, int b) const { return arrow(a, b) && arrow(b, a); }
  bool has_directed(int from, int to) const { return arrow(from, to) && !arrow(to, from); }

  void add_undirected(int a, int b);
  void add_directed(int from, int to);
  void remove_edge(int a, int b);
  // Turn an existing undirected mark into from -> to.
  void orient(int from, int to);

  std::vector<int> adjacency(int v) const;
  std::vector<int> parents(int v) const;
  std::vector<int> children(int v) const;
  std::vector<int> undirected_neighbors(int v) const;
  int degree(int v) const;

  int edge_count() const;
  int undirected_edge_count() const;
  bool fully_directed() const;
  bool fully_undirected() const;

  // Unordered pairs {a,b} with a < b that carry an edge.
  std::vector<std::array<int, 2>> edges() const;

  friend bool operator==(const PartiallyDirectedGraph&, const PartiallyDirectedGraph&) = default;

 private:
  bool arrow(int from, int to) const { return marks_[static_cast<std::size_t>(from) * p_ + to] != 0; }
  void set_arrow(int from, int to, bool value) {
    marks_[static_cast<std::size_t>(from) * p_ + to] = value ? 1 : 0;
  }
  void check_pair(int a, int b) const;

  int p_;
  std::vector<std::uint8_t> marks_;
};

// Fully directed acyclic graph; a topological order is computed and
// cached at construction. Throws ContractViolation when the input has
// undirected marks or a directed cycle.
class Dag {
 public:
  explicit Dag(PartiallyDirectedGraph g);

  const PartiallyDirectedGraph& graph() const { return g_; }
  int node_count() const { return g_.node_count(); }
  const std::vector<int>& topological_order() const { return topo_; }
  std::vector<int> parents(int v) const { return g_.parents(v); }

  friend bool operator==(const Dag& a, const Dag& b) { return a.g_ == b.g_; }

 private:
  PartiallyDirectedGraph g_;
  std::vector<int> topo_;
};

// Completed partially directed acyclic graph: the canonical
// representative of a Markov equivalence class. Construction verifies
// closure under the orientation rules (throws ContractViolation if not)
// and probes for a consistent DAG extension; a graph with no extension
// is kept but flagged invalid rather than rejected, because estimation
// pipelines must keep running on imperfect finite-sample output.
class Cpdag {
 public:
  explicit Cpdag(PartiallyDirectedGraph g);

  const PartiallyDirectedGraph& graph() const { return g_; }
  int node_count() const { return g_.node_count(); }
  bool valid() const { return valid_; }

  friend bool operator==(const Cpdag& a, const Cpdag& b) { return a.g_ == b.g_; }

 private:
  PartiallyDirectedGraph g_;
  bool valid_;
};

// All arrowheads dropped; every present edge becomes undirected.
PartiallyDirectedGraph skeleton(const PartiallyDirectedGraph& g);

// True iff the fully directed graph has no directed cycle (Kahn's
// algorithm). Throws ContractViolation on undirected marks.
bool is_acyclic(const PartiallyDirectedGraph& g);

// Ordered triples (i, k, j) with i -> k <- j, i < j, i and j nonadjacent.
std::vector<std::array<int, 3>> v_structures(const PartiallyDirectedGraph& g);

// Orientation rules R1-R3 applied until none fires. Existing directed
// marks are never reversed; the output is a fixed point (idempotent).
PartiallyDirectedGraph meek_orient(PartiallyDirectedGraph g);

// Random consistent extension: repeatedly orient a random undirected
// edge in a random legal direction (no new v-structure, no directed
// cycle) and re-close under the orientation rules. The whole pass is
// retried up to a fixed budget; exhaustion throws InvalidCpdagError.
Dag extend_to_dag(const Cpdag& c, Rng& rng);

// Canonical equivalence-class representative of a DAG: skeleton plus
// v-structure arrowheads, closed under the orientation rules.
Cpdag cpdag_of(const Dag& d);

// True iff every path between a and b is blocked by s (reachability
// algorithm). The three sets must be pairwise disjoint.
bool d_separated(const Dag& d, const std::vector<int>& a, const std::vector<int>& b,
                 const std::vector<int>& s);

// JSON schema: {"p": int, "edges": [{"a": int, "b": int,
// "mark": "undirected"|"a->b"|"b->a"}]} with a < b per entry.
std::string graph_to_json(const PartiallyDirectedGraph& g);
PartiallyDirectedGraph graph_from_json(const std::string& text);

}  // namespace pcdag

#endif
