#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "pcdag/graph.hpp"
#include "support/oracles.hpp"

using namespace pcdag;
namespace oracle = pcdag::testing;

namespace {

PartiallyDirectedGraph chain3_directed() {
  PartiallyDirectedGraph g(3);
  g.add_directed(0, 1);
  g.add_directed(1, 2);
  return g;
}

}  // namespace

TEST_CASE("mark matrix basics and contracts") {
  PartiallyDirectedGraph g(4);
  CHECK_THROWS_AS(g.add_undirected(0, 0), ContractViolation);
  CHECK_THROWS_AS(g.add_directed(0, 4), ContractViolation);
  g.add_undirected(0, 1);
  g.add_directed(1, 2);
  CHECK(g.adjacent(0, 1));
  CHECK(g.has_undirected(0, 1));
  CHECK(g.has_directed(1, 2));
  CHECK_FALSE(g.has_directed(2, 1));
  CHECK(g.edge_count() == 2);
  CHECK(g.parents(2) == std::vector<int>{1});
  CHECK(g.children(1) == std::vector<int>{2});
  CHECK(g.undirected_neighbors(0) == std::vector<int>{1});
  CHECK_THROWS_AS(g.orient(1, 2), ContractViolation);  // already directed
  g.orient(0, 1);
  CHECK(g.has_directed(0, 1));
  g.remove_edge(0, 1);
  CHECK_FALSE(g.adjacent(0, 1));
  // only one mark per unordered pair: a second directed add overwrites
  g.add_directed(2, 1);
  CHECK(g.has_directed(2, 1));
  CHECK_FALSE(g.has_directed(1, 2));
}

TEST_CASE("skeleton drops arrowheads") {
  CHECK(skeleton(PartiallyDirectedGraph(3)) == PartiallyDirectedGraph(3));

  PartiallyDirectedGraph g(3);
  g.add_directed(0, 1);
  g.add_undirected(1, 2);
  PartiallyDirectedGraph expect(3);
  expect.add_undirected(0, 1);
  expect.add_undirected(1, 2);
  CHECK(skeleton(g) == expect);

  PartiallyDirectedGraph complete(3);
  complete.add_directed(0, 1);
  complete.add_directed(0, 2);
  complete.add_directed(1, 2);
  CHECK(skeleton(complete) == PartiallyDirectedGraph::complete_undirected(3));
}

TEST_CASE("acyclicity check") {
  CHECK(is_acyclic(chain3_directed()));

  PartiallyDirectedGraph cycle(3);
  cycle.add_directed(0, 1);
  cycle.add_directed(1, 2);
  cycle.add_directed(2, 0);
  CHECK_FALSE(is_acyclic(cycle));

  PartiallyDirectedGraph mixed(2);
  mixed.add_undirected(0, 1);
  CHECK_THROWS_AS(is_acyclic(mixed), ContractViolation);
}

TEST_CASE("orientation rule R1") {
  PartiallyDirectedGraph g(3);
  g.add_directed(0, 1);
  g.add_undirected(1, 2);
  const PartiallyDirectedGraph closed = meek_orient(g);
  CHECK(closed.has_directed(0, 1));
  CHECK(closed.has_directed(1, 2));
}

TEST_CASE("orientation rule R2") {
  PartiallyDirectedGraph g(3);
  g.add_undirected(0, 1);
  g.add_directed(0, 2);
  g.add_directed(2, 1);
  const PartiallyDirectedGraph closed = meek_orient(g);
  CHECK(closed.has_directed(0, 1));
  CHECK(closed.has_directed(0, 2));
  CHECK(closed.has_directed(2, 1));
}

TEST_CASE("orientation rule R3") {
  PartiallyDirectedGraph g(4);
  g.add_undirected(0, 1);
  g.add_undirected(0, 2);
  g.add_undirected(0, 3);
  g.add_directed(2, 1);
  g.add_directed(3, 1);
  REQUIRE_FALSE(g.adjacent(2, 3));
  const PartiallyDirectedGraph closed = meek_orient(g);
  CHECK(closed.has_directed(0, 1));
  CHECK(closed.has_undirected(0, 2));
  CHECK(closed.has_undirected(0, 3));
}

TEST_CASE("orientation closure leaves rule-free graphs alone") {
  PartiallyDirectedGraph tree(4);
  tree.add_undirected(0, 1);
  tree.add_undirected(1, 2);
  tree.add_undirected(1, 3);
  CHECK(meek_orient(tree) == tree);
}

TEST_CASE("orientation closure is idempotent and monotone") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = rng.uniform_int(2, 7);
    PartiallyDirectedGraph g(p);
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const double u = rng.uniform();
        if (u < 0.25) {
          g.add_undirected(i, j);
        } else if (u < 0.35) {
          g.add_directed(i, j);
        } else if (u < 0.45) {
          g.add_directed(j, i);
        }
      }
    }
    const PartiallyDirectedGraph once = meek_orient(g);
    CHECK(meek_orient(once) == once);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        if (i != j && g.has_directed(i, j)) CHECK(once.has_directed(i, j));
      }
    }
    CHECK(skeleton(once) == skeleton(g));
  }
}

TEST_CASE("v-structure listing") {
  PartiallyDirectedGraph g(3);
  g.add_directed(0, 1);
  g.add_directed(2, 1);
  CHECK(v_structures(g) == std::vector<std::array<int, 3>>{{0, 1, 2}});
  g.add_undirected(0, 2);  // adjacent parents are no collider triple
  CHECK(v_structures(g).empty());
}

TEST_CASE("extension of an already directed class") {
  // a collider graph is its own class representative
  PartiallyDirectedGraph g(3);
  g.add_directed(0, 1);
  g.add_directed(2, 1);
  Cpdag collider(g);
  REQUIRE(collider.valid());
  Rng rng(1);
  const Dag d = extend_to_dag(collider, rng);
  CHECK(d.graph() == g);
}

TEST_CASE("extension of a single undirected edge") {
  PartiallyDirectedGraph g(2);
  g.add_undirected(0, 1);
  Cpdag c(g);
  REQUIRE(c.valid());
  std::set<bool> seen;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Dag d = extend_to_dag(c, rng);
    CHECK(is_acyclic(d.graph()));
    seen.insert(d.graph().has_directed(0, 1));
  }
  CHECK(seen.size() == 2);  // both members of the class show up
}

TEST_CASE("extension of a chain CPDAG never builds a collider") {
  PartiallyDirectedGraph g(3);
  g.add_undirected(0, 1);
  g.add_undirected(1, 2);
  Cpdag c(g);
  REQUIRE(c.valid());
  for (int seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const Dag d = extend_to_dag(c, rng);
    CHECK(v_structures(d.graph()).empty());
    CHECK(skeleton(d.graph()) == skeleton(g));
  }
}

TEST_CASE("undirected four-cycle admits no consistent extension") {
  PartiallyDirectedGraph g(4);
  g.add_undirected(0, 1);
  g.add_undirected(1, 2);
  g.add_undirected(2, 3);
  g.add_undirected(3, 0);
  Cpdag c(g);
  CHECK_FALSE(c.valid());
  Rng rng(7);
  CHECK_THROWS_AS(extend_to_dag(c, rng), InvalidCpdagError);
}

TEST_CASE("cpdag construction rejects rule-open graphs") {
  PartiallyDirectedGraph g(3);
  g.add_directed(0, 1);
  g.add_undirected(1, 2);  // R1 would fire
  CHECK_THROWS_AS(Cpdag{g}, ContractViolation);
}

TEST_CASE("canonical class representative of small DAGs") {
  // v-structure stays directed
  PartiallyDirectedGraph collider(3);
  collider.add_directed(0, 1);
  collider.add_directed(2, 1);
  CHECK(cpdag_of(Dag(collider)).graph() == collider);

  // chain loses its arrowheads
  PartiallyDirectedGraph chain_skel(3);
  chain_skel.add_undirected(0, 1);
  chain_skel.add_undirected(1, 2);
  CHECK(cpdag_of(Dag(chain3_directed())).graph() == chain_skel);

  // complete DAG: every ordering is equivalent
  PartiallyDirectedGraph complete(3);
  complete.add_directed(0, 1);
  complete.add_directed(0, 2);
  complete.add_directed(1, 2);
  CHECK(cpdag_of(Dag(complete)).graph() == PartiallyDirectedGraph::complete_undirected(3));
}

TEST_CASE("class representative matches enumeration oracle exhaustively (p <= 4)") {
  for (int p = 2; p <= 4; ++p) {
    for (const Dag& d : oracle::enumerate_all_dags(p)) {
      CHECK(cpdag_of(d).graph() == oracle::cpdag_bruteforce(d));
    }
  }
}

TEST_CASE("class representative matches enumeration oracle on random DAGs (p = 5, 6)") {
  Rng rng(99);
  for (int trial = 0; trial < 150; ++trial) {
    const int p = 5 + trial % 2;
    const Dag d = oracle::random_dag(p, rng.uniform(0.2, 0.7), rng);
    CHECK(cpdag_of(d).graph() == oracle::cpdag_bruteforce(d));
  }
}

TEST_CASE("extension stays inside the equivalence class") {
  // Exhaustive for p <= 4, randomized above.
  for (int p = 2; p <= 4; ++p) {
    Rng rng(static_cast<std::uint64_t>(p));
    for (const Dag& d : oracle::enumerate_all_dags(p)) {
      const Cpdag c = cpdag_of(d);
      REQUIRE(c.valid());
      const Dag extended = extend_to_dag(c, rng);
      CHECK(is_acyclic(extended.graph()));
      CHECK(skeleton(extended.graph()) == skeleton(d.graph()));
      CHECK(cpdag_of(extended).graph() == c.graph());
    }
  }
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = rng.uniform_int(5, 6);
    const Dag d = oracle::random_dag(p, rng.uniform(0.2, 0.8), rng);
    const Cpdag c = cpdag_of(d);
    REQUIRE(c.valid());
    const Dag extended = extend_to_dag(c, rng);
    CHECK(cpdag_of(extended).graph() == c.graph());
  }
}

TEST_CASE("d-separation basics") {
  const Dag chain(chain3_directed());
  CHECK(d_separated(chain, {0}, {2}, {1}));
  CHECK_FALSE(d_separated(chain, {0}, {2}, {}));

  PartiallyDirectedGraph g(3);
  g.add_directed(0, 1);
  g.add_directed(2, 1);
  const Dag collider(g);
  CHECK(d_separated(collider, {0}, {2}, {}));
  CHECK_FALSE(d_separated(collider, {0}, {2}, {1}));

  PartiallyDirectedGraph complete(3);
  complete.add_directed(0, 1);
  complete.add_directed(0, 2);
  complete.add_directed(1, 2);
  const Dag full(complete);
  CHECK_FALSE(d_separated(full, {0}, {1}, {2}));
  CHECK_FALSE(d_separated(full, {0}, {2}, {1}));

  CHECK_THROWS_AS(d_separated(chain, {0}, {0}, {1}), ContractViolation);
  CHECK_THROWS_AS(d_separated(chain, {0}, {2}, {2}), ContractViolation);
}

TEST_CASE("descendant of a collider in s activates the path") {
  // 0 -> 1 <- 2 with 1 -> 3: conditioning on 3 opens the collider
  PartiallyDirectedGraph g(4);
  g.add_directed(0, 1);
  g.add_directed(2, 1);
  g.add_directed(1, 3);
  const Dag d(g);
  CHECK(d_separated(d, {0}, {2}, {}));
  CHECK_FALSE(d_separated(d, {0}, {2}, {3}));
}

TEST_CASE("d-separation agrees with the path enumeration oracle") {
  for (int p = 3; p <= 4; ++p) {
    Rng rng(static_cast<std::uint64_t>(300 + p));
    for (const Dag& d : oracle::enumerate_all_dags(p)) {
      // a handful of random disjoint queries per graph
      for (int q = 0; q < 3; ++q) {
        std::vector<int> a, b, s;
        for (int v = 0; v < p; ++v) {
          const double u = rng.uniform();
          if (u < 0.3) {
            a.push_back(v);
          } else if (u < 0.6) {
            b.push_back(v);
          } else if (u < 0.8) {
            s.push_back(v);
          }
        }
        if (a.empty() || b.empty()) continue;
        CHECK(d_separated(d, a, b, s) == oracle::d_separated_bruteforce(d, a, b, s));
      }
    }
  }
  Rng rng(555);
  for (int trial = 0; trial < 400; ++trial) {
    const int p = rng.uniform_int(5, 6);
    const Dag d = oracle::random_dag(p, rng.uniform(0.2, 0.8), rng);
    std::vector<int> a, b, s;
    for (int v = 0; v < p; ++v) {
      const double u = rng.uniform();
      if (u < 0.3) {
        a.push_back(v);
      } else if (u < 0.6) {
        b.push_back(v);
      } else if (u < 0.8) {
        s.push_back(v);
      }
    }
    if (a.empty() || b.empty()) continue;
    CHECK(d_separated(d, a, b, s) == oracle::d_separated_bruteforce(d, a, b, s));
  }
}

TEST_CASE("graph JSON round trip") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = rng.uniform_int(1, 8);
    PartiallyDirectedGraph g(p);
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const double u = rng.uniform();
        if (u < 0.2) {
          g.add_undirected(i, j);
        } else if (u < 0.3) {
          g.add_directed(i, j);
        } else if (u < 0.4) {
          g.add_directed(j, i);
        }
      }
    }
    CHECK(graph_from_json(graph_to_json(g)) == g);
  }
  CHECK_THROWS_AS(graph_from_json("not json"), InputError);
  CHECK_THROWS_AS(graph_from_json("{\"edges\": []}"), InputError);
  CHECK_THROWS_AS(graph_from_json("{\"p\": 2, \"edges\": [{\"a\":0,\"b\":1,\"mark\":\"x\"}]}"),
                  InputError);
}
