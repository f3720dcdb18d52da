#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

namespace pcdag::testing {

namespace {

std::vector<char> descendants_of(const Dag& d, int v) {
  std::vector<char> out(d.node_count(), 0);
  std::deque<int> queue{v};
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int c : d.graph().children(u)) {
      if (!out[c]) {
        out[c] = 1;
        queue.push_back(c);
      }
    }
  }
  return out;
}

}  // namespace

bool d_separated_bruteforce(const Dag& d, const std::vector<int>& a, const std::vector<int>& b,
                            const std::vector<int>& s) {
  const int p = d.node_count();
  std::vector<char> in_s(p, 0), in_b(p, 0);
  for (int v : s) in_s[v] = 1;
  for (int v : b) in_b[v] = 1;

  // reaches_s[v]: v in s or some descendant of v in s
  std::vector<char> reaches_s(p, 0);
  for (int v = 0; v < p; ++v) {
    if (in_s[v]) {
      reaches_s[v] = 1;
      continue;
    }
    const std::vector<char> desc = descendants_of(d, v);
    for (int u : s) {
      if (desc[u]) {
        reaches_s[v] = 1;
        break;
      }
    }
  }

  std::vector<char> on_path(p, 0);
  std::vector<int> path;
  bool active_found = false;

  std::function<void(int)> dfs = [&](int v) {
    if (active_found) return;
    if (in_b[v] && path.size() >= 1) {
      // full path = path + v; verify every internal vertex
      bool active = true;
      for (std::size_t t = 1; t < path.size(); ++t) {
        const int prev = path[t - 1];
        const int mid = path[t];
        const int next = (t + 1 < path.size()) ? path[t + 1] : v;
        const bool collider =
            d.graph().has_directed(prev, mid) && d.graph().has_directed(next, mid);
        if (collider) {
          if (!reaches_s[mid]) {
            active = false;
            break;
          }
        } else if (in_s[mid]) {
          active = false;
          break;
        }
      }
      if (active) {
        active_found = true;
        return;
      }
      // a vertex of b can still be an interior vertex of a longer path
    }
    for (int u : d.graph().adjacency(v)) {
      if (!on_path[u]) {
        on_path[u] = 1;
        path.push_back(v);
        dfs(u);
        path.pop_back();
        on_path[u] = 0;
      }
    }
  };

  for (int start : a) {
    on_path.assign(p, 0);
    on_path[start] = 1;
    path.clear();
    dfs(start);
    if (active_found) return false;
  }
  return true;
}

std::vector<Dag> enumerate_all_dags(int p) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) pairs.push_back({i, j});
  }
  const std::size_t m = pairs.size();
  std::size_t combos = 1;
  for (std::size_t t = 0; t < m; ++t) combos *= 3;

  std::vector<Dag> out;
  for (std::size_t code = 0; code < combos; ++code) {
    PartiallyDirectedGraph g(p);
    std::size_t rest = code;
    for (std::size_t t = 0; t < m; ++t) {
      const int state = static_cast<int>(rest % 3);
      rest /= 3;
      if (state == 1) g.add_directed(pairs[t].first, pairs[t].second);
      if (state == 2) g.add_directed(pairs[t].second, pairs[t].first);
    }
    if (is_acyclic(g)) out.push_back(Dag(std::move(g)));
  }
  return out;
}

std::vector<Dag> equivalence_class_of(const Dag& d) {
  const auto edges = d.graph().edges();
  const std::size_t m = edges.size();
  const auto target_v = v_structures(d.graph());

  std::vector<Dag> out;
  for (std::size_t code = 0; code < (std::size_t{1} << m); ++code) {
    PartiallyDirectedGraph g(d.node_count());
    for (std::size_t t = 0; t < m; ++t) {
      if (code & (std::size_t{1} << t)) {
        g.add_directed(edges[t][0], edges[t][1]);
      } else {
        g.add_directed(edges[t][1], edges[t][0]);
      }
    }
    if (!is_acyclic(g)) continue;
    if (v_structures(g) != target_v) continue;
    out.push_back(Dag(std::move(g)));
  }
  return out;
}

PartiallyDirectedGraph cpdag_bruteforce(const Dag& d) {
  const std::vector<Dag> members = equivalence_class_of(d);
  PartiallyDirectedGraph out(d.node_count());
  for (const auto& [a, b] : d.graph().edges()) {
    bool all_ab = true, all_ba = true;
    for (const Dag& member : members) {
      if (member.graph().has_directed(a, b)) {
        all_ba = false;
      } else {
        all_ab = false;
      }
    }
    if (all_ab) {
      out.add_directed(a, b);
    } else if (all_ba) {
      out.add_directed(b, a);
    } else {
      out.add_undirected(a, b);
    }
  }
  return out;
}

Dag random_dag(int p, double edge_prob, Rng& rng) {
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  PartiallyDirectedGraph g(p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (rng.bernoulli(edge_prob)) g.add_directed(order[i], order[j]);
    }
  }
  return Dag(std::move(g));
}

Matrix random_weights(const Dag& d, Rng& rng, double lo, double hi) {
  const int p = d.node_count();
  Matrix b = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int parent : d.parents(i)) b(i, parent) = rng.uniform(lo, hi);
  }
  return b;
}

Matrix covariance_from_weights(const Matrix& b) {
  const Eigen::Index p = b.rows();
  const Matrix a = Matrix::Identity(p, p) - b;
  const Matrix inv_a = a.fullPivLu().solve(Matrix::Identity(p, p));
  Matrix sigma = inv_a * inv_a.transpose();
  return ((sigma + sigma.transpose()) / 2.0).eval();
}

std::vector<std::vector<char>> moral_adjacency(const Dag& d) {
  const int p = d.node_count();
  std::vector<std::vector<char>> adj(p, std::vector<char>(p, 0));
  for (const auto& [a, b] : d.graph().edges()) {
    adj[a][b] = 1;
    adj[b][a] = 1;
  }
  for (int k = 0; k < p; ++k) {
    const std::vector<int> pa = d.parents(k);
    for (std::size_t x = 0; x < pa.size(); ++x) {
      for (std::size_t y = x + 1; y < pa.size(); ++y) {
        adj[pa[x]][pa[y]] = 1;
        adj[pa[y]][pa[x]] = 1;
      }
    }
  }
  return adj;
}

}  // namespace pcdag::testing
