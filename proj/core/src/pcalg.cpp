#include "pcdag/pcalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/normal.hpp>

#include "pcdag/dagcov.hpp"
#include "pcdag/errors.hpp"

namespace pcdag {

namespace {
constexpr double kRhoClamp = 1.0 - 1e-12;
constexpr double kSingularPivot = 1e-12;  // squared Cholesky pivot on correlation scale
}  // namespace

void SepSets::record(int i, int j, std::vector<int> k) {
  if (i == j) throw ContractViolation("separation set for a self-pair");
  std::sort(k.begin(), k.end());
  sets_[{std::min(i, j), std::max(i, j)}] = std::move(k);
}

const std::vector<int>* SepSets::find(int i, int j) const {
  auto it = sets_.find({std::min(i, j), std::max(i, j)});
  return it == sets_.end() ? nullptr : &it->second;
}

void PcDiagnostics::merge(const PcDiagnostics& other) {
  ci_tests += other.ci_tests;
  singular_tests += other.singular_tests;
  degenerate_tests += other.degenerate_tests;
  vstructure_conflicts += other.vstructure_conflicts;
  missing_sepsets += other.missing_sepsets;
  orientation_retries += other.orientation_retries;
  invalid_cpdag = invalid_cpdag || other.invalid_cpdag;
}

CiTestContext::CiTestContext(Matrix corr_in, int n_in, double alpha_in)
    : corr(std::move(corr_in)), n(n_in), alpha(alpha_in) {
  if (corr.rows() != corr.cols()) throw ContractViolation("correlation matrix must be square");
  if (n < 2) throw ContractViolation("sample size must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractViolation("alpha must lie in (0,1)");
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    if (std::abs(corr(i, i) - 1.0) > 1e-8) {
      throw ContractViolation("correlation matrix must have unit diagonal");
    }
    for (Eigen::Index j = 0; j < corr.cols(); ++j) {
      if (std::abs(corr(i, j) - corr(j, i)) > 1e-8) {
        throw ContractViolation("correlation matrix must be symmetric");
      }
      if (std::abs(corr(i, j)) > 1.0 + 1e-8) {
        throw ContractViolation("correlation entries must lie in [-1,1]");
      }
    }
  }
}

double partial_correlation(const Matrix& corr, int i, int j, const std::vector<int>& k) {
  const int p = static_cast<int>(corr.rows());
  if (i == j) throw ContractViolation("partial correlation of a node with itself");
  if (i < 0 || i >= p || j < 0 || j >= p) throw ContractViolation("node index out of range");
  for (int v : k) {
    if (v < 0 || v >= p) throw ContractViolation("conditioning index out of range");
    if (v == i || v == j) throw ContractViolation("conditioning set contains a tested node");
  }
  if (k.empty()) {
    return std::clamp(corr(i, j), -kRhoClamp, kRhoClamp);
  }

  const int m = static_cast<int>(k.size()) + 2;
  Matrix sub(m, m);
  std::vector<int> idx(static_cast<std::size_t>(m));
  idx[0] = i;
  idx[1] = j;
  for (std::size_t t = 0; t < k.size(); ++t) idx[t + 2] = k[t];
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) sub(r, c) = corr(idx[r], idx[c]);
  }

  Eigen::LLT<Matrix> llt(sub);
  if (llt.info() != Eigen::Success) {
    throw SingularConditioningError("conditioning submatrix is not positive definite");
  }
  const Matrix& l = llt.matrixLLT();
  for (int d = 0; d < m; ++d) {
    if (l(d, d) * l(d, d) <= kSingularPivot) {
      throw SingularConditioningError("conditioning submatrix is numerically singular");
    }
  }
  Matrix rhs = Matrix::Zero(m, 2);
  rhs(0, 0) = 1.0;
  rhs(1, 1) = 1.0;
  const Matrix prec = llt.solve(rhs);
  const double w_ii = prec(0, 0);
  const double w_jj = prec(1, 1);
  const double w_ij = prec(0, 1);
  if (!(w_ii > 0.0) || !(w_jj > 0.0)) {
    throw SingularConditioningError("inverted submatrix lost positive definiteness");
  }
  const double rho = -w_ij / std::sqrt(w_ii * w_jj);
  return std::clamp(rho, -kRhoClamp, kRhoClamp);
}

double fisher_z(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw ContractViolation("fisher_z requires |rho| < 1; clamp first");
  }
  return 0.5 * std::log((1.0 + rho) / (1.0 - rho));
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw ContractViolation("quantile probability must be in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), prob);
}

bool gauss_ci_test(const CiTestContext& ctx, int i, int j, const std::vector<int>& k) {
  const int dof = ctx.n - static_cast<int>(k.size()) - 3;
  if (dof <= 0) return true;  // null variance undefined: cannot reject
  const double rho = partial_correlation(ctx.corr, i, j, k);
  const double z = fisher_z(rho);
  return std::sqrt(static_cast<double>(dof)) * std::abs(z) <=
         normal_quantile(1.0 - ctx.alpha / 2.0);
}

namespace {

// Lexicographic size-l combinations of `pool`; visit returns false to
// stop early (edge deleted).
template <typename Visit>
void for_each_combination(const std::vector<int>& pool, int l, const Visit& visit) {
  const int m = static_cast<int>(pool.size());
  if (l > m) return;
  std::vector<int> pick(static_cast<std::size_t>(l));
  std::vector<int> cursor(static_cast<std::size_t>(l));
  for (int t = 0; t < l; ++t) cursor[t] = t;
  while (true) {
    for (int t = 0; t < l; ++t) pick[t] = pool[cursor[t]];
    if (!visit(pick)) return;
    int t = l - 1;
    while (t >= 0 && cursor[t] == m - l + t) --t;
    if (t < 0) return;
    ++cursor[t];
    for (int u = t + 1; u < l; ++u) cursor[u] = cursor[u - 1] + 1;
  }
}

}  // namespace

SkeletonResult pc_skeleton(int p, const CiPredicate& independent, std::optional<int> max_order) {
  if (p < 0) throw ContractViolation("node count must be nonnegative");
  SkeletonResult res{PartiallyDirectedGraph::complete_undirected(p), SepSets{}, PcDiagnostics{}};
  PartiallyDirectedGraph& g = res.graph;

  int l = 0;
  while (true) {
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        if (j == i || !g.adjacent(i, j)) continue;
        std::vector<int> pool = g.adjacency(i);
        pool.erase(std::remove(pool.begin(), pool.end(), j), pool.end());
        if (static_cast<int>(pool.size()) < l) continue;
        for_each_combination(pool, l, [&](const std::vector<int>& k) {
          ++res.diag.ci_tests;
          if (independent(i, j, k)) {
            g.remove_edge(i, j);
            res.sepsets.record(i, j, k);
            return false;
          }
          return true;
        });
      }
    }
    ++l;
    if (max_order && l > *max_order) break;
    bool candidate_left = false;
    for (int i = 0; i < p && !candidate_left; ++i) {
      const int deg = g.degree(i);
      if (deg - 1 >= l && deg >= 1) candidate_left = true;
    }
    if (!candidate_left) break;
  }
  return res;
}

SkeletonResult pc_skeleton(const CiTestContext& ctx, std::optional<int> max_order) {
  PcDiagnostics counters;
  const auto predicate = [&ctx, &counters](int i, int j, const std::vector<int>& k) {
    if (ctx.n - static_cast<int>(k.size()) - 3 <= 0) {
      ++counters.degenerate_tests;
      return true;
    }
    try {
      return gauss_ci_test(ctx, i, j, k);
    } catch (const SingularConditioningError&) {
      ++counters.singular_tests;
      return true;  // exact collinearity: keep the run alive, drop the edge
    }
  };
  SkeletonResult res = pc_skeleton(static_cast<int>(ctx.corr.rows()), predicate, max_order);
  res.diag.merge(counters);
  return res;
}

SkeletonResult pc_skeleton_population(const Matrix& corr, double tol,
                                      std::optional<int> max_order) {
  if (!(tol >= 0.0)) throw ContractViolation("population tolerance must be nonnegative");
  PcDiagnostics counters;
  const auto predicate = [&corr, tol, &counters](int i, int j, const std::vector<int>& k) {
    try {
      return std::abs(partial_correlation(corr, i, j, k)) <= tol;
    } catch (const SingularConditioningError&) {
      ++counters.singular_tests;
      return true;
    }
  };
  SkeletonResult res = pc_skeleton(static_cast<int>(corr.rows()), predicate, max_order);
  res.diag.merge(counters);
  return res;
}

namespace {

struct Placement {
  PartiallyDirectedGraph g;
  int conflicts = 0;
  int missing_sepsets = 0;
  std::set<std::array<int, 3>> conflicted;  // triples on either side of a conflict
};

Placement place_v_structures(const PartiallyDirectedGraph& skel, const SepSets& seps,
                             bool reversed_pairs,
                             const std::set<std::array<int, 3>>* skip = nullptr) {
  const int p = skel.node_count();
  Placement out{skel};
  PartiallyDirectedGraph& g = out.g;

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (!skel.adjacent(i, j)) pairs.push_back({i, j});
    }
  }
  if (reversed_pairs) std::reverse(pairs.begin(), pairs.end());

  // Which placements own each arrowhead, for conflict attribution.
  std::map<std::pair<int, int>, std::vector<std::array<int, 3>>> owners;

  for (const auto& [i, j] : pairs) {
    for (int k = 0; k < p; ++k) {
      if (k == i || k == j || !g.adjacent(i, k) || !g.adjacent(j, k)) continue;
      const std::vector<int>* sep = seps.find(i, j);
      if (sep == nullptr) {
        ++out.missing_sepsets;
        continue;
      }
      if (std::find(sep->begin(), sep->end(), k) != sep->end()) continue;
      const std::array<int, 3> triple{i, k, j};
      if (skip != nullptr && skip->count(triple) > 0) continue;
      // First orientation wins: an existing arrowhead pointing away from
      // k vetoes this v-structure.
      if (g.has_directed(k, i) || g.has_directed(k, j)) {
        ++out.conflicts;
        out.conflicted.insert(triple);
        for (const auto& away : {std::pair<int, int>{k, i}, std::pair<int, int>{k, j}}) {
          if (g.has_directed(away.first, away.second)) {
            auto it = owners.find(away);
            if (it != owners.end()) {
              out.conflicted.insert(it->second.begin(), it->second.end());
            }
          }
        }
        continue;
      }
      if (g.has_undirected(i, k)) g.orient(i, k);
      if (g.has_undirected(j, k)) g.orient(j, k);
      owners[{i, k}].push_back(triple);
      owners[{j, k}].push_back(triple);
    }
  }
  return out;
}

}  // namespace

OrientResult pc_orient(const PartiallyDirectedGraph& skel, const SepSets& sepsets) {
  Placement first = place_v_structures(skel, sepsets, /*reversed_pairs=*/false);
  PcDiagnostics diag;
  diag.vstructure_conflicts = first.conflicts;
  diag.missing_sepsets = first.missing_sepsets;

  Cpdag candidate(meek_orient(first.g));
  if (candidate.valid()) return {std::move(candidate), diag};

  // Retry 1: place v-structures in reversed pair order.
  ++diag.orientation_retries;
  Placement second = place_v_structures(skel, sepsets, /*reversed_pairs=*/true);
  Cpdag reversed(meek_orient(second.g));
  if (reversed.valid()) return {std::move(reversed), diag};

  // Retry 2: drop every v-structure that took part in a conflict.
  ++diag.orientation_retries;
  Placement third = place_v_structures(skel, sepsets, /*reversed_pairs=*/false, &first.conflicted);
  Cpdag reduced(meek_orient(third.g));
  diag.invalid_cpdag = !reduced.valid();
  return {std::move(reduced), diag};
}

Matrix correlation_from_covariance(const Matrix& cov) {
  if (cov.rows() != cov.cols()) throw ContractViolation("covariance matrix must be square");
  const Eigen::Index p = cov.rows();
  Vector scale(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw NumericalError("covariance diagonal must be strictly positive for correlations");
    }
    scale(i) = std::sqrt(cov(i, i));
  }
  Matrix corr(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      corr(i, j) = std::clamp(cov(i, j) / (scale(i) * scale(j)), -1.0, 1.0);
    }
    corr(i, i) = 1.0;
  }
  corr = ((corr + corr.transpose()) / 2.0).eval();
  return corr;
}

PcResult pc_cpdag(const Matrix& corr, int n, double alpha, std::optional<int> max_order) {
  if (n < 4) throw ContractViolation("PC needs n >= 4 so marginal tests are defined");
  CiTestContext ctx(corr, n, alpha);
  SkeletonResult skel = pc_skeleton(ctx, max_order);
  OrientResult oriented = pc_orient(skel.graph, skel.sepsets);
  PcDiagnostics diag = skel.diag;
  diag.merge(oriented.diag);
  return {std::move(oriented.cpdag), std::move(skel.sepsets), diag};
}

PcResult pc_cpdag(const Dataset& data, double alpha, std::optional<int> max_order) {
  if (data.n() < 4) throw ContractViolation("PC needs n >= 4 so marginal tests are defined");
  const Matrix corr = correlation_from_covariance(sample_covariance(data));
  return pc_cpdag(corr, data.n(), alpha, max_order);
}

}  // namespace pcdag
