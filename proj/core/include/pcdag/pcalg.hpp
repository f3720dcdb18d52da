#ifndef PCDAG_PCALG_HPP
#define PCDAG_PCALG_HPP

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "pcdag/dataset.hpp"
#include "pcdag/graph.hpp"

namespace pcdag {

// Separation sets recorded by the skeleton phase: S(i,j) is the
// conditioning set whose test removed edge i-j. Stored once per
// unordered pair and served symmetrically.
class SepSets {
 public:
  void record(int i, int j, std::vector<int> k);
  const std::vector<int>* find(int i, int j) const;
  std::size_t size() const { return sets_.size(); }
  const std::map<std::pair<int, int>, std::vector<int>>& entries() const { return sets_; }

 private:
  std::map<std::pair<int, int>, std::vector<int>> sets_;
};

// Inputs of the Gaussian conditional-independence test.
struct CiTestContext {
  CiTestContext(Matrix corr_in, int n_in, double alpha_in);

  Matrix corr;   // p x p sample correlation, unit diagonal
  int n;         // sample size behind corr
  double alpha;  // significance level in (0,1)
};

struct PcDiagnostics {
  long ci_tests = 0;
  long singular_tests = 0;    // conditioning submatrix singular -> edge removed
  long degenerate_tests = 0;  // n - |K| - 3 <= 0 -> edge removed
  int vstructure_conflicts = 0;
  int missing_sepsets = 0;
  int orientation_retries = 0;
  bool invalid_cpdag = false;

  void merge(const PcDiagnostics& other);
};

// Partial correlation of i and j given k, from the inverse of the
// (|k|+2) x (|k|+2) correlation submatrix, clamped away from +-1.
// Throws SingularConditioningError when the submatrix is numerically
// singular.
double partial_correlation(const Matrix& corr, int i, int j, const std::vector<int>& k);

// Z = atanh(rho). Throws ContractViolation for |rho| >= 1.
double fisher_z(double rho);

// Standard normal quantile (used for the test threshold).
double normal_quantile(double prob);

// True = independence retained, i.e. sqrt(n-|k|-3)|Z| <= threshold.
// When n-|k|-3 <= 0 the test cannot reject and returns true.
bool gauss_ci_test(const CiTestContext& ctx, int i, int j, const std::vector<int>& k);

// Pluggable independence decision: true = independent given k.
using CiPredicate = std::function<bool(int i, int j, const std::vector<int>& k)>;

struct SkeletonResult {
  PartiallyDirectedGraph graph;
  SepSets sepsets;
  PcDiagnostics diag;
};

// Skeleton phase: start from the complete graph; for levels l = 0,1,...
// visit ordered adjacent pairs (i,j) lexicographically and test the
// size-l subsets of adj(i)\{j} in lexicographic order, deleting the edge
// and recording the set on the first retained independence. Stops when
// no pair has |adj(i)\{j}| >= l, or l exceeds max_order.
SkeletonResult pc_skeleton(int p, const CiPredicate& independent,
                           std::optional<int> max_order = std::nullopt);
SkeletonResult pc_skeleton(const CiTestContext& ctx, std::optional<int> max_order = std::nullopt);

// Population-oracle variant: independence iff |partial correlation| <= tol.
SkeletonResult pc_skeleton_population(const Matrix& corr, double tol,
                                      std::optional<int> max_order = std::nullopt);

struct OrientResult {
  Cpdag cpdag;
  PcDiagnostics diag;
};

// Orientation phase: place v-structures i -> k <- j for nonadjacent
// pairs with k not in S(i,j) (first orientation wins on conflicts),
// then close under R1-R3. A non-extendable result triggers the retry
// ladder (reversed placement order, then dropping conflicted
// v-structures); if everything fails the best-effort graph is returned
// with the invalid flag set instead of aborting.
OrientResult pc_orient(const PartiallyDirectedGraph& skel, const SepSets& sepsets);

struct PcResult {
  Cpdag cpdag;
  SepSets sepsets;
  PcDiagnostics diag;
};

// Full PC run: correlation, skeleton, orientation.
PcResult pc_cpdag(const Matrix& corr, int n, double alpha,
                  std::optional<int> max_order = std::nullopt);
PcResult pc_cpdag(const Dataset& data, double alpha, std::optional<int> max_order = std::nullopt);

// cov -> corr rescaling; requires strictly positive diagonal.
Matrix correlation_from_covariance(const Matrix& cov);

}  // namespace pcdag

#endif
