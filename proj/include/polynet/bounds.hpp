#ifndef POLYNET_BOUNDS_HPP
#define POLYNET_BOUNDS_HPP

#include <string>
#include <utility>
#include <vector>

#include "polynet/common.hpp"

namespace polynet {

// Facet counts of a simplicial complex: k_j j-dimensional facets, j = 0..J.
struct SimplicialProfile {
  int d = 2;                       // ambient dimension
  std::vector<long long> counts;   // counts[j] = k_j, size J+1

  int max_dim() const { return int(counts.size()) - 1; }
  long long total() const;
  void validate() const;
};

// Betti numbers beta_0..beta_d plus the max face count m of the removed
// prismatic pieces.
struct BettiProfile {
  int d = 2;
  std::vector<long long> beta;  // size d+1
  long long m = 1;

  void validate() const;
};

struct WidthBoundReport {
  std::string formula;
  std::vector<std::pair<std::string, long long>> inputs;
  std::vector<std::pair<std::string, long long>> values;
  // "feasible", "infeasible", "may-fail", "not-ruled-out" or "unknown".
  std::string verdict;
  std::string note;
};

// Width lower bound for separating a convex polytope with m faces in R^d by
// a network with hidden widths d_1..d_k. The capacity d_1 * prod(2 d_j + 1)
// must reach ceil(m/2)+(d-2) for m >= 2d+1, 2d-1 for m in {2d-1, 2d}, and
// d+1 below that.
WidthBoundReport lower_bound_convex(int d, long long m,
                                    const std::vector<long long>& hidden_dims);

// First-layer width bound for a simplicial complex; second hidden width is
// the facet count. Evaluated in exact rational arithmetic with floors
// applied exactly where the closed form places them.
WidthBoundReport simplicial_width_bound(const SimplicialProfile& p);

// Three-layer widths sufficient for a space described by removing prismatic
// polytopes: layer1 = m + 2(b0-1) + sum_{k=1..d} (m - 2(d-k-1)) b_k,
// layer2 = sum_k b_k.
WidthBoundReport betti_width_bound(const BettiProfile& p);

// Necessary condition sum_{i=1..D} prod_{j=i..D} d_j >= 2*sum(beta) - 2.
WidthBoundReport betti_lower_check(const std::vector<long long>& widths,
                                   const std::vector<long long>& beta);

// Face-count feasibility classification: "feasible" when d1 >= m (and a
// second layer exists or the net is two-layer), "may-fail" when all widths
// are <= m-1 or d1 <= m-2, otherwise "unknown".
WidthBoundReport faces_feasibility(int d, long long m,
                                   const std::vector<long long>& widths);

}  // namespace polynet

#endif  // POLYNET_BOUNDS_HPP
