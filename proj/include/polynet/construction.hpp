#ifndef POLYNET_CONSTRUCTION_HPP
#define POLYNET_CONSTRUCTION_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polynet/geometry.hpp"
#include "polynet/networks.hpp"

namespace polynet {

struct IndicatorBuildConfig {
  double epsilon = 0.1;   // neighborhood margin, data units
  double safety = 10.0;   // multiplier on the estimated slope constant
  int sample_budget = 1000;
  std::uint64_t seed = 1234;

  void validate() const {
    require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
    require(safety >= 1.0, ErrorCode::InvalidArgument, "safety must be >= 1");
    require(sample_budget >= 100, ErrorCode::InvalidArgument,
            "sample_budget must be >= 100");
  }
};

// Two-layer indicator of a polytope: T(x) = 1 on P, < 1 outside P, < 0
// outside the epsilon-neighborhood of P. coeffs must be nonnegative with
// sum_k coeffs_k w_k ~ 0 (facet measures in 2D, balanced coefficients
// elsewhere). Width of the result equals the face count.
TwoLayerNet indicator_network(const ConvexPolytope& P, const Vec& coeffs,
                              const IndicatorBuildConfig& cfg);

// Coefficients for the indicator: exact facet measures when d == 2 and the
// polytope is bounded, balanced coefficients otherwise.
Vec indicator_coefficients(const ConvexPolytope& P);

// Strictly interior point of P, found by maximizing the minimum slack.
// Throws EmptyPolytope when none exists.
Vec interior_point(const ConvexPolytope& P, int iterations = 4000);

// Three-layer classifier from a polytope-basis cover (sum of per-polytope
// indicators minus 1/2). First hidden width is the total face count, second
// hidden width the polytope count; subnet j only touches its own faces.
// When `data` is given, every indicator must be exactly 0/1 on every point
// (no point may land in an epsilon ring); violations raise
// PreconditionFailed naming the polytope.
ThreeLayerSumNet cover_network(const PolytopeBasisCover& cover,
                               const IndicatorBuildConfig& cfg,
                               const LabeledDataset* data = nullptr);

// Width-(d+1) indicator of a j-simplex: the simplex is thickened to a
// d-simplex by auxiliary points at distance epsilon/2 along directions
// orthogonal to its affine hull.
TwoLayerNet simplex_network(const std::vector<Vec>& vertices, double epsilon,
                            const IndicatorBuildConfig& cfg = {});

struct RegressorConfig {
  double epsilon = 0.1;
  double p = 1.0;            // L^p error norm
  long long max_cubes = 200000;
  int validation_samples = 10000;
};

// Piecewise-constant L^p regressor on [0,1]^dx built from per-cube
// indicators of width 2*dx: N(x) = sum_i f(x_i) relu(T_i(x)).
struct RegressorNet {
  size_t dx = 1, dy = 1;
  long long cubes_per_axis = 1;
  double delta = 1.0;
  std::vector<Vec> centers;             // n cube centers
  std::vector<Vec> values;              // n samples of f, each of size dy
  std::vector<TwoLayerNet> indicators;  // n cube indicators
  double empirical_error = 0.0;         // measured L^p error on the grid

  Vec forward(const Vec& x) const;
  // architecture dx -> 2 n dx dy -> n dy -> dy
  std::vector<long long> architecture() const;
};

RegressorNet regressor_network(const std::function<Vec(const Vec&)>& f,
                               size_t dx, size_t dy, double lipschitz,
                               const RegressorConfig& cfg);

// "d->m->J->1" for reporting.
std::string architecture_string(const ThreeLayerSumNet& net);

}  // namespace polynet

#endif  // POLYNET_CONSTRUCTION_HPP
