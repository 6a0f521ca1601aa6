#ifndef POLYNET_TEST_UTIL_HPP
#define POLYNET_TEST_UTIL_HPP

#include <cmath>
#include <vector>

#include "polynet/common.hpp"
#include "polynet/geometry.hpp"

namespace polynet::testutil {

// Random bounded polygon: k roughly evenly spaced outward normals with
// angular jitter and offsets in [0.6, 1.6]. Contains the origin.
inline ConvexPolytope random_polygon(Rng& rng, size_t k) {
  std::vector<Hyperplane> faces;
  for (size_t i = 0; i < k; ++i) {
    double a = 2.0 * M_PI * (double(i) + 0.35 * rng.uniform()) / double(k);
    faces.emplace_back(Vec{std::cos(a), std::sin(a)}, -rng.uniform(0.6, 1.6));
  }
  return ConvexPolytope(std::move(faces));
}

inline Vec random_point(Rng& rng, size_t d, double lo, double hi) {
  Vec x(d);
  for (double& v : x) v = rng.uniform(lo, hi);
  return x;
}

}  // namespace polynet::testutil

#endif
