#include <doctest.h>

#include <cmath>

#include "polynet/geometry.hpp"
#include "support/test_util.hpp"

using namespace polynet;

namespace {

ConvexPolytope unit_square() {
  std::vector<Hyperplane> faces;
  faces.emplace_back(Vec{1.0, 0.0}, -1.0);
  faces.emplace_back(Vec{-1.0, 0.0}, -1.0);
  faces.emplace_back(Vec{0.0, 1.0}, -1.0);
  faces.emplace_back(Vec{0.0, -1.0}, -1.0);
  return ConvexPolytope(std::move(faces));
}

ConvexPolytope slab_x(double half_width) {
  std::vector<Hyperplane> faces;
  faces.emplace_back(Vec{1.0, 0.0}, -half_width);
  faces.emplace_back(Vec{-1.0, 0.0}, -half_width);
  return ConvexPolytope(std::move(faces));
}

}  // namespace

TEST_CASE("hyperplane normalization") {
  Hyperplane h(Vec{3.0, 4.0}, 10.0);
  CHECK(norm2(h.w) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.b == doctest::Approx(2.0));
  CHECK_THROWS_AS(Hyperplane(Vec{0.0, 0.0}, 1.0), Error);
}

TEST_CASE("polytope membership on the unit square") {
  ConvexPolytope sq = unit_square();
  CHECK(sq.contains(Vec{0.0, 0.0}));
  CHECK_FALSE(sq.contains(Vec{1.5, 0.0}));
  CHECK(sq.contains(Vec{1.0, 1.0}));  // boundary is inside
}

TEST_CASE("membership dimension mismatch is a typed error") {
  ConvexPolytope sq = unit_square();
  try {
    sq.contains(Vec{0.0, 0.0, 0.0});
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("duplicate faces rejected") {
  std::vector<Hyperplane> faces;
  faces.emplace_back(Vec{1.0, 0.0}, -1.0);
  faces.emplace_back(Vec{1.0, 0.0}, -1.0);
  CHECK_THROWS_AS(ConvexPolytope(std::move(faces)), Error);
}

TEST_CASE("membership monotone under face removal") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    ConvexPolytope poly = testutil::random_polygon(rng, 3 + trial % 7);
    for (int pt = 0; pt < 40; ++pt) {
      Vec x = testutil::random_point(rng, 2, -3.0, 3.0);
      if (!poly.contains(x)) continue;
      for (size_t drop = 0; drop < poly.faces.size(); ++drop) {
        std::vector<Hyperplane> rest;
        for (size_t k = 0; k < poly.faces.size(); ++k)
          if (k != drop) rest.push_back(poly.faces[k]);
        CHECK(ConvexPolytope(rest).contains(x));
      }
    }
  }
}

TEST_CASE("cover voting on nested strips") {
  // nested slabs P1 > Q1 > P2 > Q2 reproduce the interleaved-band picture
  PolytopeBasisCover cover;
  cover.dim = 2;
  cover.positives = {slab_x(4.0), slab_x(2.0)};
  cover.negatives = {slab_x(3.0), slab_x(1.0)};

  CHECK(cover_vote(cover, Vec{3.5, 0.0}) == 1);   // positive band, outer
  CHECK(cover_vote(cover, Vec{1.5, 0.0}) == 1);   // positive band, inner
  CHECK(cover_classify(cover, Vec{3.5, 0.0}) == 1);
  CHECK(cover_vote(cover, Vec{2.5, 0.0}) == 0);   // negative band
  CHECK(cover_vote(cover, Vec{0.5, 0.0}) == 0);   // innermost negative
  CHECK(cover_vote(cover, Vec{5.0, 0.0}) == 0);   // outside everything
  CHECK(cover_classify(cover, Vec{2.5, 0.0}) == 0);
}

TEST_CASE("empty cover classifies everything as 0") {
  PolytopeBasisCover cover;
  cover.dim = 2;
  CHECK(cover_classify(cover, Vec{0.3, -0.7}) == 0);
}

TEST_CASE("cover classification invariant under permutation") {
  Rng rng(7);
  PolytopeBasisCover cover;
  cover.dim = 2;
  for (int i = 0; i < 3; ++i) cover.positives.emplace_back(testutil::random_polygon(rng, 4 + i));
  for (int i = 0; i < 2; ++i) cover.negatives.emplace_back(testutil::random_polygon(rng, 5 - i));

  PolytopeBasisCover shuffled = cover;
  std::swap(shuffled.positives[0], shuffled.positives[2]);
  std::swap(shuffled.negatives[0], shuffled.negatives[1]);

  for (int pt = 0; pt < 200; ++pt) {
    Vec x = testutil::random_point(rng, 2, -2.0, 2.0);
    CHECK(cover_classify(cover, x) == cover_classify(shuffled, x));
  }
}

TEST_CASE("facet measures of the unit square") {
  auto fm = facet_measures_2d(unit_square());
  REQUIRE(fm.measures.size() == 4);
  for (double m : fm.measures) CHECK(m == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fm.volume == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(minkowski_closed(unit_square(), fm.measures));
}

TEST_CASE("facet measures of a right triangle") {
  std::vector<Hyperplane> faces;
  faces.emplace_back(Vec{-1.0, 0.0}, 0.0);  // x >= 0
  faces.emplace_back(Vec{0.0, -1.0}, 0.0);  // y >= 0
  faces.emplace_back(Vec{1.0, 1.0}, -1.0);  // x + y <= 1
  ConvexPolytope tri(std::move(faces));
  auto fm = facet_measures_2d(tri);
  CHECK(fm.measures[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fm.measures[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fm.measures[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(fm.volume == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("redundant face gets measure zero but keeps its slot") {
  ConvexPolytope sq = unit_square();
  sq.faces.emplace_back(Vec{1.0, 0.0}, -5.0);  // x <= 5 never tight
  ConvexPolytope withRedundant(sq.faces);
  auto fm = facet_measures_2d(withRedundant);
  REQUIRE(fm.measures.size() == 5);
  CHECK(fm.measures[4] == 0.0);
  CHECK(fm.volume == doctest::Approx(4.0));
}

TEST_CASE("hexagon volume matches Monte Carlo rejection sampling") {
  Rng rng(2024);
  ConvexPolytope hex = testutil::random_polygon(rng, 6);
  auto fm = facet_measures_2d(hex);

  // oracle: 1e6-sample rejection estimate in the [-2,2]^2 bounding box
  const size_t N = 1000000;
  const double box_area = 16.0;
  size_t hits = 0;
  Rng mc(555);
  for (size_t i = 0; i < N; ++i)
    if (hex.contains(testutil::random_point(mc, 2, -2.0, 2.0))) ++hits;
  double p = double(hits) / double(N);
  double estimate = p * box_area;
  double sigma = box_area * std::sqrt(p * (1.0 - p) / double(N));
  CHECK(std::fabs(fm.volume - estimate) <= 3.0 * sigma);
}

TEST_CASE("Minkowski closure holds for random bounded polygons") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    ConvexPolytope poly = testutil::random_polygon(rng, 3 + trial % 9);
    auto fm = facet_measures_2d(poly);
    CHECK(minkowski_closed(poly, fm.measures));
  }
}

TEST_CASE("facet measures reject unbounded and empty polytopes") {
  try {
    facet_measures_2d(slab_x(1.0));
    FAIL("expected unbounded error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundedPolytope);
  }

  std::vector<Hyperplane> faces;  // x <= -1 and x >= 1 and a y-box: empty
  faces.emplace_back(Vec{1.0, 0.0}, 1.0);
  faces.emplace_back(Vec{-1.0, 0.0}, 1.0);
  faces.emplace_back(Vec{0.0, 1.0}, -1.0);
  faces.emplace_back(Vec{0.0, -1.0}, -1.0);
  try {
    facet_measures_2d(ConvexPolytope(std::move(faces)));
    FAIL("expected empty error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyPolytope);
  }
}

TEST_CASE("balanced coefficients of the unit square are uniform") {
  Vec c = balanced_coefficients(unit_square());
  REQUIRE(c.size() == 4);
  for (double v : c) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("balanced coefficients match facet measures on simple polygons") {
  // both live in the one-dimensional nullspace of the normal matrix
  Rng rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    ConvexPolytope poly = testutil::random_polygon(rng, 3 + trial % 6);
    auto fm = facet_measures_2d(poly);
    bool simple = true;
    for (double m : fm.measures) simple = simple && m > 1e-9;
    if (!simple) continue;
    Vec c = balanced_coefficients(poly);
    double ratio = fm.measures[0] / c[0];
    for (size_t k = 1; k < c.size(); ++k)
      CHECK(fm.measures[k] / c[k] == doctest::Approx(ratio).epsilon(1e-6));
  }
}

TEST_CASE("balanced coefficients for regular simplex normals in R3") {
  double s = 1.0 / std::sqrt(3.0);
  std::vector<Hyperplane> faces;
  faces.emplace_back(Vec{s, s, s}, -1.0);
  faces.emplace_back(Vec{s, -s, -s}, -1.0);
  faces.emplace_back(Vec{-s, s, -s}, -1.0);
  faces.emplace_back(Vec{-s, -s, s}, -1.0);
  ConvexPolytope simplex(std::move(faces));
  Vec c = balanced_coefficients(simplex);
  Vec sum(3, 0.0);
  double l1 = 0.0;
  for (size_t k = 0; k < 4; ++k) {
    l1 += c[k];
    for (size_t i = 0; i < 3; ++i) sum[i] += c[k] * simplex.faces[k].w[i];
  }
  CHECK(norm2(sum) <= 1e-8 * l1);
}

TEST_CASE("balanced coefficients reject a wedge") {
  std::vector<Hyperplane> faces;
  faces.emplace_back(Vec{1.0, 0.0}, -1.0);
  faces.emplace_back(Vec{0.0, 1.0}, -1.0);
  try {
    balanced_coefficients(ConvexPolytope(std::move(faces)));
    FAIL("expected unbounded error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundedPolytope);
  }
}

TEST_CASE("balanced coefficients accept a slab") {
  Vec c = balanced_coefficients(slab_x(1.0));
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("functional polytope thresholds") {
  FunctionalPolytope f;  // f(x) = relu(x0) convex, region {f < 0.5}
  f.v0 = 0.0;
  f.terms.push_back({1.0, Vec{1.0, 0.0}, 0.0});
  f.threshold = 0.5;
  f.below = true;
  CHECK(f.contains(Vec{0.2, 3.0}));
  CHECK_FALSE(f.contains(Vec{0.7, 0.0}));
  f.below = false;
  CHECK(f.contains(Vec{0.7, 0.0}));
}
