#include <doctest.h>

#include <cmath>

#include "polynet/bounds.hpp"
#include "polynet/common.hpp"

using namespace polynet;

namespace {

long long value_of(const WidthBoundReport& r, const std::string& key) {
  for (const auto& [k, v] : r.values)
    if (k == key) return v;
  FAIL("missing value " << key);
  return 0;
}

// Independent reimplementation of the first-layer bound using floating
// point, kept deliberately separate from the rational-arithmetic path.
long long simplicial_bound_oracle(int d, const std::vector<long long>& counts) {
  auto kj = [&](int j) -> double {
    return (j >= 0 && j < int(counts.size())) ? double(counts[j]) : 0.0;
  };
  double k = 0;
  for (long long c : counts) k += double(c);
  double s = 0;
  for (int j = 0; j <= (d - 1) / 2; ++j) s += kj(j);
  double first = k * (d + 1) - double(d - 1) * std::floor(s / 2.0 + 1e-9);
  double inner = 0;
  for (int j = 0; 2 * j <= d; ++j)
    inner += kj(j) * double(j + 2) / double(d - j) + double(j + 2) / double(j + 1);
  for (int j = d / 2 + 1; j < int(counts.size()); ++j) inner += kj(j);
  double second = double(d + 1) * std::floor(inner + 1e-9);
  return (long long)std::llround(std::min(first, second));
}

bool betti_lower_oracle(const std::vector<long long>& widths,
                        const std::vector<long long>& beta) {
  double lhs = 0;
  for (size_t i = 0; i < widths.size(); ++i) {
    double prod = 1;
    for (size_t j = i; j < widths.size(); ++j) prod *= double(widths[j]);
    lhs += prod;
  }
  double rhs = 0;
  for (long long b : beta) rhs += 2.0 * double(b);
  rhs -= 2.0;
  return lhs < rhs;  // true = infeasible
}

}  // namespace

TEST_CASE("convex lower bound reproduces the polygon width function") {
  // d=2: three neurons suffice up to hexagons, then ceil(m/2)
  for (long long m : {3, 4, 5, 6}) {
    auto r = lower_bound_convex(2, m, {3});
    CHECK(value_of(r, "required") == 3);
    CHECK(r.verdict == "not-ruled-out");
  }
  auto r7 = lower_bound_convex(2, 7, {3});
  CHECK(value_of(r7, "required") == 4);
  CHECK(r7.verdict == "infeasible");

  for (long long m = 5; m <= 40; ++m) {
    auto r = lower_bound_convex(2, m, {1});
    CHECK(value_of(r, "required") == (m + 1) / 2);
  }
}

TEST_CASE("convex lower bound with depth capacity") {
  auto r = lower_bound_convex(3, 9, {2, 2});
  CHECK(value_of(r, "required") == 6);   // ceil(9/2) + (3-2)
  CHECK(value_of(r, "capacity") == 10);  // 2 * (2*2+1)
  CHECK(r.verdict == "not-ruled-out");
}

TEST_CASE("simplicial bound for two triangles") {
  SimplicialProfile p;
  p.d = 2;
  p.counts = {0, 0, 2};
  auto r = simplicial_width_bound(p);
  CHECK(value_of(r, "d1_first") == 6);
  CHECK(value_of(r, "d1_second") == 15);
  CHECK(value_of(r, "d1_bound") == 6);
  CHECK(value_of(r, "d2") == 2);
}

TEST_CASE("simplicial bound for a single full simplex matches d+1") {
  SimplicialProfile p;
  p.d = 2;
  p.counts = {0, 0, 1};
  auto r = simplicial_width_bound(p);
  CHECK(value_of(r, "d1_bound") == 3);
}

TEST_CASE("simplicial bound for isolated points in R4") {
  SimplicialProfile p;
  p.d = 4;
  p.counts = {4};
  auto r = simplicial_width_bound(p);
  CHECK(value_of(r, "d1_first") == 14);   // 4*5 - 3*floor(4/2)
  CHECK(value_of(r, "d1_second") == 30);  // 5*floor(4*(2/4) + 2 + 3/2 + 4/3)
  CHECK(value_of(r, "d1_bound") == 14);
  CHECK(value_of(r, "d1_bound") == simplicial_bound_oracle(4, {4}));
}

TEST_CASE("simplicial bound agrees with an independent reimplementation") {
  Rng rng(4711);
  for (int trial = 0; trial < 200; ++trial) {
    int d = 1 + int(rng.uniform_int(6));
    int J = int(rng.uniform_int(std::uint64_t(d + 1)));
    std::vector<long long> counts(J + 1, 0);
    for (auto& c : counts) c = (long long)rng.uniform_int(5);
    long long total = 0;
    for (long long c : counts) total += c;
    if (total == 0) counts[J] = 1;
    SimplicialProfile p;
    p.d = d;
    p.counts = counts;
    auto r = simplicial_width_bound(p);
    CHECK(value_of(r, "d1_bound") == simplicial_bound_oracle(d, counts));
  }
}

TEST_CASE("simplicial bound is nondecreasing in every facet count") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    int d = 2 + int(rng.uniform_int(4));
    std::vector<long long> counts(size_t(rng.uniform_int(std::uint64_t(d))) + 1, 0);
    for (auto& c : counts) c = 1 + (long long)rng.uniform_int(4);
    SimplicialProfile p{d, counts};
    long long base = value_of(simplicial_width_bound(p), "d1_bound");
    for (size_t j = 0; j < counts.size(); ++j) {
      SimplicialProfile q{d, counts};
      q.counts[j] += 1;
      CHECK(value_of(simplicial_width_bound(q), "d1_bound") >= base);
    }
  }
}

TEST_CASE("betti upper bound") {
  BettiProfile single;
  single.d = 2;
  single.m = 9;
  single.beta = {1, 0, 0};
  auto r0 = betti_width_bound(single);
  CHECK(value_of(r0, "layer1") == 9);  // single convex polytope
  CHECK(value_of(r0, "layer2") == 1);
  CHECK(r0.note.empty());

  BettiProfile annulus;
  annulus.d = 2;
  annulus.m = 4;
  annulus.beta = {1, 1, 0};
  auto r1 = betti_width_bound(annulus);
  CHECK(value_of(r1, "layer1") == 8);  // 4 + 0 + (4 - 2(2-1-1)) * 1
  CHECK(value_of(r1, "layer2") == 2);

  BettiProfile hexish;
  hexish.d = 2;
  hexish.m = 6;
  hexish.beta = {1, 1, 0};
  auto r2 = betti_width_bound(hexish);
  CHECK(value_of(r2, "layer1") == 12);
  CHECK(value_of(r2, "layer2") == 2);

  BettiProfile top;
  top.d = 2;
  top.m = 4;
  top.beta = {1, 0, 1};
  auto r3 = betti_width_bound(top);
  CHECK_FALSE(r3.note.empty());  // beta_d > 0 flags the looser variant
}

TEST_CASE("betti upper bound monotone in beta and m") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    BettiProfile p;
    p.d = 2 + int(rng.uniform_int(3));
    p.m = 2 * p.d + (long long)rng.uniform_int(6);
    p.beta.assign(p.d + 1, 0);
    p.beta[0] = 1 + (long long)rng.uniform_int(3);
    for (int k = 1; k <= p.d; ++k) p.beta[k] = (long long)rng.uniform_int(3);
    long long base = value_of(betti_width_bound(p), "layer1");
    for (int k = 0; k <= p.d; ++k) {
      BettiProfile q = p;
      q.beta[k] += 1;
      CHECK(value_of(betti_width_bound(q), "layer1") >= base);
    }
    BettiProfile q = p;
    q.m += 1;
    CHECK(value_of(betti_width_bound(q), "layer1") >= base);
  }
}

TEST_CASE("betti lower check") {
  auto r0 = betti_lower_check({4, 2}, {1, 2, 3});  // sum beta = 6, lhs 10 >= 10
  CHECK(r0.verdict == "not-ruled-out");
  auto r1 = betti_lower_check({1, 1}, {1, 1, 1});  // lhs 2 < 4
  CHECK(r1.verdict == "infeasible");
  auto r2 = betti_lower_check({1}, {1});  // rhs 0
  CHECK(r2.verdict == "not-ruled-out");
}

TEST_CASE("betti lower check agrees with an independent reimplementation") {
  Rng rng(2717);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<long long> widths(1 + rng.uniform_int(3));
    for (auto& w : widths) w = 1 + (long long)rng.uniform_int(4);
    std::vector<long long> beta(1 + rng.uniform_int(3));
    for (auto& b : beta) b = (long long)rng.uniform_int(4);
    if (beta[0] == 0) beta[0] = 1;
    auto r = betti_lower_check(widths, beta);
    CHECK((r.verdict == "infeasible") == betti_lower_oracle(widths, beta));
  }
}

TEST_CASE("face-count feasibility classification") {
  CHECK(faces_feasibility(2, 4, {4, 1}).verdict == "feasible");
  CHECK(faces_feasibility(3, 4, {3, 3, 3}).verdict == "may-fail");
  CHECK(faces_feasibility(2, 4, {2}).verdict == "may-fail");
  CHECK(faces_feasibility(2, 4, {3, 9}).verdict == "unknown");
}

TEST_CASE("bound evaluation is deterministic") {
  SimplicialProfile p;
  p.d = 3;
  p.counts = {1, 2, 3};
  auto a = simplicial_width_bound(p);
  auto b = simplicial_width_bound(p);
  CHECK(a.values == b.values);
  CHECK(a.verdict == b.verdict);
}

TEST_CASE("profiles validate their invariants") {
  SimplicialProfile p;
  p.d = 2;
  p.counts = {0, 0, 0, 1};  // J > d
  CHECK_THROWS_AS(simplicial_width_bound(p), Error);

  BettiProfile q;
  q.d = 2;
  q.beta = {0, 1, 0};  // beta_0 must be >= 1
  q.m = 4;
  CHECK_THROWS_AS(betti_width_bound(q), Error);
}
