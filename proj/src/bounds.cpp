#include "polynet/bounds.hpp"

#include <numeric>

namespace polynet {

namespace {

// Minimal exact rational on long long; the sums here stay tiny.
struct Rat {
  long long num = 0;
  long long den = 1;

  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  Rat& operator+=(const Rat& o) {
    num = num * o.den + o.num * den;
    den *= o.den;
    reduce();
    return *this;
  }

  long long floor_val() const {
    long long q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
  }
};

Rat frac(long long n, long long d) {
  Rat r{n, d};
  r.reduce();
  return r;
}

}  // namespace

long long SimplicialProfile::total() const {
  long long t = 0;
  for (long long k : counts) t += k;
  return t;
}

void SimplicialProfile::validate() const {
  require(d >= 1, ErrorCode::InvalidArgument, "ambient dimension must be >= 1");
  require(!counts.empty(), ErrorCode::InvalidArgument, "profile needs facet counts");
  require(max_dim() <= d, ErrorCode::InvalidArgument,
          "facet dimension exceeds ambient dimension");
  for (long long k : counts)
    require(k >= 0, ErrorCode::InvalidArgument, "facet counts must be nonnegative");
  require(total() >= 1, ErrorCode::InvalidArgument, "profile needs at least one facet");
}

void BettiProfile::validate() const {
  require(d >= 1, ErrorCode::InvalidArgument, "ambient dimension must be >= 1");
  require(int(beta.size()) == d + 1, ErrorCode::InvalidArgument,
          "beta must list beta_0..beta_d");
  for (long long b : beta)
    require(b >= 0, ErrorCode::InvalidArgument, "Betti numbers must be nonnegative");
  require(beta[0] >= 1, ErrorCode::InvalidArgument, "beta_0 must be >= 1");
  require(m >= 1, ErrorCode::InvalidArgument, "face count m must be >= 1");
}

WidthBoundReport lower_bound_convex(int d, long long m,
                                    const std::vector<long long>& hidden_dims) {
  require(d >= 1 && m >= 1, ErrorCode::InvalidArgument, "d and m must be positive");
  require(!hidden_dims.empty(), ErrorCode::InvalidArgument, "need at least one hidden width");
  for (long long w : hidden_dims)
    require(w >= 1, ErrorCode::InvalidArgument, "hidden widths must be positive");

  long long required;
  if (m >= 2 * d + 1)
    required = (m + 1) / 2 + (d - 2);
  else if (m == 2 * d - 1 || m == 2 * d)
    required = 2 * d - 1;
  else
    required = d + 1;

  long long capacity = hidden_dims[0];
  for (size_t j = 1; j < hidden_dims.size(); ++j) capacity *= 2 * hidden_dims[j] + 1;

  WidthBoundReport r;
  r.formula = "lower_bound_convex";
  r.inputs = {{"d", d}, {"m", m}};
  for (size_t j = 0; j < hidden_dims.size(); ++j)
    r.inputs.emplace_back("d" + std::to_string(j + 1), hidden_dims[j]);
  r.values = {{"required", required}, {"capacity", capacity}};
  r.verdict = capacity < required ? "infeasible" : "not-ruled-out";
  return r;
}

WidthBoundReport simplicial_width_bound(const SimplicialProfile& p) {
  p.validate();
  const int d = p.d;
  auto kj = [&](int j) -> long long {
    return (j >= 0 && j <= p.max_dim()) ? p.counts[j] : 0;
  };
  const long long k = p.total();

  // first expression: k(d+1) - (d-1) * floor( sum_{j<= (d-1)/2} k_j / 2 )
  long long s = 0;
  for (int j = 0; j <= (d - 1) / 2; ++j) s += kj(j);
  long long first = k * (d + 1) - (d - 1) * (s / 2);

  // second expression: (d+1) * floor( sum_{2j<=d} (k_j (j+2)/(d-j) + (j+2)/(j+1))
  //                                   + sum_{2j>d} k_j )
  Rat acc{0, 1};
  for (int j = 0; 2 * j <= d; ++j) {
    acc += frac(kj(j) * (j + 2), d - j);
    acc += frac(j + 2, j + 1);
  }
  long long tail = 0;
  for (int j = d / 2 + 1; j <= p.max_dim(); ++j) tail += kj(j);
  acc += frac(tail, 1);
  long long second = (d + 1) * acc.floor_val();

  WidthBoundReport r;
  r.formula = "simplicial_width_bound";
  r.inputs = {{"d", d}, {"k", k}};
  for (int j = 0; j <= p.max_dim(); ++j)
    r.inputs.emplace_back("k" + std::to_string(j), kj(j));
  r.values = {{"d1_bound", std::min(first, second)},
              {"d1_first", first},
              {"d1_second", second},
              {"d2", k}};
  r.verdict = "feasible";
  return r;
}

WidthBoundReport betti_width_bound(const BettiProfile& p) {
  p.validate();
  const int d = p.d;
  long long layer1 = p.m + 2 * (p.beta[0] - 1);
  for (int kk = 1; kk <= d; ++kk) layer1 += (p.m - 2 * (d - kk - 1)) * p.beta[kk];
  long long layer2 = 0;
  for (long long b : p.beta) layer2 += b;

  WidthBoundReport r;
  r.formula = "betti_width_bound";
  r.inputs = {{"d", d}, {"m", p.m}};
  for (int kk = 0; kk <= d; ++kk)
    r.inputs.emplace_back("beta" + std::to_string(kk), p.beta[kk]);
  r.values = {{"layer1", layer1}, {"layer2", layer2}};
  r.verdict = "feasible";
  if (p.beta[d] > 0)
    r.note = "top-dimension count beta_d included in layer1; a tighter variant "
             "sums holes only up to dimension d-1";
  return r;
}

WidthBoundReport betti_lower_check(const std::vector<long long>& widths,
                                   const std::vector<long long>& beta) {
  require(!widths.empty(), ErrorCode::InvalidArgument, "need at least one width");
  for (long long w : widths)
    require(w >= 1, ErrorCode::InvalidArgument, "widths must be positive");
  long long beta_sum = 0;
  for (long long b : beta) {
    require(b >= 0, ErrorCode::InvalidArgument, "Betti numbers must be nonnegative");
    beta_sum += b;
  }

  // sum_{i=1..D} prod_{j=i..D} d_j via a right-to-left scan
  long long lhs = 0, prod = 1;
  for (size_t i = widths.size(); i-- > 0;) {
    prod *= widths[i];
    lhs += prod;
  }
  long long rhs = 2 * beta_sum - 2;

  WidthBoundReport r;
  r.formula = "betti_lower_check";
  for (size_t j = 0; j < widths.size(); ++j)
    r.inputs.emplace_back("d" + std::to_string(j + 1), widths[j]);
  r.inputs.emplace_back("beta_sum", beta_sum);
  r.values = {{"lhs", lhs}, {"rhs", rhs}};
  r.verdict = lhs < rhs ? "infeasible" : "not-ruled-out";
  return r;
}

WidthBoundReport faces_feasibility(int d, long long m,
                                   const std::vector<long long>& widths) {
  require(d >= 1 && m >= 1, ErrorCode::InvalidArgument, "d and m must be positive");
  require(!widths.empty(), ErrorCode::InvalidArgument, "need at least one width");

  long long d1 = widths[0];
  long long max_w = d1;
  for (long long w : widths) max_w = std::max(max_w, w);

  WidthBoundReport r;
  r.formula = "faces_feasibility";
  r.inputs = {{"d", d}, {"m", m}};
  for (size_t j = 0; j < widths.size(); ++j)
    r.inputs.emplace_back("d" + std::to_string(j + 1), widths[j]);
  r.values = {{"d1", d1}, {"max_width", max_w}};

  if (d1 >= m)
    r.verdict = "feasible";
  else if (max_w <= m - 1 || d1 <= m - 2)
    r.verdict = "may-fail";
  else
    r.verdict = "unknown";
  return r;
}

}  // namespace polynet
