#ifndef POLYNET_COMMON_HPP
#define POLYNET_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace polynet {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Errors. Every typed failure in the library derives from Error so the C API
// can map it to a stable code.
// ---------------------------------------------------------------------------

enum class ErrorCode : int {
  InvalidArgument = 1,
  DimensionMismatch = 2,
  UnboundedPolytope = 3,
  EmptyPolytope = 4,
  NumericError = 5,
  IoError = 6,
  BudgetExceeded = 7,
  PreconditionFailed = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

inline void check_dim(size_t expected, size_t got, const char* what) {
  if (expected != got)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": expected dimension " +
                    std::to_string(expected) + ", got " + std::to_string(got));
}

// ---------------------------------------------------------------------------
// Small vector helpers.
// ---------------------------------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec axpy(double alpha, const Vec& x, const Vec& y) {
  Vec r(y);
  for (size_t i = 0; i < x.size(); ++i) r[i] += alpha * x[i];
  return r;
}

inline Vec scaled(const Vec& x, double alpha) {
  Vec r(x);
  for (double& v : r) v *= alpha;
  return r;
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

// Numerically stable sigmoid and log(1+exp(x)).
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double softplus(double x) {
  if (x > 35.0) return x;
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

// ---------------------------------------------------------------------------
// Deterministic RNG. std::normal_distribution is implementation defined, so
// normals are produced by an explicit Box-Muller transform to keep generated
// datasets and initializations byte-identical across toolchains.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // xorshift* generator
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  double uniform() {  // [0, 1)
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_int(std::uint64_t n) {  // [0, n)
    return next_u64() % n;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Dense least squares and nonnegative least squares, small systems only.
// ---------------------------------------------------------------------------

namespace linalg {

// Solves A x = b in the least-squares sense via normal equations with
// partial-pivot Gaussian elimination. A is row-major (rows x cols).
Vec least_squares(const std::vector<Vec>& rows, const Vec& b);

// Lawson-Hanson NNLS: minimize ||A x - b|| subject to x >= 0.
Vec nnls(const std::vector<Vec>& rows, const Vec& b, int max_iter = 0);

// Minimum-norm solution of the underdetermined system A x = b via the dual
// normal equations x = A^T (A A^T)^{-1} b.
Vec min_norm_solution(const std::vector<Vec>& rows, const Vec& b);

}  // namespace linalg

}  // namespace polynet

#endif  // POLYNET_COMMON_HPP
