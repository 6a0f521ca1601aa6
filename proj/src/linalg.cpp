#include <algorithm>
#include <cmath>

#include "polynet/common.hpp"

namespace polynet::linalg {

namespace {

// Solves the square system G x = r in place with partial pivoting.
// A vanishing pivot gets a tiny ridge so rank-deficient normal equations
// still return a bounded solution.
Vec solve_square(std::vector<Vec> G, Vec r) {
  const size_t n = r.size();
  for (size_t i = 0; i < n; ++i) {
    size_t piv = i;
    for (size_t k = i + 1; k < n; ++k)
      if (std::fabs(G[k][i]) > std::fabs(G[piv][i])) piv = k;
    std::swap(G[i], G[piv]);
    std::swap(r[i], r[piv]);
    if (std::fabs(G[i][i]) < 1e-14) G[i][i] += 1e-12;
    for (size_t k = i + 1; k < n; ++k) {
      double f = G[k][i] / G[i][i];
      if (f == 0.0) continue;
      for (size_t j = i; j < n; ++j) G[k][j] -= f * G[i][j];
      r[k] -= f * r[i];
    }
  }
  Vec x(n, 0.0);
  for (size_t ii = n; ii-- > 0;) {
    double s = r[ii];
    for (size_t j = ii + 1; j < n; ++j) s -= G[ii][j] * x[j];
    x[ii] = s / G[ii][ii];
  }
  return x;
}

}  // namespace

Vec least_squares(const std::vector<Vec>& rows, const Vec& b) {
  require(rows.size() == b.size(), ErrorCode::InvalidArgument,
          "least_squares: row/rhs count mismatch");
  require(!rows.empty(), ErrorCode::InvalidArgument, "least_squares: empty system");
  const size_t m = rows.size(), n = rows[0].size();
  std::vector<Vec> G(n, Vec(n, 0.0));
  Vec r(n, 0.0);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) {
      r[j] += rows[i][j] * b[i];
      for (size_t k = j; k < n; ++k) G[j][k] += rows[i][j] * rows[i][k];
    }
  }
  for (size_t j = 0; j < n; ++j)
    for (size_t k = 0; k < j; ++k) G[j][k] = G[k][j];
  return solve_square(std::move(G), std::move(r));
}

Vec nnls(const std::vector<Vec>& rows, const Vec& b, int max_iter) {
  require(rows.size() == b.size(), ErrorCode::InvalidArgument,
          "nnls: row/rhs count mismatch");
  const size_t m = rows.size(), n = rows[0].size();
  if (max_iter <= 0) max_iter = 3 * int(n) + 30;

  Vec x(n, 0.0);
  std::vector<bool> passive(n, false);
  const double tol = 1e-12;

  auto residual = [&]() {
    Vec r(m);
    for (size_t i = 0; i < m; ++i) {
      double s = b[i];
      for (size_t j = 0; j < n; ++j)
        if (x[j] != 0.0) s -= rows[i][j] * x[j];
      r[i] = s;
    }
    return r;
  };

  auto solve_passive = [&](const std::vector<size_t>& idx) {
    std::vector<Vec> sub(m, Vec(idx.size()));
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < idx.size(); ++j) sub[i][j] = rows[i][idx[j]];
    return least_squares(sub, b);
  };

  for (int outer = 0; outer < max_iter; ++outer) {
    Vec r = residual();
    // gradient of 1/2||Ax-b||^2 is -A^T r
    double best = tol;
    int bestj = -1;
    for (size_t j = 0; j < n; ++j) {
      if (passive[j]) continue;
      double g = 0.0;
      for (size_t i = 0; i < m; ++i) g += rows[i][j] * r[i];
      if (g > best) {
        best = g;
        bestj = int(j);
      }
    }
    if (bestj < 0) break;
    passive[bestj] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      std::vector<size_t> idx;
      for (size_t j = 0; j < n; ++j)
        if (passive[j]) idx.push_back(j);
      if (idx.empty()) break;
      Vec z = solve_passive(idx);
      bool all_pos = true;
      for (double v : z) all_pos = all_pos && v > tol;
      if (all_pos) {
        std::fill(x.begin(), x.end(), 0.0);
        for (size_t j = 0; j < idx.size(); ++j) x[idx[j]] = z[j];
        break;
      }
      double alpha = 1.0;
      for (size_t j = 0; j < idx.size(); ++j) {
        if (z[j] <= tol) {
          double xj = x[idx[j]];
          double a = xj / (xj - z[j] + 1e-300);
          alpha = std::min(alpha, a);
        }
      }
      for (size_t j = 0; j < idx.size(); ++j) {
        x[idx[j]] += alpha * (z[j] - x[idx[j]]);
        if (x[idx[j]] <= tol) {
          x[idx[j]] = 0.0;
          passive[idx[j]] = false;
        }
      }
    }
  }
  return x;
}

}  // namespace polynet::linalg
