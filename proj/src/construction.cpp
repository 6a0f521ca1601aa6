#include "polynet/construction.hpp"

#include <algorithm>
#include <cmath>

namespace polynet {

namespace {

// Violation profile g(x) = sum_k c_k relu(w_k.x + b_k) with outward faces.
// Zero exactly on P, positive outside; the indicator slope constant is
// calibrated from its minimum over the epsilon/2-offset surface.
double violation(const ConvexPolytope& P, const Vec& c, const Vec& x) {
  double g = 0.0;
  for (size_t k = 0; k < P.faces.size(); ++k) g += c[k] * relu(P.faces[k].eval(x));
  return g;
}

Vec random_unit(Rng& rng, size_t d) {
  Vec u(d);
  double n = 0.0;
  while (n < 1e-9) {
    for (double& v : u) v = rng.normal();
    n = norm2(u);
  }
  for (double& v : u) v /= n;
  return u;
}

// Shoots a ray x0 + t*u and returns the first face hit, or -1 when the ray
// escapes to infinity (unbounded direction).
int ray_exit(const ConvexPolytope& P, const Vec& x0, const Vec& u, double& t_out) {
  double t_best = std::numeric_limits<double>::infinity();
  int face = -1;
  for (size_t k = 0; k < P.faces.size(); ++k) {
    double du = dot(P.faces[k].w, u);
    if (du <= 1e-12) continue;
    double t = -P.faces[k].eval(x0) / du;
    if (t >= 0.0 && t < t_best) {
      t_best = t;
      face = int(k);
    }
  }
  t_out = t_best;
  return face;
}

}  // namespace

Vec interior_point(const ConvexPolytope& P, int iterations) {
  const size_t d = P.dim();
  Vec x(d, 0.0);
  double scale = 1.0;
  for (const auto& h : P.faces) scale = std::max(scale, std::fabs(h.b));
  // subgradient ascent on min_k(-(w_k.x + b_k))
  double best_slack = -std::numeric_limits<double>::infinity();
  Vec best = x;
  for (int it = 0; it < iterations; ++it) {
    size_t worst = 0;
    double worst_val = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < P.faces.size(); ++k) {
      double v = P.faces[k].eval(x);
      if (v > worst_val) {
        worst_val = v;
        worst = k;
      }
    }
    if (-worst_val > best_slack) {
      best_slack = -worst_val;
      best = x;
    }
    double step = scale / double(it + 2);
    for (size_t i = 0; i < d; ++i) x[i] -= step * P.faces[worst].w[i];
  }
  require(best_slack > 1e-9, ErrorCode::EmptyPolytope,
          "interior point not found (empty polytope)");
  return best;
}

Vec indicator_coefficients(const ConvexPolytope& P) {
  if (P.dim() == 2) {
    try {
      return facet_measures_2d(P).measures;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnboundedPolytope) throw;
      // fall through: slabs and other unbounded-but-balanceable shapes
    }
  }
  return balanced_coefficients(P);
}

TwoLayerNet indicator_network(const ConvexPolytope& P, const Vec& coeffs,
                              const IndicatorBuildConfig& cfg) {
  cfg.validate();
  const size_t d = P.dim();
  const size_t m = P.num_faces();
  check_dim(m, coeffs.size(), "indicator coefficients");
  for (double c : coeffs)
    require(c >= 0.0, ErrorCode::InvalidArgument, "coefficients must be nonnegative");
  require(minkowski_closed(P, coeffs, 1e-6), ErrorCode::PreconditionFailed,
          "coefficients do not satisfy the closure identity");

  // V = sum_k c_k (w_in.x + b_in) is constant in x; evaluate at the origin.
  double V = 0.0;
  for (size_t k = 0; k < m; ++k) V += coeffs[k] * (-P.faces[k].b);
  require(V > 1e-12, ErrorCode::EmptyPolytope,
          "interior point not found (empty polytope)");

  // Estimate the largest value of the (negative) deficit on the epsilon/2
  // offset surface by sampling boundary points plus, in 2D, offset vertices.
  const double off = 0.5 * cfg.epsilon;
  double g_min = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec& x) { g_min = std::min(g_min, violation(P, coeffs, x)); };

  if (d == 2) {
    try {
      auto verts = polytope_vertices_2d(P);
      const size_t nv = verts.size();
      for (size_t i = 0; i < nv; ++i) {
        const Vec& a = verts[i];
        const Vec& b = verts[(i + 1) % nv];
        Vec edge{b[0] - a[0], b[1] - a[1]};
        double len = std::hypot(edge[0], edge[1]);
        if (len < 1e-12) continue;
        Vec n{edge[1] / len, -edge[0] / len};  // outward for ccw order
        int per_edge = std::max(8, cfg.sample_budget / int(nv));
        for (int s = 0; s <= per_edge; ++s) {
          double t = double(s) / double(per_edge);
          consider(Vec{a[0] + t * edge[0] + off * n[0], a[1] + t * edge[1] + off * n[1]});
        }
      }
      // arcs around vertices
      for (const auto& v : verts)
        for (int s = 0; s < 16; ++s) {
          double a = 2.0 * M_PI * double(s) / 16.0;
          Vec x{v[0] + off * std::cos(a), v[1] + off * std::sin(a)};
          if (!P.contains(x)) consider(x);
        }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnboundedPolytope) throw;
      // unbounded 2D shapes fall back to the generic sampler below
      g_min = std::numeric_limits<double>::infinity();
    }
  }

  if (!std::isfinite(g_min)) {
    Vec x0 = interior_point(P);
    Rng rng(cfg.seed);
    for (int s = 0; s < cfg.sample_budget; ++s) {
      Vec u = random_unit(rng, d);
      double t;
      int face = ray_exit(P, x0, u, t);
      if (face < 0) continue;  // unbounded direction
      Vec x = axpy(t, u, x0);
      for (size_t i = 0; i < d; ++i) x[i] += off * P.faces[face].w[i];
      consider(x);
      // a second sample pushed along the ray direction probes edge regions
      Vec y = axpy(t + off, u, x0);
      if (!P.contains(y)) consider(y);
    }
  }

  require(std::isfinite(g_min) && g_min > 1e-15, ErrorCode::NumericError,
          "slope estimation failed (degenerate coefficients)");
  const double M = cfg.safety / g_min;

  TwoLayerNet net;
  net.v0 = 1.0 + M * V;
  net.neurons.resize(m);
  for (size_t k = 0; k < m; ++k) {
    net.neurons[k].v = -M * coeffs[k];
    net.neurons[k].w = scaled(P.faces[k].w, -1.0);  // inward normal
    net.neurons[k].b = -P.faces[k].b;
  }
  return net;
}

ThreeLayerSumNet cover_network(const PolytopeBasisCover& cover,
                               const IndicatorBuildConfig& cfg,
                               const LabeledDataset* data) {
  require(!cover.positives.empty() || !cover.negatives.empty(),
          ErrorCode::InvalidArgument, "cover has no polytopes");
  ThreeLayerSumNet net;
  net.lambda = 1.0;

  auto add = [&](const CoverEntry& e, int a, const std::string& name) {
    const auto* poly = std::get_if<ConvexPolytope>(&e);
    require(poly != nullptr, ErrorCode::InvalidArgument,
            name + ": functional polytopes cannot be rebuilt into indicators");
    ThreeLayerSumNet::Subnet s;
    s.a = a;
    s.net = indicator_network(*poly, indicator_coefficients(*poly), cfg);
    net.subnets.push_back(std::move(s));
  };
  for (size_t i = 0; i < cover.positives.size(); ++i)
    add(cover.positives[i], +1, "P" + std::to_string(i + 1));
  for (size_t j = 0; j < cover.negatives.size(); ++j)
    add(cover.negatives[j], -1, "Q" + std::to_string(j + 1));

  if (data != nullptr) {
    for (size_t s = 0; s < net.subnets.size(); ++s) {
      for (size_t i = 0; i < data->size(); ++i) {
        double t = net.subnets[s].net.forward(data->point(i), data->dim);
        bool inside = std::fabs(t - 1.0) <= 1e-6;
        bool outside = t <= 0.0;
        if (!inside && !outside) {
          size_t np = cover.positives.size();
          std::string name = s < np ? "P" + std::to_string(s + 1)
                                    : "Q" + std::to_string(s - np + 1);
          throw Error(ErrorCode::PreconditionFailed,
                      "epsilon too large: point " + std::to_string(i) +
                          " falls in the margin ring of polytope " + name);
        }
      }
    }
  }
  return net;
}

namespace {

// One-dimensional nullspace of (rows.size() x d) with rows.size() == d-1.
Vec nullspace_1d(std::vector<Vec> A, size_t d) {
  std::vector<size_t> pivot_col;
  size_t r = 0;
  for (size_t c = 0; c < d && r < A.size(); ++c) {
    size_t piv = r;
    for (size_t k = r + 1; k < A.size(); ++k)
      if (std::fabs(A[k][c]) > std::fabs(A[piv][c])) piv = k;
    if (std::fabs(A[piv][c]) < 1e-12) continue;
    std::swap(A[r], A[piv]);
    for (size_t k = 0; k < A.size(); ++k) {
      if (k == r) continue;
      double f = A[k][c] / A[r][c];
      if (f == 0.0) continue;
      for (size_t j = c; j < d; ++j) A[k][j] -= f * A[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  require(r == d - 1, ErrorCode::InvalidArgument, "degenerate simplex face");
  std::vector<bool> is_pivot(d, false);
  for (size_t c : pivot_col) is_pivot[c] = true;
  size_t free_col = 0;
  while (free_col < d && is_pivot[free_col]) ++free_col;
  Vec n(d, 0.0);
  n[free_col] = 1.0;
  for (size_t i = r; i-- > 0;) {
    size_t c = pivot_col[i];
    double s = A[i][free_col];
    n[c] = -s / A[i][c];
  }
  double nn = norm2(n);
  for (double& v : n) v /= nn;
  return n;
}

}  // namespace

TwoLayerNet simplex_network(const std::vector<Vec>& vertices, double epsilon,
                            const IndicatorBuildConfig& cfg_in) {
  require(!vertices.empty(), ErrorCode::InvalidArgument, "simplex needs vertices");
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
  const size_t d = vertices[0].size();
  const size_t j = vertices.size() - 1;
  require(j <= d, ErrorCode::InvalidArgument, "too many simplex vertices");
  for (const auto& v : vertices) check_dim(d, v.size(), "simplex vertex");

  // Orthonormal basis of the affine hull via Gram-Schmidt on edge vectors.
  std::vector<Vec> hull;
  for (size_t i = 1; i < vertices.size(); ++i) {
    Vec e(d);
    for (size_t k = 0; k < d; ++k) e[k] = vertices[i][k] - vertices[0][k];
    for (const auto& h : hull) {
      double pr = dot(e, h);
      for (size_t k = 0; k < d; ++k) e[k] -= pr * h[k];
    }
    double n = norm2(e);
    require(n > 1e-10, ErrorCode::InvalidArgument, "vertices are affinely dependent");
    for (double& v : e) v /= n;
    hull.push_back(std::move(e));
  }

  // Complement directions from the coordinate basis.
  std::vector<Vec> comp;
  for (size_t c = 0; c < d && comp.size() < d - j; ++c) {
    Vec e(d, 0.0);
    e[c] = 1.0;
    for (const auto& h : hull) {
      double pr = dot(e, h);
      for (size_t k = 0; k < d; ++k) e[k] -= pr * h[k];
    }
    for (const auto& h : comp) {
      double pr = dot(e, h);
      for (size_t k = 0; k < d; ++k) e[k] -= pr * h[k];
    }
    double n = norm2(e);
    if (n > 1e-8) {
      for (double& v : e) v /= n;
      comp.push_back(std::move(e));
    }
  }
  require(comp.size() == d - j, ErrorCode::NumericError,
          "failed to complete the simplex to full dimension");

  Vec centroid(d, 0.0);
  for (const auto& v : vertices)
    for (size_t k = 0; k < d; ++k) centroid[k] += v[k] / double(vertices.size());

  std::vector<Vec> pts = vertices;
  for (const auto& u : comp) pts.push_back(axpy(0.5 * epsilon, u, centroid));

  // H-representation of the covering d-simplex: face i spans all points but
  // pts[i], oriented away from pts[i].
  std::vector<Hyperplane> faces;
  for (size_t omit = 0; omit < pts.size(); ++omit) {
    std::vector<Vec> rows;
    size_t base = omit == 0 ? 1 : 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i == omit || i == base) continue;
      Vec e(d);
      for (size_t k = 0; k < d; ++k) e[k] = pts[i][k] - pts[base][k];
      rows.push_back(std::move(e));
    }
    Vec n = nullspace_1d(std::move(rows), d);
    double b = -dot(n, pts[base]);
    double side = dot(n, pts[omit]) + b;
    require(std::fabs(side) > 1e-10, ErrorCode::InvalidArgument,
            "degenerate covering simplex");
    if (side > 0.0) {
      for (double& v : n) v = -v;
      b = -b;
    }
    faces.emplace_back(std::move(n), b);
  }
  ConvexPolytope cover(std::move(faces));

  IndicatorBuildConfig cfg = cfg_in;
  cfg.epsilon = 0.5 * epsilon;  // the cover already spends epsilon/2
  return indicator_network(cover, indicator_coefficients(cover), cfg);
}

Vec RegressorNet::forward(const Vec& x) const {
  check_dim(dx, x.size(), "regressor forward");
  Vec out(dy, 0.0);
  for (size_t i = 0; i < indicators.size(); ++i) {
    double t = relu(indicators[i].forward(x));
    if (t == 0.0) continue;
    for (size_t k = 0; k < dy; ++k) out[k] += values[i][k] * t;
  }
  return out;
}

std::vector<long long> RegressorNet::architecture() const {
  long long n = (long long)indicators.size();
  return {(long long)dx, 2LL * n * (long long)dx * (long long)dy,
          n * (long long)dy, (long long)dy};
}

namespace {

// Axis-aligned box indicator with exact slope calibration: every coefficient
// is 1, the violation at distance t beyond one face is exactly t.
TwoLayerNet box_indicator(const Vec& lo, const Vec& hi, double margin, double safety) {
  const size_t d = lo.size();
  double V = 0.0;
  for (size_t k = 0; k < d; ++k) V += hi[k] - lo[k];
  double M = safety / (0.5 * margin);
  TwoLayerNet net;
  net.v0 = 1.0 + M * V;
  net.neurons.resize(2 * d);
  for (size_t k = 0; k < d; ++k) {
    auto& up = net.neurons[2 * k];  // inward normal -e_k, active below hi
    up.v = -M;
    up.w.assign(d, 0.0);
    up.w[k] = -1.0;
    up.b = hi[k];
    auto& dn = net.neurons[2 * k + 1];
    dn.v = -M;
    dn.w.assign(d, 0.0);
    dn.w[k] = 1.0;
    dn.b = -lo[k];
  }
  return net;
}

}  // namespace

RegressorNet regressor_network(const std::function<Vec(const Vec&)>& f,
                               size_t dx, size_t dy, double lipschitz,
                               const RegressorConfig& cfg) {
  require(dx >= 1 && dy >= 1, ErrorCode::InvalidArgument, "dimensions must be >= 1");
  require(lipschitz > 0.0, ErrorCode::InvalidArgument, "Lipschitz constant must be positive");
  require(cfg.epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
  require(cfg.p >= 1.0, ErrorCode::InvalidArgument, "p must be >= 1");

  const double p = cfg.p;
  double delta_max = cfg.epsilon *
      std::pow(1.0 + std::pow(std::sqrt(double(dx)) * lipschitz, p), -1.0 / p);
  long long kaxis = (long long)std::ceil(1.0 / delta_max);
  if (kaxis < 1) kaxis = 1;
  double n_est = std::pow(double(kaxis), double(dx));
  require(n_est <= double(cfg.max_cubes), ErrorCode::BudgetExceeded,
          "cube budget exceeded: requires " + std::to_string((long long)n_est) +
              " cubes, budget " + std::to_string(cfg.max_cubes));
  long long n = 1;
  for (size_t i = 0; i < dx; ++i) n *= kaxis;
  const double delta = 1.0 / double(kaxis);
  const double r = std::pow(delta, p + 1.0) / (2.0 * double(dx) * (1.0 + std::pow(delta, p)));

  RegressorNet net;
  net.dx = dx;
  net.dy = dy;
  net.cubes_per_axis = kaxis;
  net.delta = delta;
  net.centers.reserve(n);
  net.values.reserve(n);
  net.indicators.reserve(n);

  std::vector<long long> idx(dx, 0);
  for (long long c = 0; c < n; ++c) {
    Vec lo(dx), hi(dx), center(dx);
    for (size_t k = 0; k < dx; ++k) {
      lo[k] = double(idx[k]) * delta;
      hi[k] = lo[k] + delta;
      center[k] = 0.5 * (lo[k] + hi[k]);
    }
    Vec val = f(center);
    check_dim(dy, val.size(), "regressor target sample");
    net.centers.push_back(center);
    net.values.push_back(std::move(val));
    net.indicators.push_back(box_indicator(lo, hi, r, 4.0));
    for (size_t k = 0; k < dx; ++k) {
      if (++idx[k] < kaxis) break;
      idx[k] = 0;
    }
  }

  // a-posteriori empirical error on a regular validation grid
  long long per_axis = std::max<long long>(
      2, (long long)std::ceil(std::pow(double(cfg.validation_samples), 1.0 / double(dx))));
  long long total = 1;
  for (size_t i = 0; i < dx; ++i) total *= per_axis;
  std::vector<long long> g(dx, 0);
  double acc = 0.0;
  for (long long c = 0; c < total; ++c) {
    Vec x(dx);
    for (size_t k = 0; k < dx; ++k) x[k] = (double(g[k]) + 0.5) / double(per_axis);
    Vec out = net.forward(x);
    Vec target = f(x);
    double e = 0.0;
    for (size_t k = 0; k < dy; ++k) e += std::pow(std::fabs(out[k] - target[k]), p);
    acc += e;
    for (size_t k = 0; k < dx; ++k) {
      if (++g[k] < per_axis) break;
      g[k] = 0;
    }
  }
  net.empirical_error = std::pow(acc / double(total), 1.0 / p);
  return net;
}

std::string architecture_string(const ThreeLayerSumNet& net) {
  return std::to_string(net.dim()) + "->" + std::to_string(net.first_width()) +
         "->" + std::to_string(net.subnets.size()) + "->1";
}

}  // namespace polynet
