#include "polynet/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace polynet {

Hyperplane::Hyperplane(Vec w_in, double b_in) : w(std::move(w_in)), b(b_in) {
  double n = norm2(w);
  require(n > 1e-12, ErrorCode::InvalidArgument, "hyperplane normal is zero");
  if (std::fabs(n - 1.0) > 1e-15) {
    for (double& v : w) v /= n;
    b /= n;
  }
}

ConvexPolytope::ConvexPolytope(std::vector<Hyperplane> f) : faces(std::move(f)) {
  require(!faces.empty(), ErrorCode::InvalidArgument, "polytope needs at least one face");
  const size_t d = faces[0].w.size();
  for (const auto& h : faces)
    check_dim(d, h.w.size(), "polytope face");
  for (size_t i = 0; i < faces.size(); ++i) {
    for (size_t j = i + 1; j < faces.size(); ++j) {
      if (std::fabs(faces[i].b - faces[j].b) > 1e-9) continue;
      double dist = 0.0;
      for (size_t k = 0; k < d; ++k)
        dist = std::max(dist, std::fabs(faces[i].w[k] - faces[j].w[k]));
      require(dist > 1e-9, ErrorCode::InvalidArgument,
              "duplicate faces " + std::to_string(i) + " and " + std::to_string(j));
    }
  }
}

bool ConvexPolytope::contains(const double* x, size_t d) const {
  check_dim(dim(), d, "polytope_contains");
  for (const auto& h : faces)
    if (h.eval(x) > 0.0) return false;
  return true;
}

bool ConvexPolytope::contains(const Vec& x) const { return contains(x.data(), x.size()); }

double FunctionalPolytope::eval(const double* x, size_t d) const {
  if (!terms.empty()) check_dim(dim(), d, "functional polytope");
  double s = v0;
  for (const auto& t : terms) {
    double z = t.b;
    for (size_t i = 0; i < d; ++i) z += t.w[i] * x[i];
    s += t.v * relu(z);
  }
  return s;
}

bool FunctionalPolytope::contains(const double* x, size_t d) const {
  double f = eval(x, d);
  return below ? f < threshold : f > threshold;
}

size_t entry_dim(const CoverEntry& e) {
  return std::visit([](const auto& p) { return p.dim(); }, e);
}

bool entry_contains(const CoverEntry& e, const double* x, size_t d) {
  return std::visit([&](const auto& p) { return p.contains(x, d); }, e);
}

std::optional<size_t> entry_face_count(const CoverEntry& e) {
  if (const auto* p = std::get_if<ConvexPolytope>(&e)) return p->num_faces();
  return std::nullopt;
}

size_t PolytopeBasisCover::total_faces_or_throw() const {
  size_t total = 0;
  for (const auto* list : {&positives, &negatives}) {
    for (const auto& e : *list) {
      auto c = entry_face_count(e);
      require(c.has_value(), ErrorCode::InvalidArgument,
              "face count unknown for functional polytope");
      total += *c;
    }
  }
  return total;
}

int cover_vote(const PolytopeBasisCover& c, const double* x, size_t d) {
  if (c.dim != 0) check_dim(c.dim, d, "cover_vote");
  int vote = 0;
  for (const auto& e : c.positives) vote += entry_contains(e, x, d) ? 1 : 0;
  for (const auto& e : c.negatives) vote -= entry_contains(e, x, d) ? 1 : 0;
  return vote;
}

int cover_classify(const PolytopeBasisCover& c, const Vec& x) {
  return cover_vote(c, x.data(), x.size()) > 0 ? 1 : 0;
}

CoverValidation cover_validate(const PolytopeBasisCover& c,
                               const LabeledDataset& data) {
  CoverValidation out;
  size_t correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    int pred = cover_vote(c, data.point(i), data.dim) > 0 ? 1 : 0;
    if (pred == data.labels[i])
      ++correct;
    else
      out.offenders.push_back(i);
  }
  out.accuracy = double(correct) / double(data.size());
  out.valid = out.offenders.empty();
  return out;
}

namespace {

constexpr double kVertexTol = 1e-9;

// Bounded iff the outward normals positively span R^2, i.e. the largest
// angular gap between consecutive normals is < pi.
bool normals_span_2d(const ConvexPolytope& P) {
  std::vector<double> ang;
  ang.reserve(P.faces.size());
  for (const auto& h : P.faces) ang.push_back(std::atan2(h.w[1], h.w[0]));
  std::sort(ang.begin(), ang.end());
  double max_gap = 2.0 * M_PI - (ang.back() - ang.front());
  for (size_t i = 1; i < ang.size(); ++i)
    max_gap = std::max(max_gap, ang[i] - ang[i - 1]);
  return max_gap < M_PI - 1e-12;
}

}  // namespace

std::vector<Vec> polytope_vertices_2d(const ConvexPolytope& P) {
  check_dim(2, P.dim(), "polytope_vertices_2d");
  require(normals_span_2d(P), ErrorCode::UnboundedPolytope,
          "polytope is unbounded (normals do not span the plane)");

  std::vector<Vec> verts;
  const auto& F = P.faces;
  for (size_t i = 0; i < F.size(); ++i) {
    for (size_t j = i + 1; j < F.size(); ++j) {
      double det = F[i].w[0] * F[j].w[1] - F[i].w[1] * F[j].w[0];
      if (std::fabs(det) < 1e-12) continue;
      double x = (-F[i].b * F[j].w[1] + F[j].b * F[i].w[1]) / det;
      double y = (-F[j].b * F[i].w[0] + F[i].b * F[j].w[0]) / det;
      Vec p{x, y};
      bool inside = true;
      for (const auto& h : F)
        if (h.eval(p) > kVertexTol) {
          inside = false;
          break;
        }
      if (!inside) continue;
      bool dup = false;
      for (const auto& q : verts)
        if (std::fabs(q[0] - p[0]) < kVertexTol && std::fabs(q[1] - p[1]) < kVertexTol) {
          dup = true;
          break;
        }
      if (!dup) verts.push_back(std::move(p));
    }
  }
  require(verts.size() >= 3, ErrorCode::EmptyPolytope,
          "polytope has empty interior (fewer than 3 vertices)");

  Vec c{0.0, 0.0};
  for (const auto& v : verts) {
    c[0] += v[0];
    c[1] += v[1];
  }
  c[0] /= double(verts.size());
  c[1] /= double(verts.size());
  std::sort(verts.begin(), verts.end(), [&](const Vec& a, const Vec& b) {
    return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
  });
  return verts;
}

FacetMeasureSet facet_measures_2d(const ConvexPolytope& P) {
  auto verts = polytope_vertices_2d(P);
  const size_t nv = verts.size();

  double area2 = 0.0;
  for (size_t i = 0; i < nv; ++i) {
    const Vec& a = verts[i];
    const Vec& b = verts[(i + 1) % nv];
    area2 += a[0] * b[1] - b[0] * a[1];
  }
  double area = 0.5 * std::fabs(area2);
  require(area > 1e-12, ErrorCode::EmptyPolytope, "polytope has zero area");

  FacetMeasureSet out;
  out.volume = area;
  out.measures.assign(P.faces.size(), 0.0);
  for (size_t k = 0; k < P.faces.size(); ++k) {
    std::vector<const Vec*> on_face;
    for (const auto& v : verts)
      if (std::fabs(P.faces[k].eval(v)) <= 10 * kVertexTol) on_face.push_back(&v);
    double len = 0.0;
    for (size_t i = 0; i < on_face.size(); ++i)
      for (size_t j = i + 1; j < on_face.size(); ++j)
        len = std::max(len, std::hypot((*on_face[i])[0] - (*on_face[j])[0],
                                       (*on_face[i])[1] - (*on_face[j])[1]));
    out.measures[k] = len;
  }
  return out;
}

Vec balanced_coefficients(const ConvexPolytope& P) {
  const size_t d = P.dim();
  const size_t m = P.num_faces();
  // rows: d balance equations sum_k c_k w_k = 0 plus one normalization row
  // sum_k c_k = m.
  std::vector<Vec> rows(d + 1, Vec(m, 0.0));
  Vec rhs(d + 1, 0.0);
  for (size_t k = 0; k < m; ++k)
    for (size_t i = 0; i < d; ++i) rows[i][k] = P.faces[k].w[i];
  for (size_t k = 0; k < m; ++k) rows[d][k] = 1.0;
  rhs[d] = double(m);

  Vec c = linalg::nnls(rows, rhs);
  double sum = std::accumulate(c.begin(), c.end(), 0.0);
  require(sum > 1e-12, ErrorCode::UnboundedPolytope,
          "no nonnegative balanced coefficients (normals do not positively span)");
  double scale = double(m) / sum;
  for (double& v : c) v *= scale;

  Vec res(d, 0.0);
  double l1 = 0.0;
  for (size_t k = 0; k < m; ++k) {
    l1 += c[k];
    for (size_t i = 0; i < d; ++i) res[i] += c[k] * P.faces[k].w[i];
  }
  require(norm2(res) <= 1e-8 * l1, ErrorCode::UnboundedPolytope,
          "balanced coefficients residual too large (polytope unbounded)");
  return c;
}

bool minkowski_closed(const ConvexPolytope& P, const Vec& coeffs, double tol_rel) {
  check_dim(P.num_faces(), coeffs.size(), "minkowski_closed");
  Vec s(P.dim(), 0.0);
  double total = 0.0;
  for (size_t k = 0; k < coeffs.size(); ++k) {
    total += coeffs[k];
    for (size_t i = 0; i < P.dim(); ++i) s[i] += coeffs[k] * P.faces[k].w[i];
  }
  return norm2(s) <= tol_rel * total;
}

}  // namespace polynet
