#ifndef POLYNET_GEOMETRY_HPP
#define POLYNET_GEOMETRY_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polynet/common.hpp"
#include "polynet/dataset.hpp"

namespace polynet {

// A closed half-space {x : w.x + b <= 0} with unit normal w.
struct Hyperplane {
  Vec w;
  double b = 0.0;

  Hyperplane() = default;

  // Normalizes (w, b) so that ||w|| = 1. Throws on zero normals.
  Hyperplane(Vec w_in, double b_in);

  double eval(const Vec& x) const { return dot(w, x) + b; }
  double eval(const double* x) const {
    double s = b;
    for (size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
  }
};

// Intersection of half-spaces, x in C iff w_k.x + b_k <= 0 for all k.
// Faces are ordered; redundant faces are kept (they align with neurons).
struct ConvexPolytope {
  std::vector<Hyperplane> faces;

  ConvexPolytope() = default;
  explicit ConvexPolytope(std::vector<Hyperplane> f);

  size_t dim() const { return faces.empty() ? 0 : faces[0].w.size(); }
  size_t num_faces() const { return faces.size(); }

  bool contains(const Vec& x) const;
  bool contains(const double* x, size_t d) const;
};

// Convex region defined as a threshold of a convex (or concave) piecewise
// linear function f(x) = v0 + sum_k v_k relu(w_k.x + b_k). Used where the
// explicit face count is unknown. below=true encodes {f < c} (f convex),
// below=false encodes {f > c} (f concave).
struct FunctionalPolytope {
  struct Term {
    double v;
    Vec w;
    double b;
  };
  double v0 = 0.0;
  std::vector<Term> terms;
  double threshold = 0.0;
  bool below = true;

  size_t dim() const { return terms.empty() ? 0 : terms[0].w.size(); }
  double eval(const double* x, size_t d) const;
  bool contains(const double* x, size_t d) const;
  bool contains(const Vec& x) const { return contains(x.data(), x.size()); }
};

using CoverEntry = std::variant<ConvexPolytope, FunctionalPolytope>;

size_t entry_dim(const CoverEntry& e);
bool entry_contains(const CoverEntry& e, const double* x, size_t d);
// Face count of an entry; nullopt for functional polytopes ("unknown").
std::optional<size_t> entry_face_count(const CoverEntry& e);

// Two polytope lists with voting semantics: a point is classified 1 iff
// #{i : x in P_i} > #{j : x in Q_j}.
struct PolytopeBasisCover {
  size_t dim = 0;
  std::vector<CoverEntry> positives;
  std::vector<CoverEntry> negatives;

  size_t total_faces_or_throw() const;  // throws if any entry is functional
};

// Vote difference sum 1[x in P_i] - sum 1[x in Q_j].
int cover_vote(const PolytopeBasisCover& c, const double* x, size_t d);
inline int cover_vote(const PolytopeBasisCover& c, const Vec& x) {
  return cover_vote(c, x.data(), x.size());
}

// 1 iff the vote difference is positive.
int cover_classify(const PolytopeBasisCover& c, const Vec& x);

struct CoverValidation {
  bool valid = false;
  double accuracy = 0.0;
  std::vector<size_t> offenders;  // indices of points violating the semantics
};

// Checks the cover against a dataset under the exact voting semantics.
CoverValidation cover_validate(const PolytopeBasisCover& c,
                               const LabeledDataset& data);

// Facet measures of a bounded 2D polytope: per-face edge lengths after
// clipping by all other half-planes (0 for redundant faces) and the polygon
// area. Throws UnboundedPolytope / EmptyPolytope.
struct FacetMeasureSet {
  Vec measures;        // length m, nonnegative
  double volume = 0.0; // polygon area
};

FacetMeasureSet facet_measures_2d(const ConvexPolytope& P);

// Vertices of a bounded 2D polytope, sorted by angle around the centroid.
std::vector<Vec> polytope_vertices_2d(const ConvexPolytope& P);

// Nonnegative c, not all zero, with sum_k c_k w_k ~ 0 and sum c_k = m.
// Any such c makes sum_k c_k (w_k.x + b_k) constant in x, which is all the
// indicator construction needs in dimensions where exact facet measures are
// out of reach. Throws UnboundedPolytope when no such c exists.
Vec balanced_coefficients(const ConvexPolytope& P);

// ||sum_k c_k w_k|| <= tol_rel * sum_k c_k with outward normals.
bool minkowski_closed(const ConvexPolytope& P, const Vec& coeffs,
                      double tol_rel = 1e-6);

}  // namespace polynet

#endif  // POLYNET_GEOMETRY_HPP
