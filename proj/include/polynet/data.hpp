#ifndef POLYNET_DATA_HPP
#define POLYNET_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "polynet/dataset.hpp"
#include "polynet/geometry.hpp"

namespace polynet {

enum class SyntheticKind {
  SwissRoll,
  Xor,
  TwoCircles,
  TwoMoons,
  TwoTriangles,
  HexagonPentagon,
};

SyntheticKind synthetic_kind_from_string(const std::string& name);
std::string to_string(SyntheticKind kind);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::SwissRoll;
  size_t n = 1000;
  double noise = 0.04;  // gaussian, clamped at 3 sigma so margins survive
  std::uint64_t seed = 1;

  void validate() const {
    require(n >= 2, ErrorCode::InvalidArgument, "need at least 2 points");
    require(noise >= 0.0, ErrorCode::InvalidArgument, "noise must be nonnegative");
  }
};

// Deterministic generator; classes stay disjoint with positive margin for
// noise below the per-kind threshold (see gen notes in data.cpp).
LabeledDataset gen_synthetic(const SyntheticSpec& spec);

// Smallest distance between points of different labels.
double min_interclass_distance(const LabeledDataset& data);

// Hand-built covers matching gen_synthetic at default noise:
//   swiss_roll        4 polytopes, 20 faces
//   two_triangles     2 polytopes, 6 faces
//   hexagon_pentagon  2 polytopes, 11 faces
//   xor               1 polytope (slab), 2 faces
//   two_circles       1 polytope, 6 faces
PolytopeBasisCover reference_cover(SyntheticKind kind);

// CSV with one point per row, coordinates then the 0/1 label.
void save_csv(const LabeledDataset& data, const std::string& path);
LabeledDataset load_csv(const std::string& path);

// Raw multi-class image sets (labels 0..9, pixels scaled to [0,1]).
struct RawDataset {
  size_t dim = 0;
  std::vector<double> points;
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
  const double* point(size_t i) const { return points.data() + i * dim; }
};

// IDX pair: big-endian magic 0x803 (images) / 0x801 (labels), 32-bit sizes,
// unsigned-byte pixels flattened row-major.
RawDataset load_idx(const std::string& images_path, const std::string& labels_path);

// CIFAR-10 binary batches: 3073-byte records, one label byte + 3072 pixels.
RawDataset load_cifar_binary(const std::vector<std::string>& paths);

// One-vs-rest labeling of class c (or its complement). With noise_rate r,
// floor(r * n_c) class members are swapped out for uniformly drawn other
// images which become positives, keeping the positive class size fixed.
LabeledDataset binarize(const RawDataset& raw, int cls, bool complement,
                        double noise_rate, std::uint64_t seed);

}  // namespace polynet

#endif  // POLYNET_DATA_HPP
