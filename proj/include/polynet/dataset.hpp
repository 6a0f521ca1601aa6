#ifndef POLYNET_DATASET_HPP
#define POLYNET_DATASET_HPP

#include <cstdint>
#include <vector>

#include "polynet/common.hpp"

namespace polynet {

// Points in R^d with binary labels {0,1}. Points are stored row-major.
struct LabeledDataset {
  size_t dim = 0;
  std::vector<double> points;  // n * dim
  std::vector<int> labels;     // n, values 0 or 1

  size_t size() const { return labels.size(); }

  const double* point(size_t i) const { return points.data() + i * dim; }

  Vec point_vec(size_t i) const {
    return Vec(points.begin() + i * dim, points.begin() + (i + 1) * dim);
  }

  void push_back(const Vec& x, int label) {
    points.insert(points.end(), x.begin(), x.end());
    labels.push_back(label);
  }

  void validate() const {
    require(dim >= 1, ErrorCode::InvalidArgument, "dataset dimension must be >= 1");
    require(!labels.empty(), ErrorCode::InvalidArgument, "dataset must be nonempty");
    require(points.size() == labels.size() * dim, ErrorCode::InvalidArgument,
            "points/labels size mismatch");
    for (int y : labels)
      require(y == 0 || y == 1, ErrorCode::InvalidArgument,
              "labels must be 0 or 1");
  }

  size_t count_label(int y) const {
    size_t c = 0;
    for (int l : labels) c += (l == y);
    return c;
  }
};

}  // namespace polynet

#endif  // POLYNET_DATASET_HPP
