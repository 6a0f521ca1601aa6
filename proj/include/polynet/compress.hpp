#ifndef POLYNET_COMPRESS_HPP
#define POLYNET_COMPRESS_HPP

#include <optional>
#include <vector>

#include "polynet/geometry.hpp"
#include "polynet/networks.hpp"

namespace polynet {

struct CompressionReport {
  std::optional<size_t> removed;   // index before removal
  std::vector<size_t> scaled;      // indices after removal
  size_t pre_width = 0;
  size_t post_width = 0;
  double pre_accuracy = 0.0;
  double post_accuracy = 0.0;
};

// One compression pass: (1) if some neuron's activation set on the data is
// implied by another neuron's, remove the one of smallest |v_k|*||w_k||
// among those (ties to the lowest index, never the last neuron); (2) scale
// every neuron active on a point whose output lies strictly between the off
// level and the plateau by lambda_scale. Positive homogeneity squares the
// scaled contribution, so iterating drives all outputs out of the open gap.
CompressionReport compress(ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                           double lambda_scale);

// True iff relu(T(x_i)) is 0 or lambda within tol on every point (mirrored
// for sign=-1 nets).
bool plateau_condition(const ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                       double tol = 1e-6);

// Iterates compress until the plateau condition holds. Returns the number of
// passes used; throws BudgetExceeded past max_passes.
size_t compress_to_fixpoint(ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                            double lambda_scale, size_t max_passes = 1000,
                            double tol = 1e-6);

// Subnet j of a trained three-layer net, viewed in constrained form.
ConstrainedTwoLayerNet subnet_view(const ThreeLayerSumNet& net, size_t j);
void store_subnet(ThreeLayerSumNet& net, size_t j, const ConstrainedTwoLayerNet& sub);

// Cover extraction from a three-layer net whose subnet outputs are all 0 or
// lambda on the data: polytope j collects the half-spaces of subnet j;
// a_j = +1 goes to the positives. The cover's vote sign equals the network
// sign on every data point.
PolytopeBasisCover extract_cover_three_layer(const ThreeLayerSumNet& net,
                                             const LabeledDataset& data,
                                             double tol = 1e-6);

struct TwoLayerExtractResult {
  PolytopeBasisCover cover;
  size_t rounds = 0;
};

// Cover extraction from an arbitrary two-layer net by splitting it into
// convex and concave halves and repeatedly quantizing at the least-confident
// point the cover still disagrees with the network on. Terminates within
// |data| rounds; the final cover matches the network's sign on every point.
TwoLayerExtractResult extract_cover_two_layer(const TwoLayerNet& net,
                                              const LabeledDataset& data);

}  // namespace polynet

#endif  // POLYNET_COMPRESS_HPP
