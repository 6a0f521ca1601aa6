#ifndef POLYNET_NETWORKS_HPP
#define POLYNET_NETWORKS_HPP

#include <cstdint>
#include <vector>

#include "polynet/common.hpp"
#include "polynet/dataset.hpp"
#include "polynet/geometry.hpp"

namespace polynet {

struct Neuron {
  double v = 0.0;
  Vec w;
  double b = 0.0;
};

// N(x) = v0 + sum_k v_k relu(w_k.x + b_k)
struct TwoLayerNet {
  double v0 = 0.0;
  std::vector<Neuron> neurons;

  size_t dim() const { return neurons.empty() ? 0 : neurons[0].w.size(); }
  size_t width() const { return neurons.size(); }
  double forward(const double* x, size_t d) const;
  double forward(const Vec& x) const { return forward(x.data(), x.size()); }
  void validate() const;
};

// T(x) = sign*lambda + sum_k v_k relu(w_k.x + b_k) with fixed bias lambda.
// sign=+1 requires every v_k < 0, sign=-1 every v_k > 0. The level region
// {T = sign*lambda} is the convex polytope where every neuron is off.
struct ConstrainedTwoLayerNet {
  double lambda = 5.0;
  int sign = +1;
  std::vector<Neuron> neurons;

  size_t dim() const { return neurons.empty() ? 0 : neurons[0].w.size(); }
  size_t width() const { return neurons.size(); }
  double bias() const { return sign > 0 ? lambda : -lambda; }
  double forward(const double* x, size_t d) const;
  double forward(const Vec& x) const { return forward(x.data(), x.size()); }
  void validate() const;

  TwoLayerNet as_two_layer() const;
};

// N(x) = -lambda/2 + sum_j a_j relu(T_j(x)), a_j in {+1,-1}.
// Trained nets have T_j in the constrained form (v0 == lambda, v_k < 0);
// constructed indicator classifiers carry their own subnet biases.
struct ThreeLayerSumNet {
  struct Subnet {
    int a = +1;
    TwoLayerNet net;
  };

  double lambda = 5.0;
  std::vector<Subnet> subnets;

  size_t dim() const { return subnets.empty() ? 0 : subnets[0].net.dim(); }
  size_t first_width() const;
  double forward(const double* x, size_t d) const;
  double forward(const Vec& x) const { return forward(x.data(), x.size()); }
  void validate() const;

  // True if every subnet matches Eq-8 form: bias equal to lambda and all
  // output weights negative.
  bool constrained_form(double tol = 1e-9) const;
};

// The polytope {x : T(x) = sign*lambda} = {x : w_k.x + b_k <= 0 for all k}.
ConvexPolytope level_polytope(const ConstrainedTwoLayerNet& net);
ConvexPolytope level_polytope(const TwoLayerNet& subnet);

enum class LossKind { MSE, BCE, WeightedBCE };

struct LossSpec {
  LossKind kind = LossKind::BCE;
  double lambda0 = 1.0;  // class-0 weight of the reinforced BCE loss
  double lambda1 = 1.0;  // class-1 weight
};

struct TwoLayerGrad {
  double v0 = 0.0;
  std::vector<Neuron> neurons;  // partials stored in the matching fields
};

struct ThreeLayerGrad {
  std::vector<TwoLayerGrad> subnets;
};

// Full-batch loss. MSE passes the output through an outer relu, BCE and
// WeightedBCE through a sigmoid. Throws NumericError on non-finite outputs.
double batch_loss(const TwoLayerNet& net, const LabeledDataset& data,
                  const LossSpec& loss, int threads = 1);
double batch_loss(const ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                  const LossSpec& loss, int threads = 1);
double batch_loss(const ThreeLayerSumNet& net, const LabeledDataset& data,
                  const LossSpec& loss, int threads = 1);

// Analytic full-batch gradients; relu subgradient at 0 is taken as 0.
// The fixed bias of a constrained net receives no gradient.
TwoLayerGrad gradients(const TwoLayerNet& net, const LabeledDataset& data,
                       const LossSpec& loss, int threads = 1);
TwoLayerGrad gradients(const ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                       const LossSpec& loss, int threads = 1);
ThreeLayerGrad gradients(const ThreeLayerSumNet& net, const LabeledDataset& data,
                         const LossSpec& loss, int threads = 1);

// Implicit-bias initialization: w_k, b_k iid normal with deviation `scale`,
// v_k = -(sqrt(||w_k||^2 + b_k^2) + 0.01*scale), mirrored for sign=-1, so
// the output-weight inequality holds strictly at init.
ConstrainedTwoLayerNet init_implicit_bias(size_t width, size_t dim, double scale,
                                          std::uint64_t seed, int sign = +1,
                                          double lambda = 5.0);

// Per-neuron v_k^2 - ||w_k||^2 - b_k^2, invariant under gradient flow.
Vec balancedness(const TwoLayerNet& net);
Vec balancedness(const ConstrainedTwoLayerNet& net);

// Classification accuracy of sign(N(x)) against binary labels.
double sign_accuracy(const ThreeLayerSumNet& net, const LabeledDataset& data);
double sign_accuracy(const TwoLayerNet& net, const LabeledDataset& data);

}  // namespace polynet

#endif  // POLYNET_NETWORKS_HPP
