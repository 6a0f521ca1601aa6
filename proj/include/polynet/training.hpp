#ifndef POLYNET_TRAINING_HPP
#define POLYNET_TRAINING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "polynet/compress.hpp"
#include "polynet/geometry.hpp"
#include "polynet/networks.hpp"

namespace polynet {

struct TrainConfig {
  double eta = 0.05;
  size_t iterations = 1000;
  LossSpec loss;
  std::uint64_t seed = 0;
  size_t batch_size = 0;  // 0 = full batch
  int threads = 1;

  void validate() const {
    require(eta > 0.0, ErrorCode::InvalidArgument, "eta must be positive");
  }
};

struct TrainResult {
  std::vector<double> trace;  // loss before each step, then the final loss
  bool ok = true;
  std::string error;
};

// Full-batch (optionally mini-batch) gradient descent. Deterministic for a
// fixed seed and thread count. Numeric blowups abort and return the trace.
TrainResult train(TwoLayerNet& net, const LabeledDataset& data, const TrainConfig& cfg);

// Additionally aborts if any output weight changes sign: the implicit-bias
// initialization is supposed to preserve them, so a flip means the step size
// broke the balancedness budget.
TrainResult train(ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                  const TrainConfig& cfg);
TrainResult train(ThreeLayerSumNet& net, const LabeledDataset& data,
                  const TrainConfig& cfg);

struct CompressionScheduleConfig {
  double eta = 0.05;
  size_t epochs = 5;
  size_t iterations_per_epoch = 1000;
  double lambda_scale = 2.0;
  size_t max_fixpoint_passes = 1000;
  double plateau_tol = 1e-6;
  LossSpec loss{LossKind::BCE, 1.0, 1.0};
  int threads = 1;

  void validate() const {
    require(eta > 0.0, ErrorCode::InvalidArgument, "eta must be positive");
    require(lambda_scale > 1.0, ErrorCode::InvalidArgument, "lambda_scale must be > 1");
  }
};

struct CompressionScheduleReport {
  size_t pre_width = 0;
  size_t post_width = 0;
  size_t fixpoint_passes = 0;
  double accuracy = 0.0;
  bool accuracy_warning = false;  // compression may trade accuracy away
};

// Interleaves gradient descent epochs with one compression pass per subnet,
// then compresses until every subnet output on the data sits at 0 or lambda.
CompressionScheduleReport train_with_compression(ThreeLayerSumNet& net,
                                                 const LabeledDataset& data,
                                                 const CompressionScheduleConfig& cfg);

struct SequentialSearchConfig {
  double lambda_bias = 5.0;
  double lambda0 = 1.0;   // weight of the class left outside
  double lambda1 = 10.0;  // weight of the class being covered
  double acc_th = 1.0;
  size_t width = 4;       // initial subnet width
  size_t max_polytopes = 16;
  size_t max_width = 64;
  double eta = 0.05;
  size_t train_iters = 3000;
  size_t finetune_rounds = 4;
  size_t finetune_iters = 500;
  double lambda_scale = 2.0;
  double init_scale = 0.5;
  std::uint64_t seed = 7;
  int threads = 1;

  void validate() const {
    require(acc_th > 0.0 && acc_th <= 1.0, ErrorCode::InvalidArgument,
            "acc_th must be in (0, 1]");
    require(width >= 1 && max_width >= width, ErrorCode::InvalidArgument,
            "widths must be >= 1");
  }
};

struct SearchResult {
  PolytopeBasisCover cover;
  std::vector<size_t> face_counts;  // per polytope, in discovery order
  double accuracy = 0.0;
  bool complete = false;  // false when a budget cap stopped the search
  size_t rounds = 0;
};

// Alternating polytope search: each round trains a constrained two-layer net
// that plateaus on the still-misclassified points of one class while the
// whole opposite class keeps it below the plateau, then freezes the level
// polytope and flips sides. Width grows one neuron at a time on failure.
SearchResult sequential_cover_search(const LabeledDataset& data,
                                     const SequentialSearchConfig& cfg);

// ---------------------------------------------------------------------------
// Guided descent: explicit parameter updates along which the loss provably
// decreases, for datasets polyhedrally separable by a known polytope.
// ---------------------------------------------------------------------------

struct GuidedDescentConfig {
  ConvexPolytope target;  // faces with outward unit normals, origin inside
  double delta = 0.1;     // min data-to-boundary distance
  double rho = 0.05;      // corner-density ratio
  double radius = 0.5;    // R
  double eta = 0.1;
  LossKind loss = LossKind::MSE;

  void validate() const;
  double eta_cap() const;  // step-size cap for the configured loss
};

// Builds the aligned two-layer net: w_k equals face k's outward normal,
// b_k = -s_k, v_k = -v0/t_k.
TwoLayerNet make_guided_net(const ConvexPolytope& target, const Vec& s,
                            const Vec& t, double v0);

// Validates the initialization window l_k - R < l_k - t_k < s_k < l_k plus
// the step-size cap, then applies one update in (v0, s_k, t_k) coordinates
// and maps back through b_k = -s_k, v_k = -v0/t_k.
void guided_step_mse(TwoLayerNet& net, const LabeledDataset& data,
                     const GuidedDescentConfig& cfg);
void guided_step_bce(TwoLayerNet& net, const LabeledDataset& data,
                     const GuidedDescentConfig& cfg);

// Loss under the guided-descent objective (outer relu for MSE, sigmoid for
// BCE), matching the descent analysis.
double guided_loss(const TwoLayerNet& net, const LabeledDataset& data, LossKind kind);

struct GuidedFixture {
  GuidedDescentConfig cfg;
  LabeledDataset data;
  TwoLayerNet net;
};

// Deterministic fixture satisfying the dataset and initialization
// assumptions: an axis-aligned box with data placed on rays through the face
// centers (inside-only for MSE, outside-only for BCE, so no corner region
// ever holds a point and the phase structure of the descent is reachable).
GuidedFixture make_guided_fixture(LossKind kind, std::uint64_t seed,
                                  size_t points_per_face = 12);

}  // namespace polynet

#endif  // POLYNET_TRAINING_HPP
