#include "polynet/training.hpp"

#include <algorithm>
#include <cmath>

namespace polynet {

namespace {

void apply_step(double& param, double grad, double eta) { param -= eta * grad; }

void apply_grad(double* v0, std::vector<Neuron>& neurons, const TwoLayerGrad& g,
                double eta) {
  if (v0 != nullptr) apply_step(*v0, g.v0, eta);
  for (size_t k = 0; k < neurons.size(); ++k) {
    apply_step(neurons[k].v, g.neurons[k].v, eta);
    apply_step(neurons[k].b, g.neurons[k].b, eta);
    for (size_t j = 0; j < neurons[k].w.size(); ++j)
      apply_step(neurons[k].w[j], g.neurons[k].w[j], eta);
  }
}

LabeledDataset minibatch(const LabeledDataset& data, size_t batch, Rng& rng) {
  LabeledDataset out;
  out.dim = data.dim;
  for (size_t i = 0; i < batch; ++i) {
    size_t idx = size_t(rng.uniform_int(data.size()));
    out.push_back(data.point_vec(idx), data.labels[idx]);
  }
  return out;
}

template <typename Net, typename StepFn>
TrainResult gd_loop(Net& net, const LabeledDataset& data, const TrainConfig& cfg,
                    StepFn&& step) {
  require(cfg.eta >= 0.0, ErrorCode::InvalidArgument, "eta must be nonnegative");
  data.validate();
  TrainResult result;
  Rng rng(cfg.seed ? cfg.seed : 1);
  try {
    for (size_t it = 0; it < cfg.iterations; ++it) {
      result.trace.push_back(batch_loss(net, data, cfg.loss, cfg.threads));
      if (cfg.eta == 0.0) continue;
      if (cfg.batch_size > 0 && cfg.batch_size < data.size()) {
        LabeledDataset sub = minibatch(data, cfg.batch_size, rng);
        step(sub);
      } else {
        step(data);
      }
    }
    result.trace.push_back(batch_loss(net, data, cfg.loss, cfg.threads));
  } catch (const Error& e) {
    result.ok = false;
    result.error = e.what();
  }
  return result;
}

}  // namespace

TrainResult train(TwoLayerNet& net, const LabeledDataset& data, const TrainConfig& cfg) {
  net.validate();
  check_dim(net.dim(), data.dim, "train");
  return gd_loop(net, data, cfg, [&](const LabeledDataset& batch) {
    TwoLayerGrad g = gradients(net, batch, cfg.loss, cfg.threads);
    apply_grad(&net.v0, net.neurons, g, cfg.eta);
  });
}

TrainResult train(ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                  const TrainConfig& cfg) {
  net.validate();
  check_dim(net.dim(), data.dim, "train");
  TrainResult r = gd_loop(net, data, cfg, [&](const LabeledDataset& batch) {
    TwoLayerGrad g = gradients(net, batch, cfg.loss, cfg.threads);
    apply_grad(nullptr, net.neurons, g, cfg.eta);
    for (const auto& nr : net.neurons) {
      bool ok = net.sign > 0 ? nr.v < 0.0 : nr.v > 0.0;
      require(ok, ErrorCode::NumericError,
              "output-weight sign flipped during training; eta exceeds the "
              "balancedness budget");
    }
  });
  return r;
}

TrainResult train(ThreeLayerSumNet& net, const LabeledDataset& data,
                  const TrainConfig& cfg) {
  net.validate();
  check_dim(net.dim(), data.dim, "train");
  return gd_loop(net, data, cfg, [&](const LabeledDataset& batch) {
    ThreeLayerGrad g = gradients(net, batch, cfg.loss, cfg.threads);
    for (size_t j = 0; j < net.subnets.size(); ++j) {
      apply_grad(nullptr, net.subnets[j].net.neurons, g.subnets[j], cfg.eta);
      for (const auto& nr : net.subnets[j].net.neurons)
        require(nr.v < 0.0, ErrorCode::NumericError,
                "subnet output-weight sign flipped during training");
    }
  });
}

CompressionScheduleReport train_with_compression(ThreeLayerSumNet& net,
                                                 const LabeledDataset& data,
                                                 const CompressionScheduleConfig& cfg) {
  cfg.validate();
  net.validate();
  require(net.constrained_form(1e-9), ErrorCode::PreconditionFailed,
          "train_with_compression requires constrained subnets");

  CompressionScheduleReport report;
  report.pre_width = net.first_width();

  TrainConfig tc;
  tc.eta = cfg.eta;
  tc.iterations = cfg.iterations_per_epoch;
  tc.loss = cfg.loss;
  tc.threads = cfg.threads;

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    TrainResult r = train(net, data, tc);
    require(r.ok, ErrorCode::NumericError, "training aborted: " + r.error);
    for (size_t j = 0; j < net.subnets.size(); ++j) {
      ConstrainedTwoLayerNet sub = subnet_view(net, j);
      compress(sub, data, cfg.lambda_scale);
      store_subnet(net, j, sub);
    }
  }

  // Final sweep: compress every subnet until each output sits at 0 or lambda.
  size_t passes = 0;
  for (size_t j = 0; j < net.subnets.size(); ++j) {
    ConstrainedTwoLayerNet sub = subnet_view(net, j);
    passes = std::max(passes,
                      compress_to_fixpoint(sub, data, cfg.lambda_scale,
                                           cfg.max_fixpoint_passes, cfg.plateau_tol));
    store_subnet(net, j, sub);
  }

  report.fixpoint_passes = passes;
  report.post_width = net.first_width();
  report.accuracy = sign_accuracy(net, data);
  report.accuracy_warning = report.accuracy < 1.0;
  return report;
}

// ---------------------------------------------------------------------------
// Sequential cover search
// ---------------------------------------------------------------------------

namespace {

bool covers_targets(const ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                    int side, double tol) {
  // every target-class point must sit exactly on the plateau
  for (size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != side) continue;
    double t = net.forward(data.point(i), data.dim);
    if (std::fabs(t - net.bias()) > tol) return false;
  }
  return true;
}

Neuron fresh_neuron(size_t dim, double scale, int sign, Rng& rng) {
  Neuron nr;
  nr.w.resize(dim);
  for (double& v : nr.w) v = scale * rng.normal();
  nr.b = scale * rng.normal();
  double mag = std::sqrt(dot(nr.w, nr.w) + nr.b * nr.b) + 0.01 * scale;
  nr.v = sign > 0 ? -mag : mag;
  return nr;
}

}  // namespace

SearchResult sequential_cover_search(const LabeledDataset& data,
                                     const SequentialSearchConfig& cfg) {
  cfg.validate();
  data.validate();
  require(data.count_label(0) > 0 && data.count_label(1) > 0,
          ErrorCode::InvalidArgument, "search needs both labels present");

  const size_t n = data.size();
  SearchResult result;
  result.cover.dim = data.dim;
  std::vector<int> vote(n, 0);
  Rng seeder(cfg.seed);

  auto accuracy = [&] {
    size_t correct = 0;
    for (size_t i = 0; i < n; ++i)
      correct += ((vote[i] > 0 ? 1 : 0) == data.labels[i]);
    return double(correct) / double(n);
  };

  int side = 1;
  result.accuracy = accuracy();
  for (size_t round = 0; round < cfg.max_polytopes; ++round) {
    if (result.accuracy >= cfg.acc_th) {
      result.complete = true;
      break;
    }

    // points of `side` the cover still classifies wrongly
    auto misclassified = [&](int s) {
      std::vector<size_t> out;
      for (size_t i = 0; i < n; ++i) {
        int pred = vote[i] > 0 ? 1 : 0;
        if (data.labels[i] == s && pred != s) out.push_back(i);
      }
      return out;
    };
    std::vector<size_t> targets = misclassified(side);
    if (targets.empty()) {
      side = 1 - side;
      targets = misclassified(side);
      if (targets.empty()) {
        result.complete = true;
        break;
      }
    }

    // training set: the uncovered points of `side` plus the whole other class
    LabeledDataset trainset;
    trainset.dim = data.dim;
    for (size_t i : targets) trainset.push_back(data.point_vec(i), side);
    for (size_t i = 0; i < n; ++i)
      if (data.labels[i] == 1 - side) trainset.push_back(data.point_vec(i), 1 - side);

    const int sign = side == 1 ? +1 : -1;
    LossSpec loss;
    loss.kind = LossKind::WeightedBCE;
    loss.lambda0 = side == 1 ? cfg.lambda0 : cfg.lambda1;  // covered class gets
    loss.lambda1 = side == 1 ? cfg.lambda1 : cfg.lambda0;  // the heavy weight

    TrainConfig tc;
    tc.eta = cfg.eta;
    tc.loss = loss;
    tc.threads = cfg.threads;

    ConstrainedTwoLayerNet net = init_implicit_bias(
        cfg.width, data.dim, cfg.init_scale, seeder.next_u64(), sign, cfg.lambda_bias);
    Rng widen(seeder.next_u64());

    bool covered = false;
    while (true) {
      tc.iterations = cfg.train_iters;
      TrainResult tr = train(net, trainset, tc);
      require(tr.ok, ErrorCode::NumericError, "search training aborted: " + tr.error);
      for (size_t ft = 0; ft < cfg.finetune_rounds; ++ft) {
        compress(net, trainset, cfg.lambda_scale);
        tc.iterations = cfg.finetune_iters;
        tr = train(net, trainset, tc);
        require(tr.ok, ErrorCode::NumericError, "search training aborted: " + tr.error);
      }
      compress_to_fixpoint(net, trainset, cfg.lambda_scale, 1000, 1e-6);
      if (covers_targets(net, trainset, side, 1e-6)) {
        covered = true;
        break;
      }
      if (net.width() >= cfg.max_width) break;
      net.neurons.push_back(fresh_neuron(data.dim, cfg.init_scale, sign, widen));
    }
    if (!covered) break;  // width budget exhausted, return the partial cover

    ConvexPolytope poly = level_polytope(net);
    result.face_counts.push_back(poly.num_faces());
    for (size_t i = 0; i < n; ++i)
      if (poly.contains(data.point(i), data.dim)) vote[i] += sign;
    if (sign > 0)
      result.cover.positives.emplace_back(std::move(poly));
    else
      result.cover.negatives.emplace_back(std::move(poly));

    ++result.rounds;
    result.accuracy = accuracy();
    if (result.accuracy >= cfg.acc_th) {
      result.complete = true;
      break;
    }
    side = 1 - side;
  }
  result.accuracy = accuracy();
  if (result.accuracy >= cfg.acc_th) result.complete = true;
  return result;
}

// ---------------------------------------------------------------------------
// Guided descent
// ---------------------------------------------------------------------------

void GuidedDescentConfig::validate() const {
  require(!target.faces.empty(), ErrorCode::InvalidArgument, "target polytope is empty");
  for (const auto& f : target.faces)
    require(f.b < 0.0, ErrorCode::PreconditionFailed,
            "target polytope must strictly contain the origin");
  require(delta > 0.0 && rho > 0.0 && rho < 1.0 && radius > delta,
          ErrorCode::InvalidArgument, "need 0 < delta < R and rho in (0,1)");
  require(eta > 0.0 && eta < eta_cap(), ErrorCode::PreconditionFailed,
          "eta exceeds the guided-descent step cap");
}

double GuidedDescentConfig::eta_cap() const {
  double m = double(target.num_faces());
  if (loss == LossKind::MSE)
    return std::min({2.0 / delta, 2.0 / (m * radius),
                     4.0 * rho * m / ((1.0 - rho) * radius)});
  return std::min(1.0, 4.0 * rho * radius / ((1.0 - rho) * delta * delta));
}

TwoLayerNet make_guided_net(const ConvexPolytope& target, const Vec& s, const Vec& t,
                            double v0) {
  const size_t m = target.num_faces();
  check_dim(m, s.size(), "guided s");
  check_dim(m, t.size(), "guided t");
  require(v0 > 0.0, ErrorCode::InvalidArgument, "v0 must be positive");
  TwoLayerNet net;
  net.v0 = v0;
  net.neurons.resize(m);
  for (size_t k = 0; k < m; ++k) {
    require(t[k] > 0.0, ErrorCode::InvalidArgument, "t must be positive");
    net.neurons[k].w = target.faces[k].w;
    net.neurons[k].b = -s[k];
    net.neurons[k].v = -v0 / t[k];
  }
  return net;
}

namespace {

struct GuidedState {
  Vec s, t, l;
  double v0;
};

GuidedState read_state(const TwoLayerNet& net, const GuidedDescentConfig& cfg) {
  const size_t m = cfg.target.num_faces();
  check_dim(m, net.neurons.size(), "guided net width");
  require(net.v0 > 0.0, ErrorCode::PreconditionFailed, "guided descent needs v0 > 0");
  GuidedState st;
  st.v0 = net.v0;
  st.s.resize(m);
  st.t.resize(m);
  st.l.resize(m);
  for (size_t k = 0; k < m; ++k) {
    const auto& nr = net.neurons[k];
    double nw = norm2(nr.w);
    require(std::fabs(nw - 1.0) <= 1e-9, ErrorCode::PreconditionFailed,
            "guided descent needs unit neuron normals");
    require(dot(nr.w, cfg.target.faces[k].w) >= 1.0 - 1e-9,
            ErrorCode::PreconditionFailed,
            "neuron " + std::to_string(k) + " is not aligned with its face");
    require(nr.v < 0.0, ErrorCode::PreconditionFailed, "guided descent needs v_k < 0");
    st.l[k] = -cfg.target.faces[k].b;
    st.s[k] = -nr.b;
    st.t[k] = -net.v0 / nr.v;
    bool window = st.l[k] - cfg.radius < st.l[k] - st.t[k] &&
                  st.l[k] - st.t[k] < st.s[k] && st.s[k] < st.l[k];
    require(window, ErrorCode::PreconditionFailed,
            "initialization window violated at neuron " + std::to_string(k));
  }
  return st;
}

void guided_step(TwoLayerNet& net, const LabeledDataset& data,
                 const GuidedDescentConfig& cfg) {
  cfg.validate();
  data.validate();
  check_dim(net.dim(), data.dim, "guided_step");
  GuidedState st = read_state(net, cfg);
  const size_t m = st.s.size();
  const double eta = cfg.eta;

  std::vector<size_t> active(m, 0);
  size_t total_active = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    const double* x = data.point(i);
    for (size_t k = 0; k < m; ++k) {
      double z = -st.s[k];
      for (size_t j = 0; j < data.dim; ++j) z += net.neurons[k].w[j] * x[j];
      if (z > 0.0) {
        ++active[k];
        ++total_active;
      }
    }
  }

  double tmax = cfg.delta;
  for (size_t k = 0; k < m; ++k) tmax = std::max(tmax, st.t[k]);

  double dv0 = 0.0;
  if (total_active == 0) {
    dv0 = cfg.loss == LossKind::MSE ? -0.5 * (st.v0 - 1.0) * tmax * eta
                                    : (1.0 - sigmoid(st.v0)) * eta;
  }

  for (size_t k = 0; k < m; ++k) {
    double t = st.t[k];
    double denom = st.v0 + eta * t;
    double ds, dt;
    if (active[k] > 0) {
      double u = eta * t * t / denom;
      ds = u * (st.l[k] - st.s[k]) / (st.l[k] + t - st.s[k]);
      dt = ds - u;
    } else {
      ds = 0.0;
      dt = (t * dv0 - eta * t * t) / denom;
    }
    st.s[k] += ds;
    st.t[k] += dt;
  }
  st.v0 += dv0;

  net.v0 = st.v0;
  for (size_t k = 0; k < m; ++k) {
    net.neurons[k].b = -st.s[k];
    net.neurons[k].v = -st.v0 / st.t[k];
  }
}

}  // namespace

void guided_step_mse(TwoLayerNet& net, const LabeledDataset& data,
                     const GuidedDescentConfig& cfg) {
  require(cfg.loss == LossKind::MSE, ErrorCode::InvalidArgument,
          "config is not set up for the MSE branch");
  guided_step(net, data, cfg);
}

void guided_step_bce(TwoLayerNet& net, const LabeledDataset& data,
                     const GuidedDescentConfig& cfg) {
  require(cfg.loss == LossKind::BCE, ErrorCode::InvalidArgument,
          "config is not set up for the BCE branch");
  double arg = (1.0 - cfg.rho) * cfg.delta / (4.0 * cfg.rho * cfg.radius) - 1.0;
  require(arg > 1.0 && net.v0 < std::log(arg), ErrorCode::PreconditionFailed,
          "v0 outside the BCE initialization window");
  guided_step(net, data, cfg);
}

double guided_loss(const TwoLayerNet& net, const LabeledDataset& data, LossKind kind) {
  LossSpec spec;
  spec.kind = kind;
  return batch_loss(net, data, spec);
}

GuidedFixture make_guided_fixture(LossKind kind, std::uint64_t seed,
                                  size_t points_per_face) {
  GuidedFixture fx;
  std::vector<Hyperplane> faces;
  faces.emplace_back(Vec{1.0, 0.0}, -1.0);
  faces.emplace_back(Vec{-1.0, 0.0}, -1.0);
  faces.emplace_back(Vec{0.0, 1.0}, -1.0);
  faces.emplace_back(Vec{0.0, -1.0}, -1.0);
  fx.cfg.target = ConvexPolytope(std::move(faces));
  fx.cfg.delta = 0.1;
  fx.cfg.rho = 0.01;  // no corner region ever holds a point, measured below
  fx.cfg.radius = 0.3;
  fx.cfg.loss = kind;
  fx.cfg.eta = 0.8 * fx.cfg.eta_cap();

  fx.data.dim = 2;
  Rng rng(seed);
  const bool inside = kind == LossKind::MSE;
  for (size_t k = 0; k < 4; ++k) {
    const Vec& nrm = fx.cfg.target.faces[k].w;
    for (size_t p = 0; p < points_per_face; ++p) {
      double frac = points_per_face == 1 ? 0.5 : double(p) / double(points_per_face - 1);
      double u = inside ? 0.5 + frac * (0.9 - 0.5) : 1.1 + frac * (1.25 - 1.1);
      u += 0.004 * (rng.uniform() - 0.5);  // jitter along the ray, margins kept
      fx.data.push_back(Vec{u * nrm[0], u * nrm[1]}, inside ? 1 : 0);
    }
  }

  double s0 = inside ? 0.78 : 0.9;
  double t0 = 0.25;
  double v0 = inside ? 0.9 : 1.0;
  fx.net = make_guided_net(fx.cfg.target, Vec(4, s0), Vec(4, t0), v0);
  return fx;
}

}  // namespace polynet
