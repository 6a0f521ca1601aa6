#include "polynet/networks.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace polynet {

namespace {

double clamped_log(double p) {
  const double lo = 1e-12;
  const double hi = 1.0 - 1e-12;
  if (p < lo) p = lo;
  if (p > hi) p = hi;
  return std::log(p);
}

struct ClassCounts {
  double n0 = 0.0, n1 = 0.0;
};

ClassCounts count_classes(const LabeledDataset& data) {
  ClassCounts c;
  for (int y : data.labels) (y == 1 ? c.n1 : c.n0) += 1.0;
  return c;
}

// Per-point loss and d(loss)/d(raw output), already carrying the batch
// normalization factor.
struct PointLoss {
  double value;
  double dout;
};

PointLoss outer_loss(double out, int y, const LossSpec& loss, double n,
                     const ClassCounts& cc) {
  PointLoss r{0.0, 0.0};
  switch (loss.kind) {
    case LossKind::MSE: {
      double u = relu(out);
      double e = u - double(y);
      r.value = 0.5 * e * e / n;
      r.dout = (out > 0.0 ? e : 0.0) / n;
      break;
    }
    case LossKind::BCE: {
      double p = sigmoid(out);
      r.value = -(y == 1 ? clamped_log(p) : clamped_log(1.0 - p)) / n;
      r.dout = (p - double(y)) / n;
      break;
    }
    case LossKind::WeightedBCE: {
      double p = sigmoid(out);
      double cls_n = (y == 1 ? cc.n1 : cc.n0);
      double wgt = (y == 1 ? loss.lambda1 : loss.lambda0) / cls_n;
      r.value = -wgt * (y == 1 ? clamped_log(p) : clamped_log(1.0 - p));
      r.dout = wgt * (p - double(y));
      break;
    }
  }
  return r;
}

template <typename Body>
void parallel_chunks(size_t n, int threads, Body&& body) {
  if (threads <= 1 || n < 64) {
    body(0, 0, n);
    return;
  }
  size_t t = std::min<size_t>(size_t(threads), n);
  std::vector<std::thread> pool;
  size_t chunk = (n + t - 1) / t;
  for (size_t k = 0; k < t; ++k) {
    size_t lo = k * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, k, lo, hi] { body(k, lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

double TwoLayerNet::forward(const double* x, size_t d) const {
  check_dim(dim(), d, "forward_two_layer");
  double s = v0;
  for (const auto& nr : neurons) {
    double z = nr.b;
    for (size_t i = 0; i < d; ++i) z += nr.w[i] * x[i];
    if (z > 0.0) s += nr.v * z;
  }
  return s;
}

void TwoLayerNet::validate() const {
  require(!neurons.empty(), ErrorCode::InvalidArgument, "network needs at least one neuron");
  const size_t d = dim();
  for (const auto& nr : neurons) {
    check_dim(d, nr.w.size(), "neuron");
    require(std::isfinite(nr.v) && std::isfinite(nr.b), ErrorCode::InvalidArgument,
            "non-finite neuron parameter");
    for (double v : nr.w)
      require(std::isfinite(v), ErrorCode::InvalidArgument, "non-finite neuron weight");
  }
  require(std::isfinite(v0), ErrorCode::InvalidArgument, "non-finite output bias");
}

double ConstrainedTwoLayerNet::forward(const double* x, size_t d) const {
  check_dim(dim(), d, "forward_constrained");
  double s = bias();
  for (const auto& nr : neurons) {
    double z = nr.b;
    for (size_t i = 0; i < d; ++i) z += nr.w[i] * x[i];
    if (z > 0.0) s += nr.v * z;
  }
  return s;
}

void ConstrainedTwoLayerNet::validate() const {
  require(lambda > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
  require(sign == 1 || sign == -1, ErrorCode::InvalidArgument, "sign must be +1 or -1");
  require(!neurons.empty(), ErrorCode::InvalidArgument, "network needs at least one neuron");
  for (const auto& nr : neurons) {
    if (sign > 0)
      require(nr.v < 0.0, ErrorCode::PreconditionFailed,
              "constrained net with sign=+1 requires every v_k < 0");
    else
      require(nr.v > 0.0, ErrorCode::PreconditionFailed,
              "constrained net with sign=-1 requires every v_k > 0");
  }
}

TwoLayerNet ConstrainedTwoLayerNet::as_two_layer() const {
  TwoLayerNet n;
  n.v0 = bias();
  n.neurons = neurons;
  return n;
}

size_t ThreeLayerSumNet::first_width() const {
  size_t m = 0;
  for (const auto& s : subnets) m += s.net.width();
  return m;
}

double ThreeLayerSumNet::forward(const double* x, size_t d) const {
  check_dim(dim(), d, "forward_three_layer");
  double s = -0.5 * lambda;
  for (const auto& sub : subnets) s += double(sub.a) * relu(sub.net.forward(x, d));
  return s;
}

void ThreeLayerSumNet::validate() const {
  require(lambda > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
  require(!subnets.empty(), ErrorCode::InvalidArgument, "network needs at least one subnet");
  const size_t d = dim();
  for (const auto& sub : subnets) {
    require(sub.a == 1 || sub.a == -1, ErrorCode::InvalidArgument, "a_j must be +1 or -1");
    check_dim(d, sub.net.dim(), "subnet");
    sub.net.validate();
  }
}

bool ThreeLayerSumNet::constrained_form(double tol) const {
  for (const auto& sub : subnets) {
    if (std::fabs(sub.net.v0 - lambda) > tol) return false;
    for (const auto& nr : sub.net.neurons)
      if (nr.v >= 0.0) return false;
  }
  return true;
}

ConvexPolytope level_polytope(const TwoLayerNet& subnet) {
  std::vector<Hyperplane> faces;
  faces.reserve(subnet.neurons.size());
  for (const auto& nr : subnet.neurons) faces.emplace_back(nr.w, nr.b);
  return ConvexPolytope(std::move(faces));
}

ConvexPolytope level_polytope(const ConstrainedTwoLayerNet& net) {
  return level_polytope(net.as_two_layer());
}

// ---------------------------------------------------------------------------
// Batch loss / gradients
// ---------------------------------------------------------------------------

namespace {

// Shared two-layer machinery operating on (v0, neurons) views.
double two_layer_batch_loss(double v0, const std::vector<Neuron>& neurons,
                            const LabeledDataset& data, const LossSpec& loss,
                            int threads) {
  data.validate();
  auto cc = count_classes(data);
  const size_t n = data.size();
  const size_t d = data.dim;
  std::vector<double> partial(std::max(1, threads), 0.0);
  std::atomic<bool> bad{false};
  parallel_chunks(n, threads, [&](size_t slot, size_t lo, size_t hi) {
    double acc = 0.0;
    for (size_t i = lo; i < hi; ++i) {
      const double* x = data.point(i);
      double out = v0;
      for (const auto& nr : neurons) {
        double z = nr.b;
        for (size_t j = 0; j < d; ++j) z += nr.w[j] * x[j];
        if (z > 0.0) out += nr.v * z;
      }
      if (!std::isfinite(out)) {
        bad = true;
        return;
      }
      acc += outer_loss(out, data.labels[i], loss, double(n), cc).value;
    }
    partial[slot] = acc;
  });
  require(!bad.load(), ErrorCode::NumericError, "non-finite network output");
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

TwoLayerGrad two_layer_batch_grad(double v0, const std::vector<Neuron>& neurons,
                                  const LabeledDataset& data, const LossSpec& loss,
                                  int threads) {
  data.validate();
  auto cc = count_classes(data);
  const size_t n = data.size();
  const size_t d = data.dim;
  const size_t m = neurons.size();

  auto zero_grad = [&] {
    TwoLayerGrad g;
    g.v0 = 0.0;
    g.neurons.resize(m);
    for (auto& nr : g.neurons) {
      nr.v = 0.0;
      nr.b = 0.0;
      nr.w.assign(d, 0.0);
    }
    return g;
  };

  std::vector<TwoLayerGrad> partial(std::max(1, threads));
  std::atomic<bool> bad{false};
  parallel_chunks(n, threads, [&](size_t slot, size_t lo, size_t hi) {
    TwoLayerGrad g = zero_grad();
    std::vector<double> z(m);
    for (size_t i = lo; i < hi; ++i) {
      const double* x = data.point(i);
      double out = v0;
      for (size_t k = 0; k < m; ++k) {
        double zz = neurons[k].b;
        for (size_t j = 0; j < d; ++j) zz += neurons[k].w[j] * x[j];
        z[k] = zz;
        if (zz > 0.0) out += neurons[k].v * zz;
      }
      if (!std::isfinite(out)) {
        bad = true;
        return;
      }
      double go = outer_loss(out, data.labels[i], loss, double(n), cc).dout;
      if (go == 0.0) continue;
      g.v0 += go;
      for (size_t k = 0; k < m; ++k) {
        if (z[k] <= 0.0) continue;
        g.neurons[k].v += go * z[k];
        double f = go * neurons[k].v;
        g.neurons[k].b += f;
        for (size_t j = 0; j < d; ++j) g.neurons[k].w[j] += f * x[j];
      }
    }
    partial[slot] = std::move(g);
  });
  require(!bad.load(), ErrorCode::NumericError, "non-finite network output");

  TwoLayerGrad g = zero_grad();
  for (const auto& p : partial) {
    if (p.neurons.size() != m) continue;  // untouched slot
    g.v0 += p.v0;
    for (size_t k = 0; k < m; ++k) {
      g.neurons[k].v += p.neurons[k].v;
      g.neurons[k].b += p.neurons[k].b;
      for (size_t j = 0; j < d; ++j) g.neurons[k].w[j] += p.neurons[k].w[j];
    }
  }
  return g;
}

}  // namespace

double batch_loss(const TwoLayerNet& net, const LabeledDataset& data,
                  const LossSpec& loss, int threads) {
  check_dim(net.dim(), data.dim, "batch_loss");
  return two_layer_batch_loss(net.v0, net.neurons, data, loss, threads);
}

double batch_loss(const ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                  const LossSpec& loss, int threads) {
  check_dim(net.dim(), data.dim, "batch_loss");
  return two_layer_batch_loss(net.bias(), net.neurons, data, loss, threads);
}

TwoLayerGrad gradients(const TwoLayerNet& net, const LabeledDataset& data,
                       const LossSpec& loss, int threads) {
  check_dim(net.dim(), data.dim, "gradients");
  return two_layer_batch_grad(net.v0, net.neurons, data, loss, threads);
}

TwoLayerGrad gradients(const ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                       const LossSpec& loss, int threads) {
  check_dim(net.dim(), data.dim, "gradients");
  TwoLayerGrad g = two_layer_batch_grad(net.bias(), net.neurons, data, loss, threads);
  g.v0 = 0.0;  // fixed bias, no gradient
  return g;
}

double batch_loss(const ThreeLayerSumNet& net, const LabeledDataset& data,
                  const LossSpec& loss, int threads) {
  check_dim(net.dim(), data.dim, "batch_loss");
  auto cc = count_classes(data);
  const size_t n = data.size();
  std::vector<double> partial(std::max(1, threads), 0.0);
  std::atomic<bool> bad{false};
  parallel_chunks(n, threads, [&](size_t slot, size_t lo, size_t hi) {
    double acc = 0.0;
    for (size_t i = lo; i < hi; ++i) {
      double out = net.forward(data.point(i), data.dim);
      if (!std::isfinite(out)) {
        bad = true;
        return;
      }
      acc += outer_loss(out, data.labels[i], loss, double(n), cc).value;
    }
    partial[slot] = acc;
  });
  require(!bad.load(), ErrorCode::NumericError, "non-finite network output");
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

ThreeLayerGrad gradients(const ThreeLayerSumNet& net, const LabeledDataset& data,
                         const LossSpec& loss, int threads) {
  check_dim(net.dim(), data.dim, "gradients");
  auto cc = count_classes(data);
  const size_t n = data.size();
  const size_t d = data.dim;
  const size_t J = net.subnets.size();

  auto zero_grad = [&] {
    ThreeLayerGrad g;
    g.subnets.resize(J);
    for (size_t j = 0; j < J; ++j) {
      g.subnets[j].v0 = 0.0;
      g.subnets[j].neurons.resize(net.subnets[j].net.width());
      for (size_t k = 0; k < g.subnets[j].neurons.size(); ++k) {
        g.subnets[j].neurons[k].v = 0.0;
        g.subnets[j].neurons[k].b = 0.0;
        g.subnets[j].neurons[k].w.assign(d, 0.0);
      }
    }
    return g;
  };

  std::vector<ThreeLayerGrad> partial(std::max(1, threads));
  std::atomic<bool> bad{false};
  parallel_chunks(n, threads, [&](size_t slot, size_t lo, size_t hi) {
    ThreeLayerGrad g = zero_grad();
    for (size_t i = lo; i < hi; ++i) {
      const double* x = data.point(i);
      double out = -0.5 * net.lambda;
      std::vector<double> tj(J);
      for (size_t j = 0; j < J; ++j) {
        tj[j] = net.subnets[j].net.forward(x, d);
        out += double(net.subnets[j].a) * relu(tj[j]);
      }
      if (!std::isfinite(out)) {
        bad = true;
        return;
      }
      double go = outer_loss(out, data.labels[i], loss, double(n), cc).dout;
      if (go == 0.0) continue;
      for (size_t j = 0; j < J; ++j) {
        if (tj[j] <= 0.0) continue;
        double gT = go * double(net.subnets[j].a);
        const auto& sub = net.subnets[j].net;
        auto& gs = g.subnets[j];
        for (size_t k = 0; k < sub.neurons.size(); ++k) {
          double z = sub.neurons[k].b;
          for (size_t jj = 0; jj < d; ++jj) z += sub.neurons[k].w[jj] * x[jj];
          if (z <= 0.0) continue;
          gs.neurons[k].v += gT * z;
          double f = gT * sub.neurons[k].v;
          gs.neurons[k].b += f;
          for (size_t jj = 0; jj < d; ++jj) gs.neurons[k].w[jj] += f * x[jj];
        }
      }
    }
    partial[slot] = std::move(g);
  });
  require(!bad.load(), ErrorCode::NumericError, "non-finite network output");

  ThreeLayerGrad g = zero_grad();
  for (const auto& p : partial) {
    if (p.subnets.size() != J) continue;
    for (size_t j = 0; j < J; ++j) {
      for (size_t k = 0; k < g.subnets[j].neurons.size(); ++k) {
        g.subnets[j].neurons[k].v += p.subnets[j].neurons[k].v;
        g.subnets[j].neurons[k].b += p.subnets[j].neurons[k].b;
        for (size_t jj = 0; jj < d; ++jj)
          g.subnets[j].neurons[k].w[jj] += p.subnets[j].neurons[k].w[jj];
      }
    }
  }
  return g;
}

ConstrainedTwoLayerNet init_implicit_bias(size_t width, size_t dim, double scale,
                                          std::uint64_t seed, int sign, double lambda) {
  require(width >= 1, ErrorCode::InvalidArgument, "width must be >= 1");
  require(dim >= 1, ErrorCode::InvalidArgument, "dim must be >= 1");
  require(scale > 0.0, ErrorCode::InvalidArgument, "scale must be positive");
  Rng rng(seed);
  ConstrainedTwoLayerNet net;
  net.lambda = lambda;
  net.sign = sign;
  net.neurons.resize(width);
  const double margin = 0.01 * scale;
  for (auto& nr : net.neurons) {
    nr.w.resize(dim);
    for (double& v : nr.w) v = scale * rng.normal();
    nr.b = scale * rng.normal();
    double mag = std::sqrt(dot(nr.w, nr.w) + nr.b * nr.b) + margin;
    nr.v = sign > 0 ? -mag : mag;
  }
  return net;
}

Vec balancedness(const TwoLayerNet& net) {
  Vec out;
  out.reserve(net.neurons.size());
  for (const auto& nr : net.neurons)
    out.push_back(nr.v * nr.v - dot(nr.w, nr.w) - nr.b * nr.b);
  return out;
}

Vec balancedness(const ConstrainedTwoLayerNet& net) {
  return balancedness(net.as_two_layer());
}

double sign_accuracy(const ThreeLayerSumNet& net, const LabeledDataset& data) {
  size_t correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    int pred = net.forward(data.point(i), data.dim) > 0.0 ? 1 : 0;
    correct += (pred == data.labels[i]);
  }
  return double(correct) / double(data.size());
}

double sign_accuracy(const TwoLayerNet& net, const LabeledDataset& data) {
  size_t correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    int pred = net.forward(data.point(i), data.dim) > 0.0 ? 1 : 0;
    correct += (pred == data.labels[i]);
  }
  return double(correct) / double(data.size());
}

}  // namespace polynet
