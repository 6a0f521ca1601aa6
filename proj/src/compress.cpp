#include "polynet/compress.hpp"

#include <algorithm>
#include <cmath>

namespace polynet {

namespace {

// Activation bitsets, one row per neuron. Strict w.x + b > 0 with no
// tolerance: data exactly on a kink counts as inactive.
std::vector<std::vector<std::uint64_t>> activation_rows(
    const std::vector<Neuron>& neurons, const LabeledDataset& data) {
  const size_t n = data.size();
  const size_t words = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows(neurons.size(),
                                               std::vector<std::uint64_t>(words, 0));
  for (size_t k = 0; k < neurons.size(); ++k) {
    const auto& nr = neurons[k];
    for (size_t i = 0; i < n; ++i) {
      const double* x = data.point(i);
      double z = nr.b;
      for (size_t j = 0; j < data.dim; ++j) z += nr.w[j] * x[j];
      if (z > 0.0) rows[k][i >> 6] |= std::uint64_t(1) << (i & 63);
    }
  }
  return rows;
}

bool subset(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

double decision_accuracy(const ConstrainedTwoLayerNet& net, const LabeledDataset& data) {
  size_t correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    int pred = net.forward(data.point(i), data.dim) > 0.0 ? 1 : 0;
    correct += (pred == data.labels[i]);
  }
  return double(correct) / double(data.size());
}

// Output lies strictly inside the gap between the off level and the plateau.
bool in_gap(const ConstrainedTwoLayerNet& net, double t, double tol = 0.0) {
  if (net.sign > 0) return t > tol && t < net.lambda - tol;
  return t < -tol && t > -net.lambda + tol;
}

}  // namespace

CompressionReport compress(ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                           double lambda_scale) {
  net.validate();
  data.validate();
  require(lambda_scale > 1.0, ErrorCode::InvalidArgument, "lambda_scale must be > 1");
  check_dim(net.dim(), data.dim, "compress");

  CompressionReport report;
  report.pre_width = net.width();
  report.pre_accuracy = decision_accuracy(net, data);

  // PART 1: remove the least important dominated neuron.
  if (net.width() > 1) {
    auto rows = activation_rows(net.neurons, data);
    const size_t m = net.width();
    int best = -1;
    double best_importance = 0.0;
    for (size_t k = 0; k < m; ++k) {
      bool dominated = false;
      for (size_t l = 0; l < m && !dominated; ++l)
        if (l != k && subset(rows[l], rows[k])) dominated = true;
      if (!dominated) continue;
      double imp = std::fabs(net.neurons[k].v) * norm2(net.neurons[k].w);
      if (best < 0 || imp < best_importance) {
        best = int(k);
        best_importance = imp;
      }
    }
    if (best >= 0) {
      report.removed = size_t(best);
      net.neurons.erase(net.neurons.begin() + best);
    }
  }

  // PART 2: scale neurons active on gap points. Activations are invariant
  // under the scaling, and every neuron active on a gap point is selected,
  // so each pass multiplies the gap deficit by lambda_scale^2.
  {
    const size_t m = net.width();
    const size_t n = data.size();
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = net.forward(data.point(i), data.dim);
    auto rows = activation_rows(net.neurons, data);
    for (size_t k = 0; k < m; ++k) {
      bool scale = false;
      for (size_t i = 0; i < n && !scale; ++i) {
        if (!(rows[k][i >> 6] >> (i & 63) & 1)) continue;
        if (in_gap(net, out[i])) scale = true;
      }
      if (!scale) continue;
      report.scaled.push_back(k);
      net.neurons[k].v *= lambda_scale;
      net.neurons[k].b *= lambda_scale;
      for (double& w : net.neurons[k].w) w *= lambda_scale;
    }
  }

  report.post_width = net.width();
  report.post_accuracy = decision_accuracy(net, data);
  return report;
}

bool plateau_condition(const ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                       double tol) {
  for (size_t i = 0; i < data.size(); ++i) {
    double t = net.forward(data.point(i), data.dim);
    double dist_plateau = std::fabs(t - net.bias());
    bool off = net.sign > 0 ? t <= tol : t >= -tol;
    if (!off && dist_plateau > tol) return false;
  }
  return true;
}

size_t compress_to_fixpoint(ConstrainedTwoLayerNet& net, const LabeledDataset& data,
                            double lambda_scale, size_t max_passes, double tol) {
  for (size_t pass = 0; pass < max_passes; ++pass) {
    if (plateau_condition(net, data, tol)) return pass;
    compress(net, data, lambda_scale);
  }
  require(plateau_condition(net, data, tol), ErrorCode::BudgetExceeded,
          "compression did not reach the plateau condition in " +
              std::to_string(max_passes) + " passes");
  return max_passes;
}

ConstrainedTwoLayerNet subnet_view(const ThreeLayerSumNet& net, size_t j) {
  require(j < net.subnets.size(), ErrorCode::InvalidArgument, "subnet index");
  const auto& sub = net.subnets[j].net;
  require(std::fabs(sub.v0 - net.lambda) <= 1e-9, ErrorCode::PreconditionFailed,
          "subnet bias differs from lambda (not in constrained form)");
  ConstrainedTwoLayerNet view;
  view.lambda = net.lambda;
  view.sign = +1;
  view.neurons = sub.neurons;
  view.validate();
  return view;
}

void store_subnet(ThreeLayerSumNet& net, size_t j, const ConstrainedTwoLayerNet& sub) {
  require(j < net.subnets.size(), ErrorCode::InvalidArgument, "subnet index");
  net.subnets[j].net.v0 = sub.bias();
  net.subnets[j].net.neurons = sub.neurons;
}

PolytopeBasisCover extract_cover_three_layer(const ThreeLayerSumNet& net,
                                             const LabeledDataset& data,
                                             double tol) {
  net.validate();
  data.validate();
  check_dim(net.dim(), data.dim, "extract_cover_three_layer");
  require(net.constrained_form(1e-9), ErrorCode::PreconditionFailed,
          "extraction requires constrained subnets (bias lambda, negative v_k)");

  std::string offenders;
  size_t bad = 0;
  for (size_t j = 0; j < net.subnets.size(); ++j) {
    for (size_t i = 0; i < data.size(); ++i) {
      double t = net.subnets[j].net.forward(data.point(i), data.dim);
      if (t <= tol || std::fabs(t - net.lambda) <= tol) continue;
      if (bad < 5)
        offenders += " (subnet " + std::to_string(j) + ", point " +
                     std::to_string(i) + ", value " + std::to_string(t) + ")";
      ++bad;
    }
  }
  require(bad == 0, ErrorCode::PreconditionFailed,
          "subnet outputs off the {0, lambda} plateau on " + std::to_string(bad) +
              " data points:" + offenders);

  PolytopeBasisCover cover;
  cover.dim = net.dim();
  for (const auto& sub : net.subnets) {
    std::vector<Hyperplane> faces;
    for (const auto& nr : sub.net.neurons) faces.emplace_back(nr.w, nr.b);
    ConvexPolytope poly(std::move(faces));
    if (sub.a > 0)
      cover.positives.emplace_back(std::move(poly));
    else
      cover.negatives.emplace_back(std::move(poly));
  }
  return cover;
}

TwoLayerExtractResult extract_cover_two_layer(const TwoLayerNet& net,
                                              const LabeledDataset& data) {
  net.validate();
  data.validate();
  check_dim(net.dim(), data.dim, "extract_cover_two_layer");
  const size_t n = data.size();
  const size_t d = data.dim;

  // Split into a convex and a concave half by output-weight sign.
  FunctionalPolytope pos_half, neg_half;
  pos_half.v0 = neg_half.v0 = 0.5 * net.v0;
  for (const auto& nr : net.neurons) {
    FunctionalPolytope::Term t{nr.v, nr.w, nr.b};
    (nr.v > 0.0 ? pos_half : neg_half).terms.push_back(std::move(t));
  }
  auto eval_half = [&](const FunctionalPolytope& h, const double* x) {
    double s = h.v0;
    for (const auto& t : h.terms) {
      double z = t.b;
      for (size_t j = 0; j < d; ++j) z += t.w[j] * x[j];
      s += t.v * relu(z);
    }
    return s;
  };

  std::vector<double> npos(n), nneg(n);
  std::vector<int> net_sign(n);
  for (size_t i = 0; i < n; ++i) {
    npos[i] = eval_half(pos_half, data.point(i));
    nneg[i] = eval_half(neg_half, data.point(i));
    net_sign[i] = npos[i] + nneg[i] > 0.0 ? 1 : 0;
  }

  TwoLayerExtractResult result;
  result.cover.dim = d;
  std::vector<int> vote(n, 0);

  for (size_t round = 0; round <= n; ++round) {
    int pick = -1;
    double confidence = 0.0;
    for (size_t i = 0; i < n; ++i) {
      int cover_sign = vote[i] > 0 ? 1 : 0;
      if (cover_sign == net_sign[i]) continue;
      double conf = std::fabs(npos[i] + nneg[i]);
      if (pick < 0 || conf < confidence) {
        pick = int(i);
        confidence = conf;
      }
    }
    if (pick < 0) break;
    require(round < n, ErrorCode::NumericError,
            "two-layer extraction failed to settle within |data| rounds");

    double c = 0.5 * (npos[pick] - nneg[pick]);

    FunctionalPolytope below = pos_half;  // {N+ < c} joins the negatives
    below.threshold = c;
    below.below = true;
    FunctionalPolytope above = neg_half;  // {N- > -c} joins the positives
    above.threshold = -c;
    above.below = false;

    for (size_t i = 0; i < n; ++i) {
      if (nneg[i] > -c) vote[i] += 1;
      if (npos[i] < c) vote[i] -= 1;
    }
    result.cover.positives.emplace_back(std::move(above));
    result.cover.negatives.emplace_back(std::move(below));
    ++result.rounds;
  }
  return result;
}

}  // namespace polynet
