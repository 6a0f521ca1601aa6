#include "polynet/polynet.h"

#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "polynet/compress.hpp"
#include "polynet/construction.hpp"
#include "polynet/data.hpp"
#include "polynet/json_io.hpp"
#include "polynet/training.hpp"

using namespace polynet;

struct pn_dataset {
  LabeledDataset data;
};

struct pn_network {
  NetworkVariant net;
};

struct pn_cover {
  PolytopeBasisCover cover;
};

namespace {

thread_local std::string g_last_error;

pn_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return PN_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return PN_ERR_DIMENSION_MISMATCH;
    case ErrorCode::UnboundedPolytope: return PN_ERR_UNBOUNDED_POLYTOPE;
    case ErrorCode::EmptyPolytope: return PN_ERR_EMPTY_POLYTOPE;
    case ErrorCode::NumericError: return PN_ERR_NUMERIC;
    case ErrorCode::IoError: return PN_ERR_IO;
    case ErrorCode::BudgetExceeded: return PN_ERR_BUDGET_EXCEEDED;
    case ErrorCode::PreconditionFailed: return PN_ERR_PRECONDITION;
  }
  return PN_ERR_UNKNOWN;
}

template <typename Fn>
pn_status guarded(Fn&& fn) {
  try {
    fn();
    return PN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PN_ERR_UNKNOWN;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

LossSpec parse_loss(const char* loss, double lambda0, double lambda1) {
  std::string name = loss ? loss : "bce";
  LossSpec spec;
  spec.lambda0 = lambda0;
  spec.lambda1 = lambda1;
  if (name == "mse")
    spec.kind = LossKind::MSE;
  else if (name == "bce")
    spec.kind = LossKind::BCE;
  else if (name == "wbce")
    spec.kind = LossKind::WeightedBCE;
  else
    throw Error(ErrorCode::InvalidArgument, "unknown loss: " + name);
  return spec;
}

}  // namespace

extern "C" {

const char* pn_last_error(void) { return g_last_error.c_str(); }

void pn_string_free(char* s) { delete[] s; }

/* ------------------------------------------------------------------ */

pn_status pn_dataset_generate(const char* kind, size_t n, double noise,
                              uint64_t seed, pn_dataset** out) {
  return guarded([&] {
    SyntheticSpec spec;
    spec.kind = synthetic_kind_from_string(kind ? kind : "");
    spec.n = n;
    spec.noise = noise;
    spec.seed = seed;
    *out = new pn_dataset{gen_synthetic(spec)};
  });
}

pn_status pn_dataset_load_csv(const char* path, pn_dataset** out) {
  return guarded([&] { *out = new pn_dataset{load_csv(path)}; });
}

pn_status pn_dataset_save_csv(const pn_dataset* data, const char* path) {
  return guarded([&] { save_csv(data->data, path); });
}

pn_status pn_dataset_load_idx(const char* images_path, const char* labels_path,
                              int cls, int complement, double noise_rate,
                              uint64_t seed, pn_dataset** out) {
  return guarded([&] {
    RawDataset raw = load_idx(images_path, labels_path);
    *out = new pn_dataset{binarize(raw, cls, complement != 0, noise_rate, seed)};
  });
}

pn_status pn_dataset_load_cifar(const char* const* paths, size_t num_paths,
                                int cls, int complement, double noise_rate,
                                uint64_t seed, pn_dataset** out) {
  return guarded([&] {
    std::vector<std::string> files(paths, paths + num_paths);
    RawDataset raw = load_cifar_binary(files);
    *out = new pn_dataset{binarize(raw, cls, complement != 0, noise_rate, seed)};
  });
}

size_t pn_dataset_size(const pn_dataset* data) { return data->data.size(); }
size_t pn_dataset_dim(const pn_dataset* data) { return data->data.dim; }
int pn_dataset_label(const pn_dataset* data, size_t i) { return data->data.labels[i]; }

pn_status pn_dataset_point(const pn_dataset* data, size_t i, double* out) {
  return guarded([&] {
    require(i < data->data.size(), ErrorCode::InvalidArgument, "point index");
    const double* p = data->data.point(i);
    std::memcpy(out, p, data->data.dim * sizeof(double));
  });
}

double pn_dataset_min_interclass_distance(const pn_dataset* data) {
  return min_interclass_distance(data->data);
}

void pn_dataset_free(pn_dataset* data) { delete data; }

/* ------------------------------------------------------------------ */

pn_status pn_cover_load(const char* path, pn_cover** out) {
  return guarded([&] { *out = new pn_cover{cover_from_json(read_json_file(path))}; });
}

pn_status pn_cover_save(const pn_cover* cover, const char* path) {
  return guarded([&] { write_json_file(path, cover_to_json(cover->cover)); });
}

pn_status pn_cover_reference(const char* kind, pn_cover** out) {
  return guarded([&] {
    *out = new pn_cover{reference_cover(synthetic_kind_from_string(kind ? kind : ""))};
  });
}

pn_status pn_cover_classify(const pn_cover* cover, const double* x, size_t dim,
                            int* label_out) {
  return guarded([&] {
    *label_out = cover_vote(cover->cover, x, dim) > 0 ? 1 : 0;
  });
}

pn_status pn_cover_vote(const pn_cover* cover, const double* x, size_t dim,
                        int* vote_out) {
  return guarded([&] { *vote_out = cover_vote(cover->cover, x, dim); });
}

pn_status pn_cover_validate(const pn_cover* cover, const pn_dataset* data,
                            double* accuracy_out, size_t* num_offenders_out,
                            size_t* first_offender_out) {
  return guarded([&] {
    CoverValidation v = cover_validate(cover->cover, data->data);
    if (accuracy_out) *accuracy_out = v.accuracy;
    if (num_offenders_out) *num_offenders_out = v.offenders.size();
    if (first_offender_out)
      *first_offender_out =
          v.offenders.empty() ? std::numeric_limits<size_t>::max() : v.offenders[0];
  });
}

size_t pn_cover_num_positives(const pn_cover* cover) {
  return cover->cover.positives.size();
}

size_t pn_cover_num_negatives(const pn_cover* cover) {
  return cover->cover.negatives.size();
}

long long pn_cover_face_count(const pn_cover* cover, int positive, size_t index) {
  const auto& list = positive ? cover->cover.positives : cover->cover.negatives;
  if (index >= list.size()) return -1;
  auto c = entry_face_count(list[index]);
  return c.has_value() ? (long long)*c : -1;
}

void pn_cover_free(pn_cover* cover) { delete cover; }

/* ------------------------------------------------------------------ */

pn_status pn_network_load(const char* path, pn_network** out) {
  return guarded([&] { *out = new pn_network{network_from_json(read_json_file(path))}; });
}

pn_status pn_network_save(const pn_network* net, const char* path) {
  return guarded([&] { write_json_file(path, network_to_json(net->net)); });
}

pn_status pn_network_forward(const pn_network* net, const double* x, size_t dim,
                             double* out) {
  return guarded([&] {
    *out = std::visit([&](const auto& n) { return n.forward(x, dim); }, net->net);
  });
}

pn_status pn_network_architecture(const pn_network* net, char** out) {
  return guarded([&] {
    std::string s = std::visit(
        [](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ThreeLayerSumNet>) {
            return architecture_string(n);
          } else {
            return std::to_string(n.dim()) + "->" + std::to_string(n.width()) + "->1";
          }
        },
        net->net);
    *out = dup_string(s);
  });
}

pn_status pn_network_sign_accuracy(const pn_network* net, const pn_dataset* data,
                                   double* out) {
  return guarded([&] {
    *out = std::visit(
        [&](const auto& n) -> double {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ConstrainedTwoLayerNet>)
            return sign_accuracy(n.as_two_layer(), data->data);
          else
            return sign_accuracy(n, data->data);
        },
        net->net);
  });
}

pn_status pn_network_init_constrained(size_t width, size_t dim, double scale,
                                      uint64_t seed, int sign, double lambda,
                                      pn_network** out) {
  return guarded([&] {
    *out = new pn_network{init_implicit_bias(width, dim, scale, seed, sign, lambda)};
  });
}

pn_status pn_network_init_three_layer(size_t subnets, size_t width, size_t dim,
                                      double scale, uint64_t seed, double lambda,
                                      pn_network** out) {
  return guarded([&] {
    require(subnets >= 1, ErrorCode::InvalidArgument, "need at least one subnet");
    ThreeLayerSumNet net;
    net.lambda = lambda;
    Rng seeder(seed);
    for (size_t j = 0; j < subnets; ++j) {
      ThreeLayerSumNet::Subnet sub;
      sub.a = j % 2 == 0 ? +1 : -1;
      sub.net =
          init_implicit_bias(width, dim, scale, seeder.next_u64(), +1, lambda)
              .as_two_layer();
      net.subnets.push_back(std::move(sub));
    }
    *out = new pn_network{std::move(net)};
  });
}

void pn_network_free(pn_network* net) { delete net; }

/* ------------------------------------------------------------------ */

pn_status pn_construct_cover_network(const pn_cover* cover, double epsilon,
                                     double safety, int sample_budget,
                                     const pn_dataset* data, pn_network** out) {
  return guarded([&] {
    IndicatorBuildConfig cfg;
    cfg.epsilon = epsilon;
    if (safety > 0) cfg.safety = safety;
    if (sample_budget > 0) cfg.sample_budget = sample_budget;
    *out = new pn_network{
        cover_network(cover->cover, cfg, data ? &data->data : nullptr)};
  });
}

pn_status pn_train(pn_network* net, const pn_dataset* data, const char* loss,
                   double eta, size_t iterations, double lambda0, double lambda1,
                   int threads, const char* telemetry_csv, size_t telemetry_stride) {
  return guarded([&] {
    TrainConfig cfg;
    cfg.eta = eta;
    cfg.iterations = iterations;
    cfg.loss = parse_loss(loss, lambda0, lambda1);
    cfg.threads = threads > 0 ? threads : 1;

    std::ofstream telemetry;
    if (telemetry_csv) {
      telemetry.open(telemetry_csv);
      require(telemetry.good(), ErrorCode::IoError,
              std::string("cannot write ") + telemetry_csv);
      telemetry << "step,loss,accuracy,active_neurons\n";
    }
    if (telemetry_stride == 0) telemetry_stride = 1;

    auto active_neurons = [&](const std::vector<Neuron>& neurons) {
      size_t count = 0;
      for (const auto& nr : neurons) {
        bool active = false;
        for (size_t i = 0; i < data->data.size() && !active; ++i) {
          double z = nr.b;
          const double* x = data->data.point(i);
          for (size_t j = 0; j < data->data.dim; ++j) z += nr.w[j] * x[j];
          active = z > 0.0;
        }
        count += active;
      }
      return count;
    };

    auto run = [&](auto& n) {
      // step-at-a-time so telemetry can sample between updates
      TrainConfig one = cfg;
      one.iterations = 1;
      TrainResult last;
      for (size_t it = 0; it < cfg.iterations; ++it) {
        if (telemetry.is_open() && it % telemetry_stride == 0) {
          double lv = batch_loss(n, data->data, cfg.loss, cfg.threads);
          double acc;
          size_t act = 0;
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ConstrainedTwoLayerNet>) {
            acc = sign_accuracy(n.as_two_layer(), data->data);
            act = active_neurons(n.neurons);
          } else if constexpr (std::is_same_v<T, ThreeLayerSumNet>) {
            acc = sign_accuracy(n, data->data);
            for (const auto& sub : n.subnets) act += active_neurons(sub.net.neurons);
          } else {
            acc = sign_accuracy(n, data->data);
            act = active_neurons(n.neurons);
          }
          telemetry << it << "," << lv << "," << acc << "," << act << "\n";
        }
        last = train(n, data->data, one);
        require(last.ok, ErrorCode::NumericError, "training aborted: " + last.error);
      }
    };
    std::visit(run, net->net);
  });
}

pn_status pn_compress(pn_network* net, const pn_dataset* data, double lambda_scale,
                      long long* removed_out, size_t* scaled_out,
                      size_t* width_out, double* accuracy_out) {
  return guarded([&] {
    auto* cons = std::get_if<ConstrainedTwoLayerNet>(&net->net);
    require(cons != nullptr, ErrorCode::InvalidArgument,
            "compression needs a constrained two-layer network");
    CompressionReport r = compress(*cons, data->data, lambda_scale);
    if (removed_out) *removed_out = r.removed ? (long long)*r.removed : -1;
    if (scaled_out) *scaled_out = r.scaled.size();
    if (width_out) *width_out = r.post_width;
    if (accuracy_out) *accuracy_out = r.post_accuracy;
  });
}

pn_status pn_train_with_compression(pn_network* net, const pn_dataset* data,
                                    double eta, size_t epochs,
                                    size_t iters_per_epoch, double lambda_scale,
                                    int threads, size_t* width_out,
                                    size_t* passes_out, double* accuracy_out) {
  return guarded([&] {
    auto* three = std::get_if<ThreeLayerSumNet>(&net->net);
    require(three != nullptr, ErrorCode::InvalidArgument,
            "train_with_compression needs a three-layer sum network");
    CompressionScheduleConfig cfg;
    cfg.eta = eta;
    cfg.epochs = epochs;
    cfg.iterations_per_epoch = iters_per_epoch;
    cfg.lambda_scale = lambda_scale;
    cfg.threads = threads > 0 ? threads : 1;
    CompressionScheduleReport r = train_with_compression(*three, data->data, cfg);
    if (width_out) *width_out = r.post_width;
    if (passes_out) *passes_out = r.fixpoint_passes;
    if (accuracy_out) *accuracy_out = r.accuracy;
  });
}

pn_status pn_extract_cover(const pn_network* net, const pn_dataset* data,
                           double tol, pn_cover** out) {
  return guarded([&] {
    if (const auto* three = std::get_if<ThreeLayerSumNet>(&net->net)) {
      *out = new pn_cover{extract_cover_three_layer(*three, data->data, tol)};
      return;
    }
    if (const auto* two = std::get_if<TwoLayerNet>(&net->net)) {
      *out = new pn_cover{extract_cover_two_layer(*two, data->data).cover};
      return;
    }
    const auto& cons = std::get<ConstrainedTwoLayerNet>(net->net);
    require(cons.sign > 0, ErrorCode::InvalidArgument,
            "extraction from a sign=-1 net is not supported");
    ThreeLayerSumNet wrap;
    wrap.lambda = cons.lambda;
    wrap.subnets.push_back({+1, cons.as_two_layer()});
    *out = new pn_cover{extract_cover_three_layer(wrap, data->data, tol)};
  });
}

pn_status pn_search_cover(const pn_dataset* data, const char* config_json,
                          pn_cover** cover_out, char** summary_json_out) {
  return guarded([&] {
    SequentialSearchConfig cfg;
    if (config_json && *config_json) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(config_json);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
      }
      cfg.lambda_bias = j.value("lambda_bias", cfg.lambda_bias);
      cfg.lambda0 = j.value("lambda0", cfg.lambda0);
      cfg.lambda1 = j.value("lambda1", cfg.lambda1);
      cfg.acc_th = j.value("acc_th", cfg.acc_th);
      cfg.width = j.value("width", cfg.width);
      cfg.max_polytopes = j.value("max_polytopes", cfg.max_polytopes);
      cfg.max_width = j.value("max_width", cfg.max_width);
      cfg.eta = j.value("eta", cfg.eta);
      cfg.train_iters = j.value("train_iters", cfg.train_iters);
      cfg.finetune_rounds = j.value("finetune_rounds", cfg.finetune_rounds);
      cfg.finetune_iters = j.value("finetune_iters", cfg.finetune_iters);
      cfg.lambda_scale = j.value("lambda_scale", cfg.lambda_scale);
      cfg.init_scale = j.value("init_scale", cfg.init_scale);
      cfg.seed = j.value("seed", cfg.seed);
      cfg.threads = j.value("threads", cfg.threads);
    }
    SearchResult r = sequential_cover_search(data->data, cfg);
    if (summary_json_out) {
      nlohmann::json s{{"polytopes", r.cover.positives.size() + r.cover.negatives.size()},
                       {"faces", r.face_counts},
                       {"accuracy", r.accuracy},
                       {"complete", r.complete},
                       {"rounds", r.rounds}};
      *summary_json_out = dup_string(s.dump());
    }
    *cover_out = new pn_cover{std::move(r.cover)};
  });
}

pn_status pn_bounds_eval(const char* profile_json, char** report_json_out) {
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(profile_json ? profile_json : "");
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("profile: ") + e.what());
    }
    const std::string formula = j.at("formula").get<std::string>();
    WidthBoundReport report;
    if (formula == "lower_bound_convex") {
      report = lower_bound_convex(j.at("d").get<int>(), j.at("m").get<long long>(),
                                  j.at("widths").get<std::vector<long long>>());
    } else if (formula == "simplicial_width") {
      SimplicialProfile p;
      p.d = j.at("d").get<int>();
      p.counts = j.at("counts").get<std::vector<long long>>();
      report = simplicial_width_bound(p);
    } else if (formula == "betti_width") {
      BettiProfile p;
      p.d = j.at("d").get<int>();
      p.m = j.at("m").get<long long>();
      p.beta = j.at("beta").get<std::vector<long long>>();
      report = betti_width_bound(p);
    } else if (formula == "betti_lower") {
      report = betti_lower_check(j.at("widths").get<std::vector<long long>>(),
                                 j.at("beta").get<std::vector<long long>>());
    } else if (formula == "faces") {
      report = faces_feasibility(j.at("d").get<int>(), j.at("m").get<long long>(),
                                 j.at("widths").get<std::vector<long long>>());
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown formula: " + formula);
    }
    *report_json_out = dup_string(report_to_json(report).dump());
  });
}

namespace {

void write_grid(const pn_dataset* data, size_t resolution, const char* path,
                const std::function<double(const Vec&)>& value) {
  require(data->data.dim == 2, ErrorCode::InvalidArgument, "grid export needs 2D data");
  require(resolution >= 2, ErrorCode::InvalidArgument, "resolution must be >= 2");
  double lo[2] = {std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  for (size_t i = 0; i < data->data.size(); ++i)
    for (size_t k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], data->data.point(i)[k]);
      hi[k] = std::max(hi[k], data->data.point(i)[k]);
    }
  for (size_t k = 0; k < 2; ++k) {
    double pad = 0.1 * (hi[k] - lo[k]);
    lo[k] -= pad;
    hi[k] += pad;
  }
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, std::string("cannot write ") + path);
  out << "x,y,value\n";
  for (size_t iy = 0; iy < resolution; ++iy) {
    for (size_t ix = 0; ix < resolution; ++ix) {
      Vec p{lo[0] + (hi[0] - lo[0]) * double(ix) / double(resolution - 1),
            lo[1] + (hi[1] - lo[1]) * double(iy) / double(resolution - 1)};
      out << p[0] << "," << p[1] << "," << value(p) << "\n";
    }
  }
}

}  // namespace

pn_status pn_network_grid_csv(const pn_network* net, const pn_dataset* data,
                              size_t resolution, const char* path) {
  return guarded([&] {
    write_grid(data, resolution, path, [&](const Vec& p) {
      return std::visit([&](const auto& n) { return n.forward(p); }, net->net);
    });
  });
}

pn_status pn_cover_grid_csv(const pn_cover* cover, const pn_dataset* data,
                            size_t resolution, const char* path) {
  return guarded([&] {
    write_grid(data, resolution, path, [&](const Vec& p) {
      return double(cover_vote(cover->cover, p));
    });
  });
}

pn_status pn_guided_run(const char* loss, uint64_t seed, size_t max_steps,
                        double target_loss, const char* trace_csv,
                        double* final_loss_out, size_t* steps_out,
                        int* strictly_decreasing_out) {
  return guarded([&] {
    std::string name = loss ? loss : "mse";
    LossKind kind;
    if (name == "mse")
      kind = LossKind::MSE;
    else if (name == "bce")
      kind = LossKind::BCE;
    else
      throw Error(ErrorCode::InvalidArgument, "guided descent supports mse or bce");

    GuidedFixture fx = make_guided_fixture(kind, seed);
    std::ofstream trace;
    if (trace_csv) {
      trace.open(trace_csv);
      require(trace.good(), ErrorCode::IoError, std::string("cannot write ") + trace_csv);
      trace << "step,loss\n";
    }

    double prev = guided_loss(fx.net, fx.data, kind);
    bool strict = true;
    size_t steps = 0;
    if (trace.is_open()) trace << 0 << "," << prev << "\n";
    for (size_t it = 0; it < max_steps; ++it) {
      if (kind == LossKind::MSE)
        guided_step_mse(fx.net, fx.data, fx.cfg);
      else
        guided_step_bce(fx.net, fx.data, fx.cfg);
      double cur = guided_loss(fx.net, fx.data, kind);
      if (prev >= 1e-10 && !(cur < prev + 1e-12)) strict = false;
      prev = cur;
      ++steps;
      if (trace.is_open()) trace << steps << "," << cur << "\n";
      if (cur < target_loss) break;
    }
    if (final_loss_out) *final_loss_out = prev;
    if (steps_out) *steps_out = steps;
    if (strictly_decreasing_out) *strictly_decreasing_out = strict ? 1 : 0;
  });
}

}  // extern "C"
