// Command-line front end. Links only the C API from polynet/polynet.h.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polynet/polynet.h"

namespace {

using nlohmann::json;

int log_level() {
  const char* env = std::getenv("POLYNET_LOG");
  if (!env) return 1;
  std::string v = env;
  if (v == "error") return 0;
  if (v == "debug") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[polynet] %s\n", msg.c_str());
}

// Validation failures exit 1 with a JSON error object on stderr.
int fail(pn_status status, const std::string& where) {
  json err{{"error", pn_last_error()}, {"code", int(status)}, {"op", where}};
  std::fprintf(stderr, "%s\n", err.dump().c_str());
  return 1;
}

struct Manifest {
  json j;
  std::chrono::steady_clock::time_point start;
  std::string path;

  Manifest(const std::string& subcommand, const std::string& out_path) {
    start = std::chrono::steady_clock::now();
    j["subcommand"] = subcommand;
    path = out_path;
  }

  void write(const json& result) {
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    j["wall_clock_seconds"] = elapsed.count();
    j["result"] = result;
    if (path.empty()) return;
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
      std::fprintf(stderr, "[polynet] cannot write manifest %s\n", path.c_str());
      return;
    }
    std::string text = j.dump(2);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fputc('\n', f);
    std::fclose(f);
  }
};

struct DatasetGuard {
  pn_dataset* ptr = nullptr;
  ~DatasetGuard() { pn_dataset_free(ptr); }
};
struct NetworkGuard {
  pn_network* ptr = nullptr;
  ~NetworkGuard() { pn_network_free(ptr); }
};
struct CoverGuard {
  pn_cover* ptr = nullptr;
  ~CoverGuard() { pn_cover_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polytope-basis covers and the ReLU networks they induce"};
  app.require_subcommand(1);

  // shared options
  std::string data_path, out_path, config_path, manifest_path;
  std::uint64_t seed = 1;
  double eta = 0.05, lambda = 5.0, lambda_scale = 2.0, acc_th = 1.0;
  size_t iters = 1000, width = 4;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "output path");
    cmd->add_option("--seed", seed, "rng seed");
    cmd->add_option("--config", config_path, "JSON config file (flags override)");
    cmd->add_option("--manifest", manifest_path, "run manifest path");
    cmd->add_option("--threads", threads, "worker pool cap");
  };

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset as CSV");
  std::string kind = "swiss_roll", cover_out;
  size_t npoints = 1000;
  double noise = 0.04;
  gen->add_option("--kind", kind, "synthetic kind");
  gen->add_option("--n", npoints, "number of points");
  gen->add_option("--noise", noise, "noise level");
  gen->add_option("--cover-out", cover_out, "also write the matching reference cover");
  add_common(gen);

  // construct
  auto* construct = app.add_subcommand("construct", "cover JSON -> classifier network JSON");
  std::string cover_path;
  double epsilon = 0.1, safety = 10.0;
  int sample_budget = 1000;
  construct->add_option("--cover", cover_path, "cover JSON")->required();
  construct->add_option("--data", data_path, "dataset for exactness validation");
  construct->add_option("--epsilon", epsilon, "indicator margin");
  construct->add_option("--safety", safety, "slope safety factor");
  construct->add_option("--samples", sample_budget, "boundary sample budget");
  add_common(construct);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "evaluate width-bound formulas");
  std::string profile_path;
  bounds->add_option("--profile", profile_path, "profile JSON")->required();
  add_common(bounds);

  // train
  auto* train = app.add_subcommand("train", "gradient descent on a network");
  std::string net_path, loss_name = "bce", telemetry_path;
  double lambda0 = 1.0, lambda1 = 1.0;
  size_t telemetry_stride = 1, subnets = 1;
  std::string arch_kind = "constrained";
  double init_scale = 0.5;
  train->add_option("--data", data_path, "training CSV")->required();
  train->add_option("--net", net_path, "initial network JSON (else fresh init)");
  train->add_option("--arch", arch_kind, "fresh init kind: constrained|three_layer");
  train->add_option("--subnets", subnets, "subnet count for three_layer init");
  train->add_option("--width", width, "subnet width for fresh init");
  train->add_option("--init-scale", init_scale, "init weight deviation");
  train->add_option("--loss", loss_name, "mse|bce|wbce");
  train->add_option("--eta", eta, "step size");
  train->add_option("--iters", iters, "iterations");
  train->add_option("--lambda", lambda, "constrained bias");
  train->add_option("--lambda0", lambda0, "class-0 weight (wbce)");
  train->add_option("--lambda1", lambda1, "class-1 weight (wbce)");
  train->add_option("--telemetry", telemetry_path, "telemetry CSV path");
  train->add_option("--telemetry-stride", telemetry_stride, "telemetry stride");
  add_common(train);

  // compress
  auto* compress = app.add_subcommand("compress", "one compression pass");
  compress->add_option("--net", net_path, "network JSON")->required();
  compress->add_option("--data", data_path, "training CSV")->required();
  compress->add_option("--lambda-scale", lambda_scale, "scaling factor");
  add_common(compress);

  // extract
  auto* extract = app.add_subcommand("extract", "network + data -> cover JSON");
  double tol = 1e-6;
  extract->add_option("--net", net_path, "network JSON")->required();
  extract->add_option("--data", data_path, "training CSV")->required();
  extract->add_option("--tol", tol, "plateau tolerance");
  add_common(extract);

  // search
  auto* search = app.add_subcommand("search", "sequential polytope-basis cover search");
  search->add_option("--data", data_path, "training CSV")->required();
  search->add_option("--acc-th", acc_th, "target accuracy");
  search->add_option("--width", width, "initial subnet width");
  search->add_option("--eta", eta, "step size");
  search->add_option("--iters", iters, "training iterations per round");
  search->add_option("--lambda", lambda, "plateau bias");
  search->add_option("--lambda-scale", lambda_scale, "compression scaling");
  add_common(search);

  // verify
  auto* verify = app.add_subcommand("verify", "check a cover against a dataset");
  verify->add_option("--cover", cover_path, "cover JSON")->required();
  verify->add_option("--data", data_path, "dataset CSV")->required();
  verify->add_option("--acc-th", acc_th, "required accuracy (default 1.0)");
  add_common(verify);

  // grid
  auto* grid = app.add_subcommand("grid", "decision values on a regular grid");
  size_t resolution = 200;
  grid->add_option("--net", net_path, "network JSON");
  grid->add_option("--cover", cover_path, "cover JSON");
  grid->add_option("--data", data_path, "dataset CSV (bounding box)")->required();
  grid->add_option("--resolution", resolution, "grid resolution per axis");
  add_common(grid);

  // guided
  auto* guided = app.add_subcommand("guided", "guided-descent trace on the built-in fixture");
  std::string guided_loss = "mse";
  size_t guided_steps = 10000;
  double guided_target = 1e-6;
  guided->add_option("--loss", guided_loss, "mse|bce");
  guided->add_option("--steps", guided_steps, "max steps");
  guided->add_option("--target", guided_target, "stop once loss falls below");
  add_common(guided);

  CLI11_PARSE(app, argc, argv);

  // config file supplies defaults; explicit flags win
  if (!config_path.empty()) {
    FILE* f = std::fopen(config_path.c_str(), "r");
    if (!f) {
      std::fprintf(stderr, "{\"error\":\"cannot read config %s\"}\n", config_path.c_str());
      return 2;
    }
    std::string text;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
    std::fclose(f);
    json cfg = json::parse(text, nullptr, false);
    if (cfg.is_discarded()) {
      std::fprintf(stderr, "{\"error\":\"config %s is not valid JSON\"}\n",
                   config_path.c_str());
      return 2;
    }
    auto* cmd = app.get_subcommands().front();
    auto maybe = [&](const char* key, auto& target) {
      using T = std::decay_t<decltype(target)>;
      if (cfg.contains(key)) {
        std::string flag = std::string("--") + key;
        auto* opt = cmd->get_option_no_throw(flag);
        bool overridden = opt != nullptr && opt->count() > 0;
        if (!overridden) target = cfg.at(key).get<T>();
      }
    };
    maybe("eta", eta);
    maybe("iters", iters);
    maybe("lambda", lambda);
    maybe("lambda-scale", lambda_scale);
    maybe("acc-th", acc_th);
    maybe("width", width);
    maybe("threads", threads);
    maybe("seed", seed);
    maybe("noise", noise);
    maybe("n", npoints);
    maybe("epsilon", epsilon);
  }

  pn_status st = PN_OK;

  if (*gen) {
    Manifest manifest("gen", manifest_path);
    manifest.j["config"] = {{"kind", kind}, {"n", npoints}, {"noise", noise},
                            {"seed", seed}, {"out", out_path}};
    DatasetGuard data;
    st = pn_dataset_generate(kind.c_str(), npoints, noise, seed, &data.ptr);
    if (st != PN_OK) return fail(st, "gen");
    if (out_path.empty()) out_path = kind + ".csv";
    st = pn_dataset_save_csv(data.ptr, out_path.c_str());
    if (st != PN_OK) return fail(st, "gen/save");
    json result{{"points", pn_dataset_size(data.ptr)},
                {"dim", pn_dataset_dim(data.ptr)},
                {"min_interclass_distance", pn_dataset_min_interclass_distance(data.ptr)},
                {"csv", out_path}};
    if (!cover_out.empty()) {
      CoverGuard cover;
      st = pn_cover_reference(kind.c_str(), &cover.ptr);
      if (st != PN_OK) return fail(st, "gen/reference-cover");
      st = pn_cover_save(cover.ptr, cover_out.c_str());
      if (st != PN_OK) return fail(st, "gen/reference-cover");
      result["cover"] = cover_out;
    }
    manifest.write(result);
    log_info("gen: wrote " + out_path);
    std::printf("%s\n", result.dump().c_str());
    return 0;
  }

  if (*construct) {
    Manifest manifest("construct", manifest_path);
    manifest.j["config"] = {{"cover", cover_path}, {"data", data_path},
                            {"epsilon", epsilon}, {"safety", safety},
                            {"samples", sample_budget}, {"seed", seed}};
    CoverGuard cover;
    st = pn_cover_load(cover_path.c_str(), &cover.ptr);
    if (st != PN_OK) return fail(st, "construct/load");
    DatasetGuard data;
    if (!data_path.empty()) {
      st = pn_dataset_load_csv(data_path.c_str(), &data.ptr);
      if (st != PN_OK) return fail(st, "construct/data");
    }
    NetworkGuard net;
    st = pn_construct_cover_network(cover.ptr, epsilon, safety, sample_budget,
                                    data.ptr, &net.ptr);
    if (st != PN_OK) return fail(st, "construct");
    if (out_path.empty()) out_path = "network.json";
    st = pn_network_save(net.ptr, out_path.c_str());
    if (st != PN_OK) return fail(st, "construct/save");
    char* arch = nullptr;
    pn_network_architecture(net.ptr, &arch);
    json result{{"network", out_path}, {"architecture", arch ? arch : ""}};
    pn_string_free(arch);
    manifest.write(result);
    std::printf("%s\n", result.dump().c_str());
    return 0;
  }

  if (*bounds) {
    Manifest manifest("bounds", manifest_path);
    FILE* f = std::fopen(profile_path.c_str(), "r");
    if (!f) {
      std::fprintf(stderr, "{\"error\":\"cannot read profile %s\"}\n", profile_path.c_str());
      return 2;
    }
    std::string text;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
    std::fclose(f);
    char* report = nullptr;
    st = pn_bounds_eval(text.c_str(), &report);
    if (st != PN_OK) return fail(st, "bounds");
    std::printf("%s\n", report);
    if (!out_path.empty()) {
      FILE* o = std::fopen(out_path.c_str(), "w");
      if (o) {
        std::fputs(report, o);
        std::fputc('\n', o);
        std::fclose(o);
      }
    }
    manifest.write(json::parse(report));
    pn_string_free(report);
    return 0;
  }

  if (*train) {
    Manifest manifest("train", manifest_path);
    manifest.j["config"] = {{"data", data_path}, {"loss", loss_name}, {"eta", eta},
                            {"iters", iters},   {"seed", seed},       {"width", width},
                            {"lambda", lambda}, {"arch", arch_kind}};
    DatasetGuard data;
    st = pn_dataset_load_csv(data_path.c_str(), &data.ptr);
    if (st != PN_OK) return fail(st, "train/data");
    NetworkGuard net;
    if (!net_path.empty()) {
      st = pn_network_load(net_path.c_str(), &net.ptr);
    } else if (arch_kind == "three_layer") {
      st = pn_network_init_three_layer(subnets, width, pn_dataset_dim(data.ptr),
                                       init_scale, seed, lambda, &net.ptr);
    } else {
      st = pn_network_init_constrained(width, pn_dataset_dim(data.ptr), init_scale,
                                       seed, +1, lambda, &net.ptr);
    }
    if (st != PN_OK) return fail(st, "train/init");
    st = pn_train(net.ptr, data.ptr, loss_name.c_str(), eta, iters, lambda0, lambda1,
                  threads, telemetry_path.empty() ? nullptr : telemetry_path.c_str(),
                  telemetry_stride);
    if (st != PN_OK) return fail(st, "train");
    if (out_path.empty()) out_path = "trained.json";
    st = pn_network_save(net.ptr, out_path.c_str());
    if (st != PN_OK) return fail(st, "train/save");
    double acc = 0.0;
    pn_network_sign_accuracy(net.ptr, data.ptr, &acc);
    json result{{"network", out_path}, {"accuracy", acc}};
    if (!telemetry_path.empty()) result["telemetry"] = telemetry_path;
    manifest.write(result);
    std::printf("%s\n", result.dump().c_str());
    return 0;
  }

  if (*compress) {
    Manifest manifest("compress", manifest_path);
    manifest.j["config"] = {{"net", net_path}, {"data", data_path},
                            {"lambda_scale", lambda_scale}};
    NetworkGuard net;
    st = pn_network_load(net_path.c_str(), &net.ptr);
    if (st != PN_OK) return fail(st, "compress/load");
    DatasetGuard data;
    st = pn_dataset_load_csv(data_path.c_str(), &data.ptr);
    if (st != PN_OK) return fail(st, "compress/data");
    long long removed = -1;
    size_t scaled = 0, new_width = 0;
    double acc = 0.0;
    st = pn_compress(net.ptr, data.ptr, lambda_scale, &removed, &scaled, &new_width, &acc);
    if (st != PN_OK) return fail(st, "compress");
    if (out_path.empty()) out_path = "compressed.json";
    st = pn_network_save(net.ptr, out_path.c_str());
    if (st != PN_OK) return fail(st, "compress/save");
    json result{{"network", out_path}, {"removed", removed}, {"scaled", scaled},
                {"width", new_width}, {"accuracy", acc}};
    manifest.write(result);
    std::printf("%s\n", result.dump().c_str());
    return 0;
  }

  if (*extract) {
    Manifest manifest("extract", manifest_path);
    manifest.j["config"] = {{"net", net_path}, {"data", data_path}, {"tol", tol}};
    NetworkGuard net;
    st = pn_network_load(net_path.c_str(), &net.ptr);
    if (st != PN_OK) return fail(st, "extract/load");
    DatasetGuard data;
    st = pn_dataset_load_csv(data_path.c_str(), &data.ptr);
    if (st != PN_OK) return fail(st, "extract/data");
    CoverGuard cover;
    st = pn_extract_cover(net.ptr, data.ptr, tol, &cover.ptr);
    if (st != PN_OK) return fail(st, "extract");
    if (out_path.empty()) out_path = "cover.json";
    st = pn_cover_save(cover.ptr, out_path.c_str());
    if (st != PN_OK) return fail(st, "extract/save");
    double acc = 0.0;
    size_t offenders = 0, first = 0;
    pn_cover_validate(cover.ptr, data.ptr, &acc, &offenders, &first);
    json result{{"cover", out_path},
                {"positives", pn_cover_num_positives(cover.ptr)},
                {"negatives", pn_cover_num_negatives(cover.ptr)},
                {"accuracy", acc}};
    manifest.write(result);
    std::printf("%s\n", result.dump().c_str());
    return 0;
  }

  if (*search) {
    Manifest manifest("search", manifest_path);
    json cfg{{"acc_th", acc_th}, {"width", width}, {"eta", eta},
             {"train_iters", iters}, {"lambda_bias", lambda},
             {"lambda_scale", lambda_scale}, {"seed", seed}, {"threads", threads}};
    manifest.j["config"] = cfg;
    DatasetGuard data;
    st = pn_dataset_load_csv(data_path.c_str(), &data.ptr);
    if (st != PN_OK) return fail(st, "search/data");
    CoverGuard cover;
    char* summary = nullptr;
    st = pn_search_cover(data.ptr, cfg.dump().c_str(), &cover.ptr, &summary);
    if (st != PN_OK) return fail(st, "search");
    if (out_path.empty()) out_path = "cover.json";
    pn_status save_st = pn_cover_save(cover.ptr, out_path.c_str());
    json result = json::parse(summary);
    pn_string_free(summary);
    if (save_st != PN_OK) return fail(save_st, "search/save");
    result["cover"] = out_path;
    manifest.write(result);
    std::printf("%s\n", result.dump().c_str());
    bool complete = result.value("complete", false);
    return complete ? 0 : 1;
  }

  if (*verify) {
    Manifest manifest("verify", manifest_path);
    manifest.j["config"] = {{"cover", cover_path}, {"data", data_path}, {"acc_th", acc_th}};
    CoverGuard cover;
    st = pn_cover_load(cover_path.c_str(), &cover.ptr);
    if (st != PN_OK) return fail(st, "verify/load");
    DatasetGuard data;
    st = pn_dataset_load_csv(data_path.c_str(), &data.ptr);
    if (st != PN_OK) return fail(st, "verify/data");
    double acc = 0.0;
    size_t offenders = 0, first = 0;
    st = pn_cover_validate(cover.ptr, data.ptr, &acc, &offenders, &first);
    if (st != PN_OK) return fail(st, "verify");
    json result{{"accuracy", acc}, {"offenders", offenders}};
    if (offenders > 0) result["first_offender"] = first;
    manifest.write(result);
    std::printf("%s\n", result.dump().c_str());
    return acc >= acc_th ? 0 : 1;
  }

  if (*grid) {
    Manifest manifest("grid", manifest_path);
    manifest.j["config"] = {{"net", net_path}, {"cover", cover_path},
                            {"data", data_path}, {"resolution", resolution}};
    if (net_path.empty() == cover_path.empty()) {
      std::fprintf(stderr, "{\"error\":\"grid needs exactly one of --net / --cover\"}\n");
      return 2;
    }
    DatasetGuard data;
    st = pn_dataset_load_csv(data_path.c_str(), &data.ptr);
    if (st != PN_OK) return fail(st, "grid/data");
    if (out_path.empty()) out_path = "grid.csv";
    if (!net_path.empty()) {
      NetworkGuard net;
      st = pn_network_load(net_path.c_str(), &net.ptr);
      if (st != PN_OK) return fail(st, "grid/load");
      st = pn_network_grid_csv(net.ptr, data.ptr, resolution, out_path.c_str());
    } else {
      CoverGuard cover;
      st = pn_cover_load(cover_path.c_str(), &cover.ptr);
      if (st != PN_OK) return fail(st, "grid/load");
      st = pn_cover_grid_csv(cover.ptr, data.ptr, resolution, out_path.c_str());
    }
    if (st != PN_OK) return fail(st, "grid");
    json result{{"grid", out_path}, {"resolution", resolution}};
    manifest.write(result);
    std::printf("%s\n", result.dump().c_str());
    return 0;
  }

  if (*guided) {
    Manifest manifest("guided", manifest_path);
    manifest.j["config"] = {{"loss", guided_loss}, {"steps", guided_steps},
                            {"target", guided_target}, {"seed", seed}};
    if (out_path.empty()) out_path = "guided_trace.csv";
    double final_loss = 0.0;
    size_t steps = 0;
    int strict = 0;
    st = pn_guided_run(guided_loss.c_str(), seed, guided_steps, guided_target,
                       out_path.c_str(), &final_loss, &steps, &strict);
    if (st != PN_OK) return fail(st, "guided");
    json result{{"trace", out_path}, {"final_loss", final_loss},
                {"steps", steps}, {"strictly_decreasing", strict != 0}};
    manifest.write(result);
    std::printf("%s\n", result.dump().c_str());
    return strict != 0 ? 0 : 1;
  }

  return 2;
}
