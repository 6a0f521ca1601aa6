#include "polynet/json_io.hpp"

#include <cmath>
#include <fstream>

namespace polynet {

using nlohmann::json;

namespace {

json neurons_to_json(const std::vector<Neuron>& neurons) {
  json arr = json::array();
  for (const auto& nr : neurons)
    arr.push_back({{"v", nr.v}, {"w", nr.w}, {"b", nr.b}});
  return arr;
}

std::vector<Neuron> neurons_from_json(const json& arr) {
  std::vector<Neuron> out;
  for (const auto& j : arr) {
    Neuron nr;
    nr.v = j.at("v").get<double>();
    nr.w = j.at("w").get<Vec>();
    nr.b = j.at("b").get<double>();
    out.push_back(std::move(nr));
  }
  return out;
}

}  // namespace

json network_to_json(const TwoLayerNet& net) {
  return {{"kind", "two_layer"},
          {"subnets", json::array({{{"a", 1},
                                    {"v0_or_lambda", net.v0},
                                    {"neurons", neurons_to_json(net.neurons)}}})}};
}

json network_to_json(const ConstrainedTwoLayerNet& net) {
  return {{"kind", "constrained"},
          {"lambda", net.lambda},
          {"subnets", json::array({{{"a", 1},
                                    {"v0_or_lambda", net.bias()},
                                    {"neurons", neurons_to_json(net.neurons)}}})}};
}

json network_to_json(const ThreeLayerSumNet& net) {
  json subs = json::array();
  for (const auto& sub : net.subnets)
    subs.push_back({{"a", sub.a},
                    {"v0_or_lambda", sub.net.v0},
                    {"neurons", neurons_to_json(sub.net.neurons)}});
  return {{"kind", "three_layer_sum"}, {"lambda", net.lambda}, {"subnets", subs}};
}

json network_to_json(const NetworkVariant& net) {
  return std::visit([](const auto& n) { return network_to_json(n); }, net);
}

NetworkVariant network_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const json& subs = j.at("subnets");
  require(!subs.empty(), ErrorCode::IoError, "network json has no subnets");

  if (kind == "two_layer") {
    TwoLayerNet net;
    net.v0 = subs[0].at("v0_or_lambda").get<double>();
    net.neurons = neurons_from_json(subs[0].at("neurons"));
    net.validate();
    return net;
  }
  if (kind == "constrained") {
    ConstrainedTwoLayerNet net;
    net.lambda = j.at("lambda").get<double>();
    double bias = subs[0].at("v0_or_lambda").get<double>();
    net.sign = bias >= 0.0 ? +1 : -1;
    net.neurons = neurons_from_json(subs[0].at("neurons"));
    net.validate();
    return net;
  }
  if (kind == "three_layer_sum") {
    ThreeLayerSumNet net;
    net.lambda = j.at("lambda").get<double>();
    for (const auto& s : subs) {
      ThreeLayerSumNet::Subnet sub;
      sub.a = s.at("a").get<int>();
      sub.net.v0 = s.at("v0_or_lambda").get<double>();
      sub.net.neurons = neurons_from_json(s.at("neurons"));
      net.subnets.push_back(std::move(sub));
    }
    net.validate();
    return net;
  }
  throw Error(ErrorCode::IoError, "unknown network kind: " + kind);
}

namespace {

json entry_to_json(const CoverEntry& e) {
  if (const auto* poly = std::get_if<ConvexPolytope>(&e)) {
    json faces = json::array();
    for (const auto& h : poly->faces) faces.push_back({{"w", h.w}, {"b", h.b}});
    return {{"faces", faces}};
  }
  const auto& f = std::get<FunctionalPolytope>(e);
  json terms = json::array();
  for (const auto& t : f.terms) terms.push_back({{"v", t.v}, {"w", t.w}, {"b", t.b}});
  return {{"functional", true},
          {"threshold", f.threshold},
          {"below", f.below},
          {"net", {{"v0", f.v0}, {"terms", terms}}}};
}

CoverEntry entry_from_json(const json& j) {
  if (j.value("functional", false)) {
    FunctionalPolytope f;
    f.threshold = j.at("threshold").get<double>();
    f.below = j.at("below").get<bool>();
    f.v0 = j.at("net").at("v0").get<double>();
    for (const auto& t : j.at("net").at("terms")) {
      FunctionalPolytope::Term term;
      term.v = t.at("v").get<double>();
      term.w = t.at("w").get<Vec>();
      term.b = t.at("b").get<double>();
      f.terms.push_back(std::move(term));
    }
    return f;
  }
  std::vector<Hyperplane> faces;
  for (const auto& h : j.at("faces"))
    faces.emplace_back(h.at("w").get<Vec>(), h.at("b").get<double>());
  return ConvexPolytope(std::move(faces));
}

}  // namespace

json cover_to_json(const PolytopeBasisCover& cover) {
  json pos = json::array(), neg = json::array();
  for (const auto& e : cover.positives) pos.push_back(entry_to_json(e));
  for (const auto& e : cover.negatives) neg.push_back(entry_to_json(e));
  return {{"dim", cover.dim}, {"positives", pos}, {"negatives", neg}};
}

PolytopeBasisCover cover_from_json(const json& j) {
  PolytopeBasisCover cover;
  cover.dim = j.at("dim").get<size_t>();
  for (const auto& e : j.at("positives")) cover.positives.push_back(entry_from_json(e));
  for (const auto& e : j.at("negatives")) cover.negatives.push_back(entry_from_json(e));
  for (const auto* list : {&cover.positives, &cover.negatives})
    for (const auto& e : *list)
      if (entry_dim(e) != 0) check_dim(cover.dim, entry_dim(e), "cover entry");
  return cover;
}

json report_to_json(const WidthBoundReport& report) {
  json inputs = json::object(), values = json::object();
  for (const auto& [k, v] : report.inputs) inputs[k] = v;
  for (const auto& [k, v] : report.values) values[k] = v;
  json out{{"formula", report.formula},
           {"inputs", inputs},
           {"values", values},
           {"verdict", report.verdict}};
  if (!report.note.empty()) out["note"] = report.note;
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace polynet
