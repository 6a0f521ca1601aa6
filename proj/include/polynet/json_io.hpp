#ifndef POLYNET_JSON_IO_HPP
#define POLYNET_JSON_IO_HPP

#include <string>
#include <variant>

#include <json.hpp>

#include "polynet/bounds.hpp"
#include "polynet/geometry.hpp"
#include "polynet/networks.hpp"

namespace polynet {

using NetworkVariant =
    std::variant<TwoLayerNet, ConstrainedTwoLayerNet, ThreeLayerSumNet>;

nlohmann::json network_to_json(const TwoLayerNet& net);
nlohmann::json network_to_json(const ConstrainedTwoLayerNet& net);
nlohmann::json network_to_json(const ThreeLayerSumNet& net);
nlohmann::json network_to_json(const NetworkVariant& net);
NetworkVariant network_from_json(const nlohmann::json& j);

nlohmann::json cover_to_json(const PolytopeBasisCover& cover);
PolytopeBasisCover cover_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const WidthBoundReport& report);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace polynet

#endif  // POLYNET_JSON_IO_HPP
