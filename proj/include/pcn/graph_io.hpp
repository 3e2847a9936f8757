#pragma once

#include <json.hpp>

#include "pcn/graph.hpp"

namespace pcn {

/// Reads {nodes, channels, xi}. Amounts may be JSON numbers or decimal
/// strings; per-direction rate/base fields fall back to "rate"/"base" and then 0.
ChannelGraph graph_from_json(const nlohmann::json& doc);
nlohmann::json graph_to_json(const ChannelGraph& graph);

Coins coins_from_json(const nlohmann::json& value);
FeeRate rate_from_json(const nlohmann::json& value);
/// Emits a JSON number; nano-coin values survive the double round trip.
nlohmann::json coins_to_json(Coins value);
nlohmann::json rate_to_json(FeeRate value);

}  // namespace pcn
