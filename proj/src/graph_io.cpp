#include "pcn/graph_io.hpp"

#include "pcn/errors.hpp"

namespace pcn {

using nlohmann::json;

Coins coins_from_json(const json& value) {
  if (value.is_string()) return Coins::parse(value.get<std::string>());
  if (value.is_number()) return Coins::from_double(value.get<double>());
  throw ParseError("expected a coin amount, got " + value.dump());
}

FeeRate rate_from_json(const json& value) {
  if (value.is_string()) return FeeRate::parse(value.get<std::string>());
  if (value.is_number()) return FeeRate::from_double(value.get<double>());
  throw ParseError("expected a fee rate, got " + value.dump());
}

json coins_to_json(Coins value) { return value.to_double(); }
json rate_to_json(FeeRate value) { return value.to_double(); }

namespace {

const json* field(const json& obj, const char* primary, const char* fallback) {
  if (auto it = obj.find(primary); it != obj.end()) return &*it;
  if (fallback != nullptr) {
    if (auto it = obj.find(fallback); it != obj.end()) return &*it;
  }
  return nullptr;
}

NodeId node_from_json(const json& v) {
  if (v.is_string()) return NodeId(v.get<std::string>());
  if (v.is_number_integer()) return NodeId(std::to_string(v.get<long long>()));
  throw ParseError("node id must be a string or integer, got " + v.dump());
}

}  // namespace

ChannelGraph graph_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("graph document must be an object");
  try {
    ChannelGraph graph(doc.contains("xi") ? coins_from_json(doc.at("xi")) : Coins::whole(10));
    if (auto it = doc.find("nodes"); it != doc.end()) {
      for (const json& n : *it) graph.add_node(node_from_json(n));
    }
    if (auto it = doc.find("channels"); it != doc.end()) {
      for (const json& c : *it) {
        ChannelSpec spec;
        spec.a = node_from_json(c.at("a"));
        spec.b = node_from_json(c.at("b"));
        spec.cap_ab = coins_from_json(c.at("cap_ab"));
        spec.cap_ba = coins_from_json(c.at("cap_ba"));
        const json* rate_ab = field(c, "rate_ab", "rate");
        const json* rate_ba = field(c, "rate_ba", "rate");
        const json* base_ab = field(c, "base_ab", "base");
        const json* base_ba = field(c, "base_ba", "base");
        spec.rate_ab = rate_ab ? rate_from_json(*rate_ab) : FeeRate();
        spec.rate_ba = rate_ba ? rate_from_json(*rate_ba) : FeeRate();
        spec.base_ab = base_ab ? coins_from_json(*base_ab) : Coins();
        spec.base_ba = base_ba ? coins_from_json(*base_ba) : Coins();
        graph.add_channel(spec);
      }
    }
    return graph;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed graph document: ") + e.what());
  }
}

json graph_to_json(const ChannelGraph& graph) {
  json doc;
  doc["xi"] = coins_to_json(graph.public_chain_cost());
  json nodes = json::array();
  for (const NodeId& n : graph.nodes()) nodes.push_back(n.value);
  doc["nodes"] = std::move(nodes);
  json channels = json::array();
  for (const ChannelSpec& c : graph.channels()) {
    channels.push_back(json{{"a", c.a.value},
                            {"b", c.b.value},
                            {"cap_ab", coins_to_json(c.cap_ab)},
                            {"cap_ba", coins_to_json(c.cap_ba)},
                            {"rate_ab", rate_to_json(c.rate_ab)},
                            {"rate_ba", rate_to_json(c.rate_ba)},
                            {"base_ab", coins_to_json(c.base_ab)},
                            {"base_ba", coins_to_json(c.base_ba)}});
  }
  doc["channels"] = std::move(channels);
  return doc;
}

}  // namespace pcn
