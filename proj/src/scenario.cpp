#include "pcn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "pcn/errors.hpp"
#include "pcn/graph_io.hpp"

namespace pcn {

using nlohmann::json;

namespace {

constexpr int kMaxTopologyAttempts = 1000;

Coins draw_coins(std::mt19937_64& rng, std::pair<Coins, Coins> range, Coins granularity) {
  const std::int64_t lo = (range.first.nano() + granularity.nano() - 1) / granularity.nano();
  const std::int64_t hi = range.second.nano() / granularity.nano();
  const std::int64_t k = std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  return Coins::from_nano(k * granularity.nano());
}

FeeRate draw_rate(std::mt19937_64& rng, std::pair<double, double> range) {
  const double r = std::uniform_real_distribution<double>(range.first, range.second)(rng);
  return FeeRate::from_double(std::round(r * 1e4) / 1e4);
}

bool connected(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<std::size_t> parent(nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = nodes;
  for (auto [a, b] : pairs) {
    const std::size_t ra = find(a);
    const std::size_t rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components <= 1;
}

std::string node_name(std::size_t i) { return "n" + std::to_string(i); }

NodeId node_from_json(const json& v) {
  if (v.is_string()) return NodeId(v.get<std::string>());
  if (v.is_number_integer()) return NodeId(std::to_string(v.get<long long>()));
  throw ParseError("node id must be a string or integer, got " + v.dump());
}

std::vector<Transaction> transactions_from_json(const json& list) {
  if (!list.is_array()) throw ParseError("transactions must be an array");
  std::vector<Transaction> txs;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const json& t = list[k];
    const TxId id = t.contains("id") ? t.at("id").get<TxId>() : k;
    const double arrival = t.contains("arrival") ? t.at("arrival").get<double>() : static_cast<double>(k);
    txs.push_back(make_transaction(id, node_from_json(t.at("sender")), node_from_json(t.at("receiver")),
                                   coins_from_json(t.at("value")), arrival));
  }
  return txs;
}

json transactions_to_json(const std::vector<Transaction>& txs) {
  json list = json::array();
  for (const Transaction& tx : txs) {
    list.push_back(json{{"id", tx.id},
                        {"sender", tx.sender.value},
                        {"receiver", tx.receiver.value},
                        {"value", coins_to_json(tx.value)},
                        {"arrival", tx.arrival}});
  }
  return list;
}

}  // namespace

std::size_t ScenarioConfig::effective_pairs() const {
  if (!fixed_density) return channel_pairs;
  const double max_pairs = 0.5 * static_cast<double>(nodes) * static_cast<double>(nodes - (nodes > 0 ? 1 : 0));
  return static_cast<std::size_t>(std::llround(*fixed_density * max_pairs));
}

Batch Scenario::batch(std::size_t index) const {
  if (index >= batches.size()) throw InvalidArgument("scenario has no batch " + std::to_string(index));
  return Batch{batches[index], period, graph};
}

void validate(const ScenarioConfig& config) {
  if (config.nodes < 2) throw InfeasibleConfig("need at least two nodes");
  if (config.fixed_density && !(*config.fixed_density > 0.0 && *config.fixed_density <= 1.0)) {
    throw InfeasibleConfig("density must lie in (0, 1]");
  }
  const std::size_t pairs = config.effective_pairs();
  const std::size_t max_pairs = config.nodes * (config.nodes - 1) / 2;
  if (pairs > max_pairs) {
    throw InfeasibleConfig(std::to_string(pairs) + " channel pairs exceed the " + std::to_string(max_pairs) +
                           " possible among " + std::to_string(config.nodes) + " nodes");
  }
  if (pairs + 1 < config.nodes) {
    throw InfeasibleConfig(std::to_string(pairs) + " channel pairs cannot connect " + std::to_string(config.nodes) +
                           " nodes");
  }
  if (config.granularity <= Coins()) throw InfeasibleConfig("granularity must be positive");
  auto check_range = [&](std::pair<Coins, Coins> r, const char* what, bool positive) {
    if (r.first > r.second || r.first < Coins() || (positive && r.second <= Coins())) {
      throw InfeasibleConfig(std::string("invalid ") + what + " range");
    }
    const std::int64_t lo = (r.first.nano() + config.granularity.nano() - 1) / config.granularity.nano();
    const std::int64_t hi = r.second.nano() / config.granularity.nano();
    if (lo > hi || (positive && hi <= 0)) throw InfeasibleConfig(std::string(what) + " range holds no grid value");
  };
  check_range(config.capacity_range, "capacity", false);
  check_range(config.value_range, "value", true);
  if (config.rate_range.first < 0.0 || config.rate_range.first > config.rate_range.second) {
    throw InfeasibleConfig("invalid rate range");
  }
  if (config.base_fee < Coins() || config.xi < Coins()) throw InfeasibleConfig("fees must be non-negative");
  if (!(config.period > 0.0)) throw InfeasibleConfig("period must be positive");
}

Scenario generate_scenario(const ScenarioConfig& config) {
  validate(config);
  std::mt19937_64 rng(config.seed);
  const std::size_t n = config.nodes;
  const std::size_t pairs = config.effective_pairs();

  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) all.emplace_back(a, b);
  }
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxTopologyAttempts) {
      throw InfeasibleConfig("no connected topology found after " + std::to_string(kMaxTopologyAttempts) + " draws");
    }
    std::shuffle(all.begin(), all.end(), rng);
    chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(pairs));
    if (connected(n, chosen)) break;
  }
  std::sort(chosen.begin(), chosen.end());

  Scenario out{ChannelGraph(config.xi), {}, config.period};
  for (std::size_t i = 0; i < n; ++i) out.graph.add_node(NodeId(node_name(i)));
  for (auto [a, b] : chosen) {
    ChannelSpec spec;
    spec.a = NodeId(node_name(a));
    spec.b = NodeId(node_name(b));
    if (config.split == CapacitySplit::kIndependent) {
      spec.cap_ab = draw_coins(rng, config.capacity_range, config.granularity);
      spec.cap_ba = draw_coins(rng, config.capacity_range, config.granularity);
    } else {
      const Coins total = draw_coins(rng, config.capacity_range, config.granularity);
      spec.cap_ab = draw_coins(rng, {Coins(), total}, config.granularity);
      spec.cap_ba = total - spec.cap_ab;
    }
    spec.rate_ab = draw_rate(rng, config.rate_range);
    spec.rate_ba = draw_rate(rng, config.rate_range);
    spec.base_ab = config.base_fee;
    spec.base_ba = config.base_fee;
    out.graph.add_channel(spec);
  }

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> when(0.0, config.period);
  auto value_range = config.value_range;
  value_range.first = std::max(value_range.first, config.granularity);
  for (std::size_t b = 0; b < config.batches; ++b) {
    std::vector<Transaction> txs;
    for (std::size_t k = 0; k < config.txs_per_batch; ++k) {
      const std::size_t s = pick(rng);
      std::size_t r = pick(rng);
      while (r == s) r = pick(rng);
      const Coins value = draw_coins(rng, value_range, config.granularity);
      txs.push_back(make_transaction(k, NodeId(node_name(s)), NodeId(node_name(r)), value, when(rng)));
    }
    out.batches.push_back(std::move(txs));
  }
  return out;
}

Scenario scenario_from_json(const json& doc) {
  Scenario out{graph_from_json(doc), {}, 1.0};
  try {
    if (doc.contains("period")) out.period = doc.at("period").get<double>();
    if (doc.contains("batches")) {
      for (const json& b : doc.at("batches")) out.batches.push_back(transactions_from_json(b));
    } else if (doc.contains("transactions")) {
      out.batches.push_back(transactions_from_json(doc.at("transactions")));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed transaction list: ") + e.what());
  }
  for (const auto& txs : out.batches) {
    arrival_order(txs);  // rejects duplicate ids
    for (const Transaction& tx : txs) {
      out.graph.index_of(tx.sender);
      out.graph.index_of(tx.receiver);
    }
  }
  return out;
}

json scenario_to_json(const Scenario& scenario) {
  json doc = graph_to_json(scenario.graph);
  doc["period"] = scenario.period;
  if (scenario.batches.size() == 1) {
    doc["transactions"] = transactions_to_json(scenario.batches.front());
  } else {
    json batches = json::array();
    for (const auto& txs : scenario.batches) batches.push_back(transactions_to_json(txs));
    doc["batches"] = std::move(batches);
  }
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write scenario file " + path.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
}

}  // namespace pcn
