#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pcn/coalition.hpp"
#include "pcn/graph.hpp"

namespace pcn {

enum class CapacitySplit {
  /// Each direction drawn independently from capacity_range.
  kIndependent,
  /// One total drawn from capacity_range and split uniformly between the directions.
  kSplitTotal,
};

struct ScenarioConfig {
  std::size_t nodes = 15;
  std::size_t channel_pairs = 70;
  std::pair<Coins, Coins> capacity_range{Coins::whole(10), Coins::whole(15)};
  std::pair<Coins, Coins> value_range{Coins::whole(1), Coins::whole(12)};
  std::pair<double, double> rate_range{0.01, 0.05};
  Coins base_fee;
  Coins xi = Coins::whole(10);
  std::size_t txs_per_batch = 4;
  std::size_t batches = 1;
  double period = 1.0;
  std::uint64_t seed = 1;
  /// When set, overrides channel_pairs with round(density * nodes * (nodes - 1) / 2).
  std::optional<double> fixed_density;
  CapacitySplit split = CapacitySplit::kIndependent;
  /// Drawn amounts are rounded to multiples of this.
  Coins granularity = Coins::from_nano(10'000'000);

  /// Channel pairs after applying fixed_density.
  std::size_t effective_pairs() const;
};

struct Scenario {
  ChannelGraph graph;
  std::vector<std::vector<Transaction>> batches;
  double period = 1.0;

  Batch batch(std::size_t index = 0) const;
};

/// Throws InfeasibleConfig when the request cannot be met: too many pairs,
/// too few to connect the nodes, empty or inverted ranges.
void validate(const ScenarioConfig& config);

/// Seeded random scenario with a connected topology; pair sets that leave the
/// graph disconnected are redrawn from the same generator.
Scenario generate_scenario(const ScenarioConfig& config);

/// Reads {nodes, channels, xi, transactions | batches, period}.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace pcn
