#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pcn/scenario.hpp"

namespace pcn {

enum class SweepAxis { kNodes, kPairs, kTxs, kFixedDensityNodes };

/// "nodes", "pairs", "txs", "fixed_density_nodes". Throws InvalidArgument.
SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct ExperimentRow {
  double axis_value = 0.0;
  std::size_t replication = 0;
  std::size_t batch = 0;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  std::size_t pairs = 0;
  double density = 0.0;
  std::size_t txs = 0;
  std::size_t fcfs_success_count = 0;
  std::size_t coalition_success_count = 0;
  Coins fcfs_success_value;
  Coins coalition_success_value;
  Coins fcfs_total_fee;
  Coins coalition_total_fee;
};

/// (coalition - fcfs) / fcfs; nullopt when fcfs is 0.
std::optional<double> growth_rate(double fcfs, double coalition);

struct AxisSummary {
  double axis_value = 0.0;
  std::size_t rows = 0;
  /// Mean of the per-row growth rates over rows where they are defined.
  std::optional<double> mean_count_growth;
  std::optional<double> mean_value_growth;
  std::size_t undefined_rows = 0;
  /// Growth of the summed counts and values across all rows.
  std::optional<double> pooled_count_growth;
  std::optional<double> pooled_value_growth;
};

struct ExperimentReport {
  SweepAxis axis = SweepAxis::kPairs;
  std::vector<ExperimentRow> rows;
  std::vector<AxisSummary> summary;

  void write_rows_csv(std::ostream& out) const;
  void write_summary_csv(std::ostream& out) const;
};

AxisSummary summarize(double axis_value, const std::vector<ExperimentRow>& rows);

/// For each axis value, generates `replications` topologies with
/// config.batches transaction sets each, runs the grand coalition against
/// FCFS on every set and aggregates. Replication i of every axis point uses
/// the seed derived from (config.seed, i). `values` must be sorted.
ExperimentReport sweep(SweepAxis axis, const std::vector<double>& values, const ScenarioConfig& config,
                       std::size_t replications);

}  // namespace pcn
