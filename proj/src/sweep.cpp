#include "pcn/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "pcn/errors.hpp"
#include "pcn/seed.hpp"

namespace pcn {
namespace {

std::size_t as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw InvalidArgument(std::string(what) + " axis needs non-negative integers");
  }
  return static_cast<std::size_t>(v);
}

ScenarioConfig config_at(SweepAxis axis, double value, const ScenarioConfig& base) {
  ScenarioConfig c = base;
  switch (axis) {
    case SweepAxis::kNodes:
      c.nodes = as_count(value, "nodes");
      c.fixed_density.reset();
      break;
    case SweepAxis::kPairs:
      c.channel_pairs = as_count(value, "pairs");
      c.fixed_density.reset();
      break;
    case SweepAxis::kTxs:
      c.txs_per_batch = as_count(value, "txs");
      break;
    case SweepAxis::kFixedDensityNodes:
      c.nodes = as_count(value, "fixed_density_nodes");
      if (!c.fixed_density) c.fixed_density = 0.3;
      break;
  }
  return c;
}

void print_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) {
    out << *v;
  } else {
    out << "undefined";
  }
}

}  // namespace

SweepAxis parse_axis(const std::string& name) {
  if (name == "nodes") return SweepAxis::kNodes;
  if (name == "pairs" || name == "edges") return SweepAxis::kPairs;
  if (name == "txs") return SweepAxis::kTxs;
  if (name == "fixed_density_nodes") return SweepAxis::kFixedDensityNodes;
  throw InvalidArgument("unknown sweep axis: " + name);
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNodes:
      return "nodes";
    case SweepAxis::kPairs:
      return "pairs";
    case SweepAxis::kTxs:
      return "txs";
    case SweepAxis::kFixedDensityNodes:
      return "fixed_density_nodes";
  }
  return "?";
}

std::optional<double> growth_rate(double fcfs, double coalition) {
  if (fcfs <= 0.0) return std::nullopt;
  return (coalition - fcfs) / fcfs;
}

AxisSummary summarize(double axis_value, const std::vector<ExperimentRow>& rows) {
  AxisSummary s;
  s.axis_value = axis_value;
  double count_sum = 0.0;
  double value_sum = 0.0;
  std::size_t defined = 0;
  double fcfs_count = 0.0;
  double coal_count = 0.0;
  double fcfs_value = 0.0;
  double coal_value = 0.0;
  for (const ExperimentRow& r : rows) {
    if (r.axis_value != axis_value) continue;
    ++s.rows;
    fcfs_count += static_cast<double>(r.fcfs_success_count);
    coal_count += static_cast<double>(r.coalition_success_count);
    fcfs_value += r.fcfs_success_value.to_double();
    coal_value += r.coalition_success_value.to_double();
    const auto gc = growth_rate(static_cast<double>(r.fcfs_success_count), static_cast<double>(r.coalition_success_count));
    const auto gv = growth_rate(r.fcfs_success_value.to_double(), r.coalition_success_value.to_double());
    if (!gc || !gv) {
      ++s.undefined_rows;
      continue;
    }
    count_sum += *gc;
    value_sum += *gv;
    ++defined;
  }
  if (defined > 0) {
    s.mean_count_growth = count_sum / static_cast<double>(defined);
    s.mean_value_growth = value_sum / static_cast<double>(defined);
  }
  s.pooled_count_growth = growth_rate(fcfs_count, coal_count);
  s.pooled_value_growth = growth_rate(fcfs_value, coal_value);
  return s;
}

void ExperimentReport::write_rows_csv(std::ostream& out) const {
  out << "axis,axis_value,replication,batch,seed,nodes,pairs,density,txs,fcfs_success_count,"
         "coalition_success_count,fcfs_success_value,coalition_success_value,fcfs_total_fee,coalition_total_fee\n";
  for (const ExperimentRow& r : rows) {
    out << to_string(axis) << ',' << r.axis_value << ',' << r.replication << ',' << r.batch << ',' << r.seed << ','
        << r.nodes << ',' << r.pairs << ',' << std::setprecision(6) << r.density << ',' << r.txs << ','
        << r.fcfs_success_count << ',' << r.coalition_success_count << ',' << r.fcfs_success_value.to_string() << ','
        << r.coalition_success_value.to_string() << ',' << r.fcfs_total_fee.to_string() << ','
        << r.coalition_total_fee.to_string() << '\n';
  }
}

void ExperimentReport::write_summary_csv(std::ostream& out) const {
  out << "axis,axis_value,rows,undefined_rows,mean_count_growth,mean_value_growth,pooled_count_growth,"
         "pooled_value_growth\n";
  for (const AxisSummary& s : summary) {
    out << to_string(axis) << ',' << s.axis_value << ',' << s.rows << ',' << s.undefined_rows << ',';
    print_optional(out, s.mean_count_growth);
    out << ',';
    print_optional(out, s.mean_value_growth);
    out << ',';
    print_optional(out, s.pooled_count_growth);
    out << ',';
    print_optional(out, s.pooled_value_growth);
    out << '\n';
  }
}

ExperimentReport sweep(SweepAxis axis, const std::vector<double>& values, const ScenarioConfig& config,
                       std::size_t replications) {
  if (!std::is_sorted(values.begin(), values.end())) throw InvalidArgument("sweep axis values must be sorted");
  ExperimentReport report;
  report.axis = axis;
  PtpOptions options;
  options.compute_shapley = false;

  for (double value : values) {
    ScenarioConfig point = config_at(axis, value, config);
    validate(point);
    for (std::size_t rep = 0; rep < replications; ++rep) {
      point.seed = derive_seed(config.seed, rep);
      const Scenario scenario = generate_scenario(point);
      const double rho = density(scenario.graph);
      for (std::size_t b = 0; b < scenario.batches.size(); ++b) {
        const Batch batch = scenario.batch(b);
        Coalition everyone;
        for (const Transaction& tx : batch.txs) everyone.insert(tx.id);
        const PtpReport ptp = ptp_run(batch, everyone, options);
        ExperimentRow row;
        row.axis_value = value;
        row.replication = rep;
        row.batch = b;
        row.seed = point.seed;
        row.nodes = point.nodes;
        row.pairs = scenario.graph.channel_count();
        row.density = rho;
        row.txs = batch.txs.size();
        row.fcfs_success_count = ptp.fcfs_successes;
        row.coalition_success_count = ptp.coalition_successes;
        row.fcfs_success_value = ptp.fcfs_success_value;
        row.coalition_success_value = ptp.coalition_success_value;
        row.fcfs_total_fee = ptp.fcfs_total_fee;
        row.coalition_total_fee = ptp.coalition_total_fee;
        report.rows.push_back(row);
      }
    }
    report.summary.push_back(summarize(value, report.rows));
  }
  return report;
}

}  // namespace pcn
