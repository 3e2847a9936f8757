#include "pcn/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pcn/coalition.hpp"
#include "pcn/errors.hpp"
#include "pcn/patience.hpp"
#include "pcn/router.hpp"
#include "pcn/scenario.hpp"
#include "pcn/sweep.hpp"

namespace pcn {
namespace {

struct GlobalFlags {
  std::string scenario;
  std::uint64_t seed = 1;
  std::string out;
  std::string guard = "on";
};

/// Writes to --out when given, otherwise to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidArgument("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

Scenario require_scenario(const GlobalFlags& g) {
  if (g.scenario.empty()) throw InvalidArgument("--scenario is required");
  return load_scenario(g.scenario);
}

std::string route_text(const Route& route) {
  if (route.kind == RouteKind::kOnChain) return "on-chain";
  std::string s;
  for (const NodeId& n : route.path) {
    if (!s.empty()) s += "->";
    s += n.value;
  }
  return s;
}

std::string tx_label(TxId id) { return "X" + std::to_string(id); }

std::string join_ids(const std::vector<TxId>& ids) {
  std::string s;
  for (TxId id : ids) {
    if (!s.empty()) s += ' ';
    s += tx_label(id);
  }
  return s;
}

Coalition pick_coalition(const Batch& batch, const std::vector<TxId>& requested) {
  Coalition c;
  if (requested.empty()) {
    for (const Transaction& tx : batch.txs) c.insert(tx.id);
  } else {
    c.insert(requested.begin(), requested.end());
  }
  return c;
}

void print_route(std::ostream& out, const ChannelGraph& graph, const Transaction& tx) {
  const RoutingOutcome r = cheapest_path(graph, tx);
  out << tx_label(tx.id) << ' ' << tx.sender << "->" << tx.receiver << " value " << tx.value.to_string()
      << ": route " << route_text(r.route) << ", fee " << r.fee.to_string() << '\n';
  for (const HopTransfer& hop : r.forwarded) {
    out << "  " << hop.tail << "->" << hop.head << " carries " << hop.amount.to_string() << '\n';
  }
}

void print_ptp(std::ostream& out, const Batch& batch, const PtpReport& report) {
  out << "arrival order: " << join_ids(report.arrival) << '\n';
  out << "processing order: " << join_ids(report.processing_order) << '\n';
  if (!report.coalition_order.empty()) out << "coalition order: " << join_ids(report.coalition_order) << '\n';
  out << "tx,sender,receiver,value,member,fcfs_fee,fcfs_route,coalition_fee,coalition_route,shapley,settled_cost\n";
  for (const Transaction& tx : arrival_order(batch.txs)) {
    const bool member = report.joined.contains(tx.id);
    out << tx_label(tx.id) << ',' << tx.sender << ',' << tx.receiver << ',' << tx.value.to_string() << ','
        << (member ? "yes" : "no") << ',' << report.fcfs_fees.at(tx.id).to_string() << ','
        << route_text(report.baseline.paths.at(tx.id)) << ',' << report.coalition_fees.at(tx.id).to_string() << ','
        << route_text(report.coalition_outcomes.at(tx.id).route) << ',';
    if (report.allocation && member) {
      out << report.allocation->share_of(tx.id).rounded().to_string();
    } else {
      out << '-';
    }
    out << ',' << report.settled_cost.at(tx.id).to_string() << '\n';
  }
  out << "fcfs total fee: " << report.fcfs_total_fee.to_string() << '\n';
  out << "coalition total fee: " << report.coalition_total_fee.to_string() << '\n';
  out << "coalition worth: " << report.worth.to_string() << '\n';
  out << "fee reduction: " << std::setprecision(4) << 100.0 * report.fee_reduction() << "%\n";
  out << "pcn successes: " << report.fcfs_successes << " -> " << report.coalition_successes << " (+"
      << 100.0 * report.success_rate_increase() << "% of " << report.tx_count << ")\n";
}

std::string subset_text(const std::vector<TxId>& players, std::uint32_t mask) {
  std::string s = "{";
  bool first = true;
  for (std::size_t k = 0; k < players.size(); ++k) {
    if (!(mask & (1U << k))) continue;
    if (!first) s += ' ';
    s += tx_label(players[k]);
    first = false;
  }
  return s + "}";
}

void print_shapley(std::ostream& out, const WorthTable& table) {
  const auto& players = table.players();
  out << "subset,worth\n";
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 1; m <= table.grand_mask(); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  for (std::uint32_t m : masks) out << subset_text(players, m) << ',' << table.at(m).to_string() << '\n';
  const ShapleyAllocation alloc = shapley_from_table(table);
  out << "player,shapley\n";
  for (std::size_t k = 0; k < players.size(); ++k) {
    out << tx_label(players[k]) << ',' << alloc.shares[k].rounded().to_string() << '\n';
  }
  out << "total," << alloc.total().rounded().to_string() << '\n';
}

std::vector<double> read_density_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open density file " + path);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::replace(token.begin(), token.end(), ',', ' ');
    std::istringstream parts(token);
    double v = 0.0;
    while (parts >> v) values.push_back(v);
  }
  return values;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Payment channel network reordering and patience toolkit", "pcnsim"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--scenario", g.scenario, "Scenario JSON file");
  app.add_option("--seed", g.seed, "Master random seed");
  app.add_option("--out", g.out, "Output file (CSV or JSON)");
  app.add_option("--guard", g.guard, "Free-rider guard")->check(CLI::IsMember({"on", "off"}));

  // route
  auto* route = app.add_subcommand("route", "Cheapest path for transactions of a scenario");
  route->fallthrough();
  std::vector<TxId> route_txs;
  std::string from;
  std::string to;
  std::string value;
  std::size_t route_batch = 0;
  route->add_option("--tx", route_txs, "Transaction ids (default: all)");
  route->add_option("--batch", route_batch, "Batch index");
  route->add_option("--from", from, "Ad hoc sender");
  route->add_option("--to", to, "Ad hoc receiver");
  route->add_option("--value", value, "Ad hoc value");

  // ptp
  auto* ptp = app.add_subcommand("ptp", "One processing period: FCFS versus the coalition");
  ptp->fallthrough();
  std::vector<TxId> join;
  std::size_t ptp_batch = 0;
  bool credit = false;
  bool no_shapley = false;
  ptp->add_option("--join", join, "Coalition members (default: all)")->delimiter(',');
  ptp->add_option("--batch", ptp_batch, "Batch index");
  ptp->add_flag("--credit-withheld", credit, "Credit guard-withheld fees to the coalition");
  ptp->add_flag("--no-shapley", no_shapley, "Skip the Shapley redistribution");

  // shapley
  auto* shap = app.add_subcommand("shapley", "Subset worths and Shapley allocation");
  shap->fallthrough();
  std::vector<TxId> shap_join;
  std::size_t shap_batch = 0;
  bool shap_credit = false;
  shap->add_option("--join", shap_join, "Players (default: all)")->delimiter(',');
  shap->add_option("--batch", shap_batch, "Batch index");
  shap->add_flag("--credit-withheld", shap_credit, "Credit guard-withheld fees to the coalition");

  // wait
  auto* wait = app.add_subcommand("wait", "Waiting-time CDF: recursion versus Monte Carlo");
  wait->fallthrough();
  double l1 = 1.0;
  double l2 = 2.0;
  double mu = 2.0;
  double v = 10.0;
  double u = 9.0;
  double t_max = 5.0;
  double horizon = 1e4;
  std::size_t points = 51;
  std::size_t runs = 100000;
  double epsilon = 1e-6;
  double step = 0.0;
  std::string density_file;
  double density_step = 0.0;
  wait->add_option("--l1", l1, "A->B arrival rate")->capture_default_str();
  wait->add_option("--l2", l2, "B->A arrival rate")->capture_default_str();
  wait->add_option("--mu", mu, "Mean of exponential transaction values")->capture_default_str();
  wait->add_option("--density", density_file, "Value density samples (whitespace or comma separated)");
  wait->add_option("--density-step", density_step, "Spacing of the density samples");
  wait->add_option("--v", v, "Tagged transaction value")->capture_default_str();
  wait->add_option("--u", u, "Initial edge capacity")->capture_default_str();
  wait->add_option("--t-max", t_max, "Largest time on the grid")->capture_default_str();
  wait->add_option("--horizon", horizon, "Simulated runs still waiting at this time are censored")->capture_default_str();
  wait->add_option("--points", points, "Number of time points")->capture_default_str();
  wait->add_option("--runs", runs, "Monte Carlo runs (0 disables)")->capture_default_str();
  wait->add_option("--epsilon", epsilon, "Truncation tolerance")->capture_default_str();
  wait->add_option("--step", step, "Quadrature step (default mean/50)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Success-rate growth over an experiment axis");
  sw->fallthrough();
  std::string axis = "pairs";
  std::vector<double> values;
  std::size_t replications = 20;
  std::string summary_path;
  ScenarioConfig sweep_cfg;
  sweep_cfg.batches = 50;
  std::optional<double> sweep_density;
  sw->add_option("--axis", axis, "nodes | pairs | txs | fixed_density_nodes")->capture_default_str();
  sw->add_option("--values", values, "Axis values")->delimiter(',')->required();
  sw->add_option("--replications", replications, "Topologies per axis value")->capture_default_str();
  sw->add_option("--batches", sweep_cfg.batches, "Transaction sets per topology")->capture_default_str();
  sw->add_option("--nodes", sweep_cfg.nodes)->capture_default_str();
  sw->add_option("--pairs", sweep_cfg.channel_pairs)->capture_default_str();
  sw->add_option("--txs", sweep_cfg.txs_per_batch)->capture_default_str();
  sw->add_option("--density", sweep_density, "Fixed density for the fixed_density_nodes axis");
  sw->add_option("--summary", summary_path, "Write the per-axis summary CSV here");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random scenario file");
  gen->fallthrough();
  ScenarioConfig gen_cfg;
  std::optional<double> gen_density;
  double gen_xi = 10.0;
  gen->add_option("--nodes", gen_cfg.nodes)->capture_default_str();
  gen->add_option("--pairs", gen_cfg.channel_pairs)->capture_default_str();
  gen->add_option("--density", gen_density, "Fixed density; overrides --pairs");
  gen->add_option("--txs", gen_cfg.txs_per_batch)->capture_default_str();
  gen->add_option("--batches", gen_cfg.batches)->capture_default_str();
  gen->add_option("--period", gen_cfg.period)->capture_default_str();
  gen->add_option("--xi", gen_xi)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    WorthOptions worth_options;
    worth_options.guard = g.guard == "on";

    if (*route) {
      const Scenario sc = require_scenario(g);
      Sink sink(g.out, out);
      if (!from.empty() || !to.empty()) {
        if (from.empty() || to.empty() || value.empty()) throw InvalidArgument("--from, --to and --value go together");
        print_route(sink.stream(), sc.graph, make_transaction(0, NodeId(from), NodeId(to), Coins::parse(value), 0.0));
        return 0;
      }
      const Batch batch = sc.batch(route_batch);
      for (const Transaction& tx : arrival_order(batch.txs)) {
        if (route_txs.empty() || std::find(route_txs.begin(), route_txs.end(), tx.id) != route_txs.end()) {
          print_route(sink.stream(), batch.initial_graph, tx);
        }
      }
      return 0;
    }

    if (*ptp) {
      const Scenario sc = require_scenario(g);
      const Batch batch = sc.batch(ptp_batch);
      PtpOptions options;
      options.worth = worth_options;
      options.worth.credit_withheld = credit;
      options.compute_shapley = !no_shapley;
      const Coalition joined = pick_coalition(batch, join);
      Sink sink(g.out, out);
      print_ptp(sink.stream(), batch, ptp_run(batch, joined, options));
      return 0;
    }

    if (*shap) {
      const Scenario sc = require_scenario(g);
      const Batch batch = sc.batch(shap_batch);
      worth_options.credit_withheld = shap_credit;
      Sink sink(g.out, out);
      print_shapley(sink.stream(), coalition_worth_table(batch, pick_coalition(batch, shap_join), worth_options));
      return 0;
    }

    if (*wait) {
      patience::WaitModel model;
      model.lambda1 = l1;
      model.lambda2 = l2;
      if (!density_file.empty()) {
        if (!(density_step > 0.0)) throw InvalidArgument("--density needs --density-step");
        model.values = patience::ValueDistribution::gridded(density_step, read_density_file(density_file));
      } else {
        model.values = patience::ValueDistribution::exponential(mu);
      }
      model.value = v;
      model.capacity = u;
      if (points < 2) throw InvalidArgument("--points must be at least 2");
      const std::vector<double> grid = patience::linear_grid(t_max, points);
      patience::FirstPassageOptions fp;
      fp.epsilon = epsilon;
      fp.step = step;
      const patience::FirstPassageTable table = patience::first_passage(model, fp);
      const patience::WaitCdf analytic = patience::wait_cdf(table, grid);
      std::optional<patience::MonteCarloCdf> mc;
      if (runs > 0) mc = patience::mc_oracle(model, runs, std::max(horizon, t_max), g.seed, grid);

      Sink sink(g.out, out);
      std::ostream& csv = sink.stream();
      csv << "t,Phi_analytic,Phi_mc,ci_halfwidth\n" << std::setprecision(8);
      double sup = 0.0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        csv << grid[k] << ',' << analytic.values[k] << ',';
        if (mc) {
          csv << mc->cdf[k] << ',' << mc->half_width[k];
          sup = std::max(sup, std::abs(mc->cdf[k] - analytic.values[k]));
        } else {
          csv << ",";
        }
        csv << '\n';
      }
      if (sink.to_file()) {
        out << "expected wait (drift formula): " << patience::expected_wait(model) << '\n';
        if (mc) {
          out << "sup |analytic - mc|: " << sup << '\n';
          out << "mc mean wait: " << mc->mean << " +/- " << mc->mean_std_error << " (" << mc->censored
              << " censored)\n";
        }
      }
      return 0;
    }

    if (*sw) {
      const SweepAxis a = parse_axis(axis);
      sweep_cfg.seed = g.seed;
      if (sweep_density) sweep_cfg.fixed_density = sweep_density;
      std::sort(values.begin(), values.end());
      const ExperimentReport report = sweep(a, values, sweep_cfg, replications);
      if (!g.out.empty()) {
        Sink rows(g.out, out);
        report.write_rows_csv(rows.stream());
      }
      if (!summary_path.empty()) {
        Sink summary(summary_path, out);
        report.write_summary_csv(summary.stream());
      }
      report.write_summary_csv(out);
      return 0;
    }

    if (*gen) {
      gen_cfg.seed = g.seed;
      gen_cfg.fixed_density = gen_density;
      gen_cfg.xi = Coins::from_double(gen_xi);
      Sink sink(g.out, out);
      sink.stream() << scenario_to_json(generate_scenario(gen_cfg)).dump(2) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace pcn
