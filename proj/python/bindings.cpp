#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pcn/cli.hpp"
#include "pcn/coalition.hpp"
#include "pcn/errors.hpp"
#include "pcn/graph_io.hpp"
#include "pcn/patience.hpp"
#include "pcn/router.hpp"
#include "pcn/scenario.hpp"
#include "pcn/sweep.hpp"

namespace py = pybind11;
using namespace pcn;

namespace {

py::object decimal(const Coins& c) {
  static py::object ctor = py::module_::import("decimal").attr("Decimal");
  return ctor(c.to_string());
}

Coins coins(const py::handle& v) { return Coins::parse(py::str(v).cast<std::string>()); }

py::dict outcome_dict(const RoutingOutcome& o) {
  py::dict d;
  d["tx"] = o.tx_id;
  d["in_pcn"] = o.success_in_pcn;
  py::list path;
  for (const NodeId& n : o.route.path) path.append(n.value);
  d["path"] = path;
  d["fee"] = decimal(o.fee);
  py::list hops;
  for (const HopTransfer& h : o.forwarded) hops.append(py::make_tuple(h.tail.value, h.head.value, decimal(h.amount)));
  d["forwarded"] = hops;
  return d;
}

template <typename Map>
py::dict coins_map(const Map& m) {
  py::dict d;
  for (const auto& [k, v] : m) d[py::int_(k)] = decimal(v);
  return d;
}

Coalition coalition_or_all(const Batch& batch, const std::optional<std::vector<TxId>>& members) {
  Coalition out;
  if (members) {
    out.insert(members->begin(), members->end());
  } else {
    for (const Transaction& tx : batch.txs) out.insert(tx.id);
  }
  return out;
}

patience::WaitModel wait_model(double l1, double l2, double mu, double v, double u) {
  patience::WaitModel m;
  m.lambda1 = l1;
  m.lambda2 = l2;
  m.values = patience::ValueDistribution::exponential(mu);
  m.value = v;
  m.capacity = u;
  return m;
}

}  // namespace

PYBIND11_MODULE(_pcnsim, m) {
  m.doc() = "Payment channel network routing, transaction coalitions and waiting times.";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<Scenario>(m, "Scenario")
      .def_static("load", [](const std::string& path) { return load_scenario(path); }, py::arg("path"))
      .def_static("from_json", [](const std::string& text) { return scenario_from_json(nlohmann::json::parse(text)); },
                  py::arg("text"))
      .def_static(
          "generate",
          [](std::size_t nodes, std::size_t pairs, std::size_t txs, std::size_t batches, std::uint64_t seed,
             std::optional<double> density) {
            ScenarioConfig c;
            c.nodes = nodes;
            c.channel_pairs = pairs;
            c.txs_per_batch = txs;
            c.batches = batches;
            c.seed = seed;
            c.fixed_density = density;
            return generate_scenario(c);
          },
          py::arg("nodes") = 15, py::arg("pairs") = 70, py::arg("txs") = 4, py::arg("batches") = 1,
          py::arg("seed") = 1, py::arg("density") = py::none())
      .def("to_json", [](const Scenario& s) { return scenario_to_json(s).dump(2); })
      .def_property_readonly("batch_count", [](const Scenario& s) { return s.batches.size(); })
      .def_property_readonly("nodes", [](const Scenario& s) {
        std::vector<std::string> out;
        for (const NodeId& n : s.graph.nodes()) out.push_back(n.value);
        return out;
      })
      .def("transactions", [](const Scenario& s, std::size_t batch) {
        py::list out;
        for (const Transaction& tx : s.batch(batch).txs) {
          out.append(py::make_tuple(tx.id, tx.sender.value, tx.receiver.value, decimal(tx.value), tx.arrival));
        }
        return out;
      }, py::arg("batch") = 0);

  m.def(
      "cheapest_path",
      [](const Scenario& s, const std::string& sender, const std::string& receiver, const py::object& value) {
        return outcome_dict(cheapest_path(s.graph, make_transaction(0, NodeId(sender), NodeId(receiver), coins(value), 0.0)));
      },
      py::arg("scenario"), py::arg("sender"), py::arg("receiver"), py::arg("value"),
      "Cheapest route on the scenario's opening graph; value is a decimal string or number.");

  m.def(
      "process",
      [](const Scenario& s, const std::vector<TxId>& order, std::size_t batch) {
        const Batch b = s.batch(batch);
        std::vector<Transaction> seq;
        for (TxId id : order) {
          auto it = std::find_if(b.txs.begin(), b.txs.end(), [id](const Transaction& t) { return t.id == id; });
          if (it == b.txs.end()) throw InvalidArgument("no transaction " + std::to_string(id));
          seq.push_back(*it);
        }
        ChannelGraph g = b.initial_graph.snapshot();
        py::list out;
        for (const RoutingOutcome& o : process_sequence(g, seq)) out.append(outcome_dict(o));
        return out;
      },
      py::arg("scenario"), py::arg("order"), py::arg("batch") = 0, "Executes the batch in the given order.");

  m.def(
      "ptp",
      [](const Scenario& s, std::size_t batch, std::optional<std::vector<TxId>> join, bool guard, bool shapley) {
        const Batch b = s.batch(batch);
        PtpOptions o;
        o.worth.guard = guard;
        o.compute_shapley = shapley;
        const PtpReport r = ptp_run(b, coalition_or_all(b, join), o);
        py::dict d;
        d["processing_order"] = r.processing_order;
        d["coalition_order"] = r.coalition_order;
        d["fcfs_fees"] = coins_map(r.fcfs_fees);
        d["coalition_fees"] = coins_map(r.coalition_fees);
        d["settled_cost"] = coins_map(r.settled_cost);
        d["worth"] = decimal(r.worth);
        d["fcfs_total_fee"] = decimal(r.fcfs_total_fee);
        d["coalition_total_fee"] = decimal(r.coalition_total_fee);
        d["fcfs_successes"] = r.fcfs_successes;
        d["coalition_successes"] = r.coalition_successes;
        d["fee_reduction"] = r.fee_reduction();
        d["success_rate_increase"] = r.success_rate_increase();
        if (r.allocation) {
          py::dict shares;
          for (std::size_t i = 0; i < r.allocation->players.size(); ++i) {
            shares[py::int_(r.allocation->players[i])] = r.allocation->shares[i].to_double();
          }
          d["shapley"] = shares;
        }
        return d;
      },
      py::arg("scenario"), py::arg("batch") = 0, py::arg("join") = py::none(), py::arg("guard") = true,
      py::arg("shapley") = true);

  m.def(
      "worth",
      [](const Scenario& s, const std::vector<TxId>& members, std::size_t batch, bool guard) {
        WorthOptions o;
        o.guard = guard;
        const WorthEvaluation w = pcn::worth(s.batch(batch), Coalition(members.begin(), members.end()), o);
        py::dict d;
        d["worth"] = decimal(w.worth);
        d["order"] = w.best_internal_order;
        d["member_fees"] = coins_map(w.member_fees);
        d["nonmember_benefits"] = coins_map(w.nonmember_benefits);
        return d;
      },
      py::arg("scenario"), py::arg("members"), py::arg("batch") = 0, py::arg("guard") = true);

  m.def(
      "shapley",
      [](const Scenario& s, std::optional<std::vector<TxId>> members, std::size_t batch, bool guard) {
        const Batch b = s.batch(batch);
        WorthOptions o;
        o.guard = guard;
        const ShapleyAllocation a = pcn::shapley(b, coalition_or_all(b, members), o);
        py::dict d;
        for (std::size_t i = 0; i < a.players.size(); ++i) d[py::int_(a.players[i])] = a.shares[i].to_double();
        return d;
      },
      py::arg("scenario"), py::arg("members") = py::none(), py::arg("batch") = 0, py::arg("guard") = true);

  m.def("expected_wait", [](double l1, double l2, double mu, double v, double u) {
    return patience::expected_wait(wait_model(l1, l2, mu, v, u));
  }, py::arg("l1"), py::arg("l2"), py::arg("mu"), py::arg("v"), py::arg("u"));

  m.def(
      "wait_cdf",
      [](double l1, double l2, double mu, double v, double u, const std::vector<double>& t) {
        const patience::WaitModel model = wait_model(l1, l2, mu, v, u);
        return patience::wait_cdf(patience::first_passage(model), t).values;
      },
      py::arg("l1"), py::arg("l2"), py::arg("mu"), py::arg("v"), py::arg("u"), py::arg("t"),
      "Exponential-value waiting-time CDF at the times in t.");

  m.def(
      "mc_wait_cdf",
      [](double l1, double l2, double mu, double v, double u, const std::vector<double>& t, std::size_t runs,
         std::uint64_t seed) {
        const patience::MonteCarloCdf mc = patience::mc_oracle(wait_model(l1, l2, mu, v, u), runs, 1e4, seed, t);
        py::dict d;
        d["cdf"] = mc.cdf;
        d["half_width"] = mc.half_width;
        d["mean"] = mc.mean;
        d["censored"] = mc.censored;
        return d;
      },
      py::arg("l1"), py::arg("l2"), py::arg("mu"), py::arg("v"), py::arg("u"), py::arg("t"),
      py::arg("runs") = 10000, py::arg("seed") = 1);

  m.def(
      "sweep",
      [](const std::string& axis, const std::vector<double>& values, std::size_t replications, std::size_t batches,
         std::uint64_t seed) {
        ScenarioConfig c;
        c.batches = batches;
        c.seed = seed;
        const ExperimentReport r = pcn::sweep(parse_axis(axis), values, c, replications);
        py::list out;
        for (const AxisSummary& s : r.summary) {
          py::dict d;
          d["axis_value"] = s.axis_value;
          d["rows"] = s.rows;
          d["mean_count_growth"] = s.mean_count_growth;
          d["mean_value_growth"] = s.mean_value_growth;
          d["pooled_count_growth"] = s.pooled_count_growth;
          d["pooled_value_growth"] = s.pooled_value_growth;
          out.append(d);
        }
        return out;
      },
      py::arg("axis"), py::arg("values"), py::arg("replications") = 20, py::arg("batches") = 50,
      py::arg("seed") = 1);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"pcnsim"};
        for (const std::string& a : args) argv.push_back(a.c_str());
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit code, stdout, stderr).");
}
