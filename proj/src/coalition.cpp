#include "pcn/coalition.hpp"

#include <algorithm>

#include "pcn/errors.hpp"

namespace pcn {
namespace {

void undo(ChannelGraph& graph, const RoutingOutcome& outcome) {
  for (auto it = outcome.forwarded.rbegin(); it != outcome.forwarded.rend(); ++it) {
    graph.apply_transfer(it->head, it->tail, it->amount);
  }
}

struct OrderingScore {
  std::size_t successes = 0;
  Coins value;
  Coins fee;
};

bool preferred(const OrderingScore& a, const OrderingScore& b) {
  if (a.successes != b.successes) return a.successes > b.successes;
  if (a.value != b.value) return a.value > b.value;
  return a.fee < b.fee;
}

class OrderingSearch {
 public:
  OrderingSearch(const ChannelGraph& graph, std::span<const Transaction> members)
      : graph_(graph.snapshot()), members_(members), used_(members.size(), false) {}

  std::vector<std::size_t> run() {
    descend(OrderingScore{});
    return best_order_;
  }

 private:
  void descend(const OrderingScore& score) {
    if (order_.size() == members_.size()) {
      if (!have_best_ || preferred(score, best_score_)) {
        best_score_ = score;
        best_order_ = order_;
        have_best_ = true;
      }
      return;
    }
    for (std::size_t k = 0; k < members_.size(); ++k) {
      if (used_[k]) continue;
      const RoutingOutcome out = execute(graph_, members_[k]);
      OrderingScore next = score;
      next.fee += out.fee;
      if (out.success_in_pcn) {
        ++next.successes;
        next.value += members_[k].value;
      }
      used_[k] = true;
      order_.push_back(k);
      descend(next);
      order_.pop_back();
      used_[k] = false;
      undo(graph_, out);
    }
  }

  ChannelGraph graph_;
  std::span<const Transaction> members_;
  std::vector<bool> used_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> best_order_;
  OrderingScore best_score_;
  bool have_best_ = false;
};

const Transaction& find_tx(std::span<const Transaction> txs, TxId id) {
  for (const Transaction& tx : txs) {
    if (tx.id == id) return tx;
  }
  throw InvalidArgument("no transaction with id " + std::to_string(id));
}

void check_members(const Batch& batch, const Coalition& coalition) {
  if (coalition.empty()) throw EmptyCoalition("coalition must have at least one member");
  for (TxId id : coalition) find_tx(batch.txs, id);
}

}  // namespace

std::vector<Transaction> arrival_order(std::span<const Transaction> txs) {
  std::vector<Transaction> sorted(txs.begin(), txs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Transaction& a, const Transaction& b) {
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    return a.id < b.id;
  });
  std::set<TxId> ids;
  for (const Transaction& tx : sorted) {
    if (!ids.insert(tx.id).second) throw InvalidArgument("duplicate transaction id " + std::to_string(tx.id));
  }
  return sorted;
}

FcfsBaseline fcfs_baseline(const Batch& batch) {
  FcfsBaseline out;
  ChannelGraph graph = batch.initial_graph.snapshot();
  for (const Transaction& tx : arrival_order(batch.txs)) {
    out.graph_trace.push_back(graph);
    RoutingOutcome outcome = execute(graph, tx);
    out.fees[tx.id] = outcome.fee;
    out.paths[tx.id] = outcome.route;
    out.outcomes.push_back(std::move(outcome));
  }
  out.graph_trace.push_back(std::move(graph));
  return out;
}

PriorityOrder priority_order(const Batch& batch, const Coalition& coalition) {
  check_members(batch, coalition);
  PriorityOrder out;
  out.block = coalition;
  bool block_placed = false;
  for (const Transaction& tx : arrival_order(batch.txs)) {
    if (coalition.contains(tx.id)) {
      if (!block_placed) {
        out.slots.push_back(PrioritySlot{true, 0});
        block_placed = true;
      }
      continue;
    }
    out.slots.push_back(PrioritySlot{false, tx.id});
  }
  return out;
}

InternalOrder optimal_internal_order(const ChannelGraph& graph, std::span<const Transaction> members,
                                     std::size_t permutation_cap) {
  if (members.size() > permutation_cap) {
    throw CoalitionTooLarge("coalition of " + std::to_string(members.size()) + " exceeds the ordering cap of " +
                            std::to_string(permutation_cap));
  }
  InternalOrder out;
  out.graph_after = graph.snapshot();
  if (members.empty()) return out;

  const std::vector<std::size_t> best = OrderingSearch(graph, members).run();
  for (std::size_t k : best) {
    const Transaction& tx = members[k];
    RoutingOutcome outcome = execute(out.graph_after, tx);
    out.order.push_back(tx.id);
    out.total_fee += outcome.fee;
    if (outcome.success_in_pcn) {
      ++out.successes;
      out.success_value += tx.value;
    }
    out.outcomes.push_back(std::move(outcome));
  }
  return out;
}

GuardedOutcome free_rider_guard(const FcfsBaseline& baseline, const Transaction& tx, ChannelGraph& current) {
  GuardedOutcome out;
  out.routed = execute(current, tx);
  const Coins fcfs_fee = baseline.fee_of(tx.id);
  out.charged = std::max(out.routed.fee, fcfs_fee);
  out.withheld = out.charged - out.routed.fee;
  return out;
}

WorthEvaluation worth(const Batch& batch, const FcfsBaseline& baseline, const Coalition& coalition,
                      const WorthOptions& options) {
  const PriorityOrder order = priority_order(batch, coalition);
  const std::vector<Transaction> arrivals = arrival_order(batch.txs);

  WorthEvaluation out;
  out.coalition = coalition;
  ChannelGraph graph = batch.initial_graph.snapshot();

  auto record = [&out](const Transaction& tx, RoutingOutcome outcome, Coins charged) {
    out.processing_order.push_back(tx.id);
    out.charged_fees[tx.id] = charged;
    if (outcome.success_in_pcn) {
      ++out.pcn_successes;
      out.pcn_success_value += tx.value;
    }
    out.outcomes[tx.id] = std::move(outcome);
  };

  for (const PrioritySlot& slot : order.slots) {
    if (slot.is_block) {
      std::vector<Transaction> members;
      for (const Transaction& tx : arrivals) {
        if (coalition.contains(tx.id)) members.push_back(tx);
      }
      InternalOrder internal = optimal_internal_order(graph, members, options.permutation_cap);
      out.best_internal_order = internal.order;
      for (std::size_t k = 0; k < internal.order.size(); ++k) {
        const Transaction& tx = find_tx(members, internal.order[k]);
        out.member_fees[tx.id] = internal.outcomes[k].fee;
        record(tx, internal.outcomes[k], internal.outcomes[k].fee);
      }
      graph = std::move(internal.graph_after);
      continue;
    }
    const Transaction& tx = find_tx(arrivals, slot.tx);
    if (options.guard) {
      GuardedOutcome guarded = free_rider_guard(baseline, tx, graph);
      out.withheld += guarded.withheld;
      record(tx, std::move(guarded.routed), guarded.charged);
    } else {
      RoutingOutcome routed = execute(graph, tx);
      const Coins fee = routed.fee;
      record(tx, std::move(routed), fee);
    }
    out.nonmember_benefits[tx.id] = baseline.fee_of(tx.id) - out.charged_fees[tx.id];
  }

  for (const auto& [id, fee] : out.member_fees) out.worth += baseline.fee_of(id) - fee;
  if (options.credit_withheld) out.worth += out.withheld;
  return out;
}

WorthEvaluation worth(const Batch& batch, const Coalition& coalition, const WorthOptions& options) {
  return worth(batch, fcfs_baseline(batch), coalition, options);
}

WorthTable coalition_worth_table(const Batch& batch, const Coalition& coalition, const WorthOptions& options,
                                 std::size_t subset_cap) {
  check_members(batch, coalition);
  if (coalition.size() > subset_cap) {
    throw CoalitionTooLarge("coalition of " + std::to_string(coalition.size()) + " exceeds the subset cap of " +
                            std::to_string(subset_cap));
  }
  const FcfsBaseline baseline = fcfs_baseline(batch);
  WorthTable table(std::vector<TxId>(coalition.begin(), coalition.end()));
  const auto& players = table.players();
  for (std::uint32_t mask = 1; mask <= table.grand_mask(); ++mask) {
    Coalition subset;
    for (std::size_t k = 0; k < players.size(); ++k) {
      if (mask & (1U << k)) subset.insert(players[k]);
    }
    table.set(mask, worth(batch, baseline, subset, options).worth);
  }
  return table;
}

ShapleyAllocation shapley(const Batch& batch, const Coalition& coalition, const WorthOptions& options,
                          std::size_t subset_cap) {
  return shapley_from_table(coalition_worth_table(batch, coalition, options, subset_cap));
}

double PtpReport::fee_reduction() const {
  if (fcfs_total_fee == Coins()) return 0.0;
  return (fcfs_total_fee - coalition_total_fee).to_double() / fcfs_total_fee.to_double();
}

double PtpReport::success_rate_increase() const {
  if (tx_count == 0) return 0.0;
  return (static_cast<double>(coalition_successes) - static_cast<double>(fcfs_successes)) /
         static_cast<double>(tx_count);
}

PtpReport ptp_run(const Batch& batch, const Coalition& joined, const PtpOptions& options) {
  PtpReport report;
  report.joined = joined;
  report.tx_count = batch.txs.size();
  for (const Transaction& tx : arrival_order(batch.txs)) report.arrival.push_back(tx.id);
  report.baseline = fcfs_baseline(batch);

  for (const RoutingOutcome& o : report.baseline.outcomes) {
    report.fcfs_fees[o.tx_id] = o.fee;
    report.fcfs_total_fee += o.fee;
    if (o.success_in_pcn) {
      ++report.fcfs_successes;
      report.fcfs_success_value += find_tx(batch.txs, o.tx_id).value;
    }
  }

  if (joined.empty()) {
    report.processing_order = report.arrival;
    report.coalition_fees = report.fcfs_fees;
    for (const RoutingOutcome& o : report.baseline.outcomes) report.coalition_outcomes[o.tx_id] = o;
    report.settled_cost = report.fcfs_fees;
    report.coalition_total_fee = report.fcfs_total_fee;
    report.coalition_successes = report.fcfs_successes;
    report.coalition_success_value = report.fcfs_success_value;
    return report;
  }

  WorthEvaluation eval = worth(batch, report.baseline, joined, options.worth);
  report.processing_order = eval.processing_order;
  report.coalition_order = eval.best_internal_order;
  report.coalition_fees = eval.charged_fees;
  report.coalition_outcomes = eval.outcomes;
  report.worth = eval.worth;
  report.coalition_successes = eval.pcn_successes;
  report.coalition_success_value = eval.pcn_success_value;
  for (const auto& [id, fee] : eval.charged_fees) report.coalition_total_fee += fee;

  report.settled_cost = eval.charged_fees;
  if (options.compute_shapley) {
    report.allocation = shapley(batch, joined, options.worth, options.subset_cap);
    for (TxId id : joined) {
      report.settled_cost[id] = report.fcfs_fees[id] - report.allocation->share_of(id).rounded();
    }
  }
  return report;
}

}  // namespace pcn
