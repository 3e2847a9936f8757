#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "pcn/graph.hpp"
#include "pcn/router.hpp"
#include "pcn/shapley.hpp"

namespace pcn {

using Coalition = std::set<TxId>;

/// Transactions collected during one processing period, together with the
/// channel graph as it stood when the period opened.
struct Batch {
  std::vector<Transaction> txs;
  double period = 0.0;
  ChannelGraph initial_graph;
};

/// Transactions sorted by arrival, ties broken by id.
std::vector<Transaction> arrival_order(std::span<const Transaction> txs);

struct FcfsBaseline {
  /// In arrival order.
  std::vector<RoutingOutcome> outcomes;
  std::map<TxId, Coins> fees;
  std::map<TxId, Route> paths;
  /// Graph before each transaction, followed by the final graph.
  std::vector<ChannelGraph> graph_trace;

  Coins fee_of(TxId id) const { return fees.at(id); }
};

FcfsBaseline fcfs_baseline(const Batch& batch);

struct PrioritySlot {
  bool is_block = false;
  /// Meaningful only when !is_block.
  TxId tx = 0;

  bool operator==(const PrioritySlot&) const = default;
};

/// Processing sequence with the coalition collapsed into one block that sits
/// where its earliest member arrived.
struct PriorityOrder {
  std::vector<PrioritySlot> slots;
  Coalition block;
};

/// Throws EmptyCoalition, or InvalidArgument when S names unknown ids.
PriorityOrder priority_order(const Batch& batch, const Coalition& coalition);

struct InternalOrder {
  std::vector<TxId> order;
  std::vector<RoutingOutcome> outcomes;
  ChannelGraph graph_after;
  std::size_t successes = 0;
  Coins success_value;
  Coins total_fee;
};

/// Exhaustive search over member orderings. Preference: more PCN successes,
/// then more value settled in the PCN, then lower total fee, then the
/// earliest ordering in arrival rank. `members` must be in arrival order.
/// Throws CoalitionTooLarge above `permutation_cap` members.
InternalOrder optimal_internal_order(const ChannelGraph& graph, std::span<const Transaction> members,
                                     std::size_t permutation_cap = 8);

struct WorthOptions {
  /// Floor non-member fees at their FCFS fee.
  bool guard = true;
  /// Add the fees withheld by the guard to the coalition's worth.
  bool credit_withheld = false;
  std::size_t permutation_cap = 8;
};

struct GuardedOutcome {
  RoutingOutcome routed;
  Coins charged;
  /// charged - routed.fee, never negative.
  Coins withheld;
};

/// Routes a non-member on the current graph (mutating it) and charges
/// max(routed fee, FCFS fee): savings the coalition created are withheld,
/// losses it caused are passed through.
GuardedOutcome free_rider_guard(const FcfsBaseline& baseline, const Transaction& tx, ChannelGraph& current);

struct WorthEvaluation {
  Coalition coalition;
  std::vector<TxId> best_internal_order;
  /// Full batch in the order it was processed.
  std::vector<TxId> processing_order;
  std::map<TxId, RoutingOutcome> outcomes;
  std::map<TxId, Coins> member_fees;
  /// Fee each transaction is charged in this run (guarded for non-members).
  std::map<TxId, Coins> charged_fees;
  std::map<TxId, Coins> nonmember_benefits;
  Coins withheld;
  Coins worth;
  std::size_t pcn_successes = 0;
  Coins pcn_success_value;
};

/// Simulates the whole batch with S reordered as a block and returns
/// sum over members of (FCFS fee - coalition fee).
WorthEvaluation worth(const Batch& batch, const FcfsBaseline& baseline, const Coalition& coalition,
                      const WorthOptions& options = {});
WorthEvaluation worth(const Batch& batch, const Coalition& coalition, const WorthOptions& options = {});

/// Worth of every subset of S, each evaluated as its own coalition against
/// the rest of the batch. Throws CoalitionTooLarge above `subset_cap`.
WorthTable coalition_worth_table(const Batch& batch, const Coalition& coalition, const WorthOptions& options = {},
                                 std::size_t subset_cap = 12);

ShapleyAllocation shapley(const Batch& batch, const Coalition& coalition, const WorthOptions& options = {},
                          std::size_t subset_cap = 12);

struct PtpOptions {
  WorthOptions worth;
  bool compute_shapley = true;
  std::size_t subset_cap = 12;
};

struct PtpReport {
  std::vector<TxId> arrival;
  Coalition joined;
  FcfsBaseline baseline;
  std::vector<TxId> processing_order;
  std::vector<TxId> coalition_order;
  std::map<TxId, Coins> fcfs_fees;
  std::map<TxId, Coins> coalition_fees;
  std::map<TxId, RoutingOutcome> coalition_outcomes;
  std::optional<ShapleyAllocation> allocation;
  /// FCFS fee minus the Shapley share for members, charged fee otherwise.
  std::map<TxId, Coins> settled_cost;
  Coins worth;
  Coins fcfs_total_fee;
  Coins coalition_total_fee;
  std::size_t tx_count = 0;
  std::size_t fcfs_successes = 0;
  std::size_t coalition_successes = 0;
  Coins fcfs_success_value;
  Coins coalition_success_value;

  /// (fcfs_total - coalition_total) / fcfs_total, 0 when fcfs_total is 0.
  double fee_reduction() const;
  /// Change in the PCN success rate, (coalition - fcfs) / tx_count.
  double success_rate_increase() const;
};

/// One processing period: FCFS baseline, priority order, optimal block
/// ordering and Shapley redistribution for the joined transactions.
PtpReport ptp_run(const Batch& batch, const Coalition& joined, const PtpOptions& options = {});

}  // namespace pcn
