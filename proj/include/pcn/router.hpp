#pragma once

#include <span>
#include <vector>

#include "pcn/graph.hpp"

namespace pcn {

enum class RouteKind { kOnChain, kChannelPath };

struct Route {
  RouteKind kind = RouteKind::kOnChain;
  /// Sender first, receiver last; empty for on-chain settlement.
  std::vector<NodeId> path;

  bool operator==(const Route&) const = default;
};

/// Amount pushed across one edge of the chosen path.
struct HopTransfer {
  NodeId tail;
  NodeId head;
  Coins amount;

  bool operator==(const HopTransfer&) const = default;
};

struct RoutingOutcome {
  TxId tx_id = 0;
  Route route;
  Coins fee;
  /// One entry per path edge in path order. The first entry carries
  /// value + fee, the last carries exactly value.
  std::vector<HopTransfer> forwarded;
  bool success_in_pcn = false;
};

/// Cheapest feasible path under the hop-by-hop fee model.
///
/// Edges out of the sender are free. Every other edge (i,j) charges
/// rate_ij * V + base_ij where V is the value plus all fees owed further
/// downstream, and V must fit in capacity_ij. Paths costing more than the
/// public chain cost, or no path at all, settle on chain at that cost.
/// Ties go to fewer hops, then to the lexicographically smallest node
/// sequence. Throws UnknownNode when an endpoint is missing.
RoutingOutcome cheapest_path(const ChannelGraph& graph, const Transaction& tx);

/// cheapest_path followed by the capacity updates along the chosen path.
RoutingOutcome execute(ChannelGraph& graph, const Transaction& tx);

/// Folds execute over `txs` in the given order.
std::vector<RoutingOutcome> process_sequence(ChannelGraph& graph, std::span<const Transaction> txs);

}  // namespace pcn
