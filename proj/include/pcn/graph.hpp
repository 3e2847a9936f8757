#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pcn/money.hpp"

namespace pcn {

/// Account identifier. Ordering is lexicographic on the name and is used for
/// deterministic tie-breaking in routing.
struct NodeId {
  std::string value;

  NodeId() = default;
  explicit NodeId(std::string v) : value(std::move(v)) {}
  NodeId(const char* v) : value(v) {}  // NOLINT: literal node names read naturally in tests

  auto operator<=>(const NodeId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const NodeId& id) { return os << id.value; }

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;
using TxId = std::size_t;

struct DirectedEdge {
  NodeIndex tail = 0;
  NodeIndex head = 0;
  Coins capacity;
  FeeRate rate;
  Coins base_fee;

  bool operator==(const DirectedEdge&) const = default;
};

/// One bidirectional channel as it appears in scenario files.
struct ChannelSpec {
  NodeId a;
  NodeId b;
  Coins cap_ab;
  Coins cap_ba;
  FeeRate rate_ab;
  FeeRate rate_ba;
  Coins base_ab;
  Coins base_ba;
};

struct Transaction {
  TxId id = 0;
  NodeId sender;
  NodeId receiver;
  Coins value;
  double arrival = 0.0;

  bool operator==(const Transaction&) const = default;
};

/// Builds a transaction, enforcing sender != receiver, value > 0, arrival >= 0.
Transaction make_transaction(TxId id, NodeId sender, NodeId receiver, Coins value, double arrival);

/// Directed temporal channel graph.
///
/// Channels are stored as adjacent edge pairs (2k, 2k+1), so the reverse of
/// edge e is e ^ 1. The sum of the two capacities of a channel is fixed at
/// creation and every mutation goes through apply_transfer, which moves coins
/// from one direction to the other.
class ChannelGraph {
 public:
  explicit ChannelGraph(Coins public_chain_cost = Coins::whole(10));

  /// Returns the existing index when the node is already present.
  NodeIndex add_node(const NodeId& id);
  /// Creates both directed edges of a channel; endpoints are added on demand.
  void add_channel(const ChannelSpec& spec);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t channel_count() const { return pair_total_.size(); }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  const NodeId& node(NodeIndex i) const { return nodes_.at(i); }
  std::optional<NodeIndex> find_node(const NodeId& id) const;
  /// Throws UnknownNode.
  NodeIndex index_of(const NodeId& id) const;

  std::span<const DirectedEdge> edges() const { return edges_; }
  const DirectedEdge& edge(EdgeIndex e) const { return edges_.at(e); }
  static EdgeIndex reverse(EdgeIndex e) { return e ^ 1U; }
  std::span<const EdgeIndex> out_edges(NodeIndex n) const { return out_.at(n); }
  std::span<const EdgeIndex> in_edges(NodeIndex n) const { return in_.at(n); }
  std::optional<EdgeIndex> find_edge(NodeIndex tail, NodeIndex head) const;
  std::optional<EdgeIndex> find_edge(const NodeId& tail, const NodeId& head) const;

  /// Throws UnknownNode when there is no such edge.
  Coins capacity(const NodeId& tail, const NodeId& head) const;
  Coins pair_total(const NodeId& a, const NodeId& b) const;
  Coins pair_total(EdgeIndex e) const { return pair_total_.at(e / 2); }
  Coins public_chain_cost() const { return xi_; }

  /// Moves `amount` from edge e to its reverse. Throws InsufficientCapacity.
  void apply_transfer(EdgeIndex e, Coins amount);
  void apply_transfer(const NodeId& tail, const NodeId& head, Coins amount);

  /// Independent deep copy.
  ChannelGraph snapshot() const { return *this; }

  /// True when every channel sums to its creation total and no capacity is negative.
  bool conserves_capacity() const;

  /// All channels in creation order, in scenario-file form.
  std::vector<ChannelSpec> channels() const;

  bool operator==(const ChannelGraph&) const = default;

 private:
  Coins xi_;
  std::vector<NodeId> nodes_;
  std::map<NodeId, NodeIndex> index_;
  std::vector<DirectedEdge> edges_;
  std::vector<Coins> pair_total_;
  std::vector<std::vector<EdgeIndex>> out_;
  std::vector<std::vector<EdgeIndex>> in_;
};

/// Undirected density k / (j(j-1)/2) counting each channel once. Throws
/// DegenerateGraph for fewer than two nodes.
double density(const ChannelGraph& graph);

}  // namespace pcn
