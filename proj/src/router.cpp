#include "pcn/router.hpp"

#include <algorithm>
#include <optional>

#include "pcn/errors.hpp"

namespace pcn {
namespace {

// Best known way to reach the receiver from a node. `fee` is what the sender
// owes for every edge after this node; `path` runs from this node to the
// receiver.
struct Label {
  Coins fee;
  std::vector<NodeIndex> path;
};

bool better(const Label& a, const Label& b, const ChannelGraph& g) {
  if (a.fee != b.fee) return a.fee < b.fee;
  if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
  return std::lexicographical_compare(a.path.begin(), a.path.end(), b.path.begin(), b.path.end(),
                                      [&g](NodeIndex x, NodeIndex y) { return g.node(x) < g.node(y); });
}

RoutingOutcome on_chain(const ChannelGraph& graph, const Transaction& tx) {
  RoutingOutcome out;
  out.tx_id = tx.id;
  out.route = Route{RouteKind::kOnChain, {}};
  out.fee = graph.public_chain_cost();
  out.success_in_pcn = false;
  return out;
}

}  // namespace

RoutingOutcome cheapest_path(const ChannelGraph& graph, const Transaction& tx) {
  const NodeIndex sender = graph.index_of(tx.sender);
  const NodeIndex receiver = graph.index_of(tx.receiver);
  if (sender == receiver) throw InvalidArgument("sender equals receiver");

  const std::size_t n = graph.node_count();
  std::vector<std::optional<Label>> labels(n);
  std::vector<bool> settled(n, false);
  labels[receiver] = Label{Coins(), {receiver}};

  // Backward label-setting search from the receiver. Extending a label never
  // lowers its fee and always adds a hop, so settled labels are final and
  // their paths are simple. The sender is a sink: it is labelled but never
  // expanded, since it can only appear as the first hop.
  for (;;) {
    std::optional<NodeIndex> current;
    for (NodeIndex i = 0; i < n; ++i) {
      if (settled[i] || !labels[i] || i == sender) continue;
      if (!current || better(*labels[i], *labels[*current], graph)) current = i;
    }
    if (!current) break;
    const NodeIndex i = *current;
    settled[i] = true;
    const Label& here = *labels[i];
    const Coins carried = tx.value + here.fee;

    for (EdgeIndex e : graph.in_edges(i)) {
      const DirectedEdge& edge = graph.edge(e);
      const NodeIndex j = edge.tail;
      if (settled[j]) continue;
      if (carried > edge.capacity) continue;
      Label candidate;
      candidate.fee = j == sender ? here.fee : here.fee + edge.rate * carried + edge.base_fee;
      candidate.path.reserve(here.path.size() + 1);
      candidate.path.push_back(j);
      candidate.path.insert(candidate.path.end(), here.path.begin(), here.path.end());
      if (!labels[j] || better(candidate, *labels[j], graph)) labels[j] = std::move(candidate);
    }
  }

  if (!labels[sender] || labels[sender]->fee > graph.public_chain_cost()) return on_chain(graph, tx);

  const Label& best = *labels[sender];
  RoutingOutcome out;
  out.tx_id = tx.id;
  out.route.kind = RouteKind::kChannelPath;
  out.fee = best.fee;
  out.success_in_pcn = true;
  for (NodeIndex idx : best.path) out.route.path.push_back(graph.node(idx));

  // Recover per-edge amounts walking back from the receiver.
  out.forwarded.resize(best.path.size() - 1);
  Coins downstream;
  for (std::size_t k = best.path.size() - 1; k-- > 0;) {
    const EdgeIndex e = *graph.find_edge(best.path[k], best.path[k + 1]);
    const DirectedEdge& edge = graph.edge(e);
    const Coins amount = tx.value + downstream;
    out.forwarded[k] = HopTransfer{graph.node(edge.tail), graph.node(edge.head), amount};
    if (k > 0) downstream = downstream + edge.rate * amount + edge.base_fee;
  }
  return out;
}

RoutingOutcome execute(ChannelGraph& graph, const Transaction& tx) {
  RoutingOutcome out = cheapest_path(graph, tx);
  for (const HopTransfer& hop : out.forwarded) graph.apply_transfer(hop.tail, hop.head, hop.amount);
  return out;
}

std::vector<RoutingOutcome> process_sequence(ChannelGraph& graph, std::span<const Transaction> txs) {
  std::vector<RoutingOutcome> outcomes;
  outcomes.reserve(txs.size());
  for (const Transaction& tx : txs) outcomes.push_back(execute(graph, tx));
  return outcomes;
}

}  // namespace pcn
