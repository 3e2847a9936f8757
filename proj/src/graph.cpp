#include "pcn/graph.hpp"

#include <cmath>

#include "pcn/errors.hpp"

namespace pcn {

Transaction make_transaction(TxId id, NodeId sender, NodeId receiver, Coins value, double arrival) {
  if (sender == receiver) throw InvalidArgument("transaction " + std::to_string(id) + ": sender equals receiver");
  if (value <= Coins()) throw InvalidArgument("transaction " + std::to_string(id) + ": value must be positive");
  if (!(arrival >= 0.0) || !std::isfinite(arrival)) {
    throw InvalidArgument("transaction " + std::to_string(id) + ": arrival must be a finite non-negative time");
  }
  return Transaction{id, std::move(sender), std::move(receiver), value, arrival};
}

ChannelGraph::ChannelGraph(Coins public_chain_cost) : xi_(public_chain_cost) {
  if (xi_ < Coins()) throw InvalidArgument("public chain cost must be non-negative");
}

NodeIndex ChannelGraph::add_node(const NodeId& id) {
  if (auto it = index_.find(id); it != index_.end()) return it->second;
  const NodeIndex idx = nodes_.size();
  nodes_.push_back(id);
  index_.emplace(id, idx);
  out_.emplace_back();
  in_.emplace_back();
  return idx;
}

void ChannelGraph::add_channel(const ChannelSpec& spec) {
  if (spec.a == spec.b) throw InvalidArgument("channel endpoints must differ: " + spec.a.value);
  if (spec.cap_ab < Coins() || spec.cap_ba < Coins()) {
    throw InvalidArgument("negative capacity on channel " + spec.a.value + "-" + spec.b.value);
  }
  if (spec.rate_ab < FeeRate() || spec.rate_ba < FeeRate() || spec.base_ab < Coins() || spec.base_ba < Coins()) {
    throw InvalidArgument("negative fee on channel " + spec.a.value + "-" + spec.b.value);
  }
  const NodeIndex a = add_node(spec.a);
  const NodeIndex b = add_node(spec.b);
  if (find_edge(a, b)) throw InvalidArgument("duplicate channel " + spec.a.value + "-" + spec.b.value);

  const EdgeIndex forward = edges_.size();
  edges_.push_back(DirectedEdge{a, b, spec.cap_ab, spec.rate_ab, spec.base_ab});
  edges_.push_back(DirectedEdge{b, a, spec.cap_ba, spec.rate_ba, spec.base_ba});
  pair_total_.push_back(spec.cap_ab + spec.cap_ba);
  out_[a].push_back(forward);
  in_[b].push_back(forward);
  out_[b].push_back(forward + 1);
  in_[a].push_back(forward + 1);
}

std::optional<NodeIndex> ChannelGraph::find_node(const NodeId& id) const {
  if (auto it = index_.find(id); it != index_.end()) return it->second;
  return std::nullopt;
}

NodeIndex ChannelGraph::index_of(const NodeId& id) const {
  if (auto idx = find_node(id)) return *idx;
  throw UnknownNode("unknown node: " + id.value);
}

std::optional<EdgeIndex> ChannelGraph::find_edge(NodeIndex tail, NodeIndex head) const {
  for (EdgeIndex e : out_.at(tail)) {
    if (edges_[e].head == head) return e;
  }
  return std::nullopt;
}

std::optional<EdgeIndex> ChannelGraph::find_edge(const NodeId& tail, const NodeId& head) const {
  const auto t = find_node(tail);
  const auto h = find_node(head);
  if (!t || !h) return std::nullopt;
  return find_edge(*t, *h);
}

Coins ChannelGraph::capacity(const NodeId& tail, const NodeId& head) const {
  if (auto e = find_edge(index_of(tail), index_of(head))) return edges_[*e].capacity;
  throw UnknownNode("no edge " + tail.value + "->" + head.value);
}

Coins ChannelGraph::pair_total(const NodeId& a, const NodeId& b) const {
  if (auto e = find_edge(index_of(a), index_of(b))) return pair_total(*e);
  throw UnknownNode("no channel " + a.value + "-" + b.value);
}

void ChannelGraph::apply_transfer(EdgeIndex e, Coins amount) {
  DirectedEdge& fwd = edges_.at(e);
  if (amount < Coins()) throw InvalidArgument("negative transfer amount");
  if (amount > fwd.capacity) {
    throw InsufficientCapacity("transfer of " + amount.to_string() + " exceeds capacity " +
                               fwd.capacity.to_string() + " on " + nodes_[fwd.tail].value + "->" +
                               nodes_[fwd.head].value);
  }
  fwd.capacity -= amount;
  edges_[reverse(e)].capacity += amount;
}

void ChannelGraph::apply_transfer(const NodeId& tail, const NodeId& head, Coins amount) {
  if (auto e = find_edge(index_of(tail), index_of(head))) {
    apply_transfer(*e, amount);
    return;
  }
  throw UnknownNode("no edge " + tail.value + "->" + head.value);
}

bool ChannelGraph::conserves_capacity() const {
  for (std::size_t k = 0; k < pair_total_.size(); ++k) {
    const Coins fwd = edges_[2 * k].capacity;
    const Coins rev = edges_[2 * k + 1].capacity;
    if (fwd < Coins() || rev < Coins() || fwd + rev != pair_total_[k]) return false;
  }
  return true;
}

std::vector<ChannelSpec> ChannelGraph::channels() const {
  std::vector<ChannelSpec> out;
  out.reserve(pair_total_.size());
  for (std::size_t k = 0; k < pair_total_.size(); ++k) {
    const DirectedEdge& f = edges_[2 * k];
    const DirectedEdge& r = edges_[2 * k + 1];
    out.push_back(ChannelSpec{nodes_[f.tail], nodes_[f.head], f.capacity, r.capacity, f.rate, r.rate,
                              f.base_fee, r.base_fee});
  }
  return out;
}

double density(const ChannelGraph& graph) {
  const auto j = static_cast<double>(graph.node_count());
  if (graph.node_count() < 2) throw DegenerateGraph("density needs at least two nodes");
  return static_cast<double>(graph.channel_count()) / (0.5 * j * (j - 1.0));
}

}  // namespace pcn
