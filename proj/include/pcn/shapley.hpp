#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pcn/graph.hpp"
#include "pcn/money.hpp"

namespace pcn {

/// An amount of nano-coins expressed as numerator / denominator. Shapley
/// shares have denominator n!, which keeps efficiency checks exact.
class ExactCoins {
 public:
  ExactCoins() = default;
  ExactCoins(__int128 numerator_nano, std::int64_t denominator);
  explicit ExactCoins(Coins whole) : numerator_(whole.nano()), denominator_(1) {}

  __int128 numerator() const { return numerator_; }
  std::int64_t denominator() const { return denominator_; }
  /// Nearest nano-coin.
  Coins rounded() const;
  double to_double() const;

  friend bool operator==(const ExactCoins& a, const ExactCoins& b);
  friend ExactCoins operator+(const ExactCoins& a, const ExactCoins& b);
  friend ExactCoins operator-(const ExactCoins& a, const ExactCoins& b);
  friend bool operator<(const ExactCoins& a, const ExactCoins& b);

 private:
  __int128 numerator_ = 0;
  std::int64_t denominator_ = 1;
};

/// Characteristic function over the subsets of a small player set. Subsets
/// are bitmasks over positions in players(); the empty set is worth 0.
class WorthTable {
 public:
  explicit WorthTable(std::vector<TxId> players);

  const std::vector<TxId>& players() const { return players_; }
  std::size_t size() const { return players_.size(); }
  std::uint32_t grand_mask() const { return (1U << players_.size()) - 1U; }

  Coins at(std::uint32_t mask) const { return values_.at(mask); }
  void set(std::uint32_t mask, Coins value);
  std::uint32_t mask_of(const std::vector<TxId>& subset) const;

  /// psi(S u T) >= psi(S) + psi(T) for all disjoint S, T.
  bool superadditive() const;

  friend WorthTable operator+(const WorthTable& a, const WorthTable& b);

 private:
  std::vector<TxId> players_;
  std::vector<Coins> values_;
};

struct ShapleyAllocation {
  std::vector<TxId> players;
  std::vector<ExactCoins> shares;
  Coins grand_worth;

  ExactCoins share_of(TxId id) const;
  ExactCoins total() const;
  std::map<TxId, Coins> rounded() const;
};

/// phi_i = sum over T in S\{i} of |T|!(n-|T|-1)!/n! * (psi(T u {i}) - psi(T)).
ShapleyAllocation shapley_from_table(const WorthTable& table);

}  // namespace pcn
