#include "pcn/shapley.hpp"

#include <bit>
#include <cmath>

#include "pcn/errors.hpp"

namespace pcn {
namespace {

__int128 abs128(__int128 x) { return x < 0 ? -x : x; }

__int128 gcd128(__int128 a, __int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t factorial(std::size_t n) {
  std::int64_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<std::int64_t>(k);
  return f;
}

}  // namespace

ExactCoins::ExactCoins(__int128 numerator_nano, std::int64_t denominator)
    : numerator_(numerator_nano), denominator_(denominator) {
  if (denominator_ == 0) throw InvalidArgument("zero denominator");
  if (denominator_ < 0) {
    numerator_ = -numerator_;
    denominator_ = -denominator_;
  }
}

Coins ExactCoins::rounded() const {
  const __int128 half = denominator_ / 2;
  const __int128 q = numerator_ >= 0 ? (numerator_ + half) / denominator_ : -((-numerator_ + half) / denominator_);
  return Coins::from_nano(static_cast<std::int64_t>(q));
}

double ExactCoins::to_double() const {
  return static_cast<double>(numerator_) / static_cast<double>(denominator_) / static_cast<double>(Coins::kScale);
}

bool operator==(const ExactCoins& a, const ExactCoins& b) {
  return a.numerator_ * b.denominator_ == b.numerator_ * a.denominator_;
}

bool operator<(const ExactCoins& a, const ExactCoins& b) {
  return a.numerator_ * b.denominator_ < b.numerator_ * a.denominator_;
}

ExactCoins operator+(const ExactCoins& a, const ExactCoins& b) {
  if (a.denominator_ == b.denominator_) return ExactCoins(a.numerator_ + b.numerator_, a.denominator_);
  const __int128 g = gcd128(a.denominator_, b.denominator_);
  const __int128 den = a.denominator_ / g * b.denominator_;
  const __int128 num = a.numerator_ * (b.denominator_ / g) + b.numerator_ * (a.denominator_ / g);
  const __int128 r = gcd128(num, den);
  return ExactCoins(num / (r == 0 ? 1 : r), static_cast<std::int64_t>(den / (r == 0 ? 1 : r)));
}

ExactCoins operator-(const ExactCoins& a, const ExactCoins& b) {
  return a + ExactCoins(-b.numerator_, b.denominator_);
}

WorthTable::WorthTable(std::vector<TxId> players) : players_(std::move(players)) {
  if (players_.size() > 20) throw CoalitionTooLarge("worth table limited to 20 players");
  values_.assign(std::size_t{1} << players_.size(), Coins());
}

void WorthTable::set(std::uint32_t mask, Coins value) {
  if (mask == 0 && value != Coins()) throw InvalidArgument("the empty coalition is worth 0");
  values_.at(mask) = value;
}

std::uint32_t WorthTable::mask_of(const std::vector<TxId>& subset) const {
  std::uint32_t mask = 0;
  for (TxId id : subset) {
    bool found = false;
    for (std::size_t k = 0; k < players_.size(); ++k) {
      if (players_[k] == id) {
        mask |= 1U << k;
        found = true;
      }
    }
    if (!found) throw InvalidArgument("transaction " + std::to_string(id) + " is not a player");
  }
  return mask;
}

bool WorthTable::superadditive() const {
  const std::uint32_t full = grand_mask();
  for (std::uint32_t s = 1; s <= full; ++s) {
    const std::uint32_t rest = full & ~s;
    for (std::uint32_t t = rest; t != 0; t = (t - 1) & rest) {
      if (values_[s | t] < values_[s] + values_[t]) return false;
    }
  }
  return true;
}

WorthTable operator+(const WorthTable& a, const WorthTable& b) {
  if (a.players_ != b.players_) throw InvalidArgument("worth tables over different players");
  WorthTable sum(a.players_);
  for (std::size_t m = 0; m < a.values_.size(); ++m) sum.values_[m] = a.values_[m] + b.values_[m];
  return sum;
}

ExactCoins ShapleyAllocation::share_of(TxId id) const {
  for (std::size_t k = 0; k < players.size(); ++k) {
    if (players[k] == id) return shares[k];
  }
  throw InvalidArgument("transaction " + std::to_string(id) + " is not a player");
}

ExactCoins ShapleyAllocation::total() const {
  ExactCoins sum;
  for (const ExactCoins& s : shares) sum = sum + s;
  return sum;
}

std::map<TxId, Coins> ShapleyAllocation::rounded() const {
  std::map<TxId, Coins> out;
  for (std::size_t k = 0; k < players.size(); ++k) out[players[k]] = shares[k].rounded();
  return out;
}

ShapleyAllocation shapley_from_table(const WorthTable& table) {
  const std::size_t n = table.size();
  ShapleyAllocation out;
  out.players = table.players();
  out.grand_worth = table.at(table.grand_mask());
  if (n == 0) return out;

  std::vector<std::int64_t> weight(n);
  for (std::size_t t = 0; t < n; ++t) weight[t] = factorial(t) * factorial(n - t - 1);
  const std::int64_t denominator = factorial(n);

  const std::uint32_t full = table.grand_mask();
  out.shares.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bit = 1U << i;
    const std::uint32_t others = full & ~bit;
    __int128 numerator = 0;
    // Every subset of the other players, including the empty one.
    for (std::uint32_t t = others;; t = (t - 1) & others) {
      const auto size = static_cast<std::size_t>(std::popcount(t));
      const std::int64_t marginal = (table.at(t | bit) - table.at(t)).nano();
      numerator += static_cast<__int128>(weight[size]) * marginal;
      if (t == 0) break;
    }
    out.shares.emplace_back(numerator, denominator);
  }
  return out;
}

}  // namespace pcn
