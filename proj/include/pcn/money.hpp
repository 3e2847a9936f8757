#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace pcn {

/// Fixed-point coin amount stored as an integer count of nano-coins.
///
/// Additions and subtractions are exact, so channel capacity bookkeeping never
/// drifts. Multiplication by a FeeRate rounds half away from zero at the
/// nano-coin boundary.
class Coins {
 public:
  static constexpr std::int64_t kScale = 1'000'000'000;

  constexpr Coins() = default;

  static constexpr Coins from_nano(std::int64_t nano) { return Coins(nano); }
  static constexpr Coins whole(std::int64_t coins) { return Coins(coins * kScale); }
  /// Rounds to the nearest nano-coin.
  static Coins from_double(double coins);
  /// Parses a plain decimal literal ("10", "0.32", "-1.5"). Throws ParseError.
  static Coins parse(std::string_view text);

  constexpr std::int64_t nano() const { return nano_; }
  double to_double() const { return static_cast<double>(nano_) / kScale; }
  /// Shortest decimal rendering without trailing zeros.
  std::string to_string() const;

  constexpr auto operator<=>(const Coins&) const = default;

  constexpr Coins operator-() const { return Coins(-nano_); }
  constexpr Coins& operator+=(Coins o) {
    nano_ += o.nano_;
    return *this;
  }
  constexpr Coins& operator-=(Coins o) {
    nano_ -= o.nano_;
    return *this;
  }
  friend constexpr Coins operator+(Coins a, Coins b) { return a += b; }
  friend constexpr Coins operator-(Coins a, Coins b) { return a -= b; }

 private:
  constexpr explicit Coins(std::int64_t nano) : nano_(nano) {}
  std::int64_t nano_ = 0;
};

/// Proportional fee rate (a dimensionless fraction) in units of 1e-9.
class FeeRate {
 public:
  static constexpr std::int64_t kScale = 1'000'000'000;

  constexpr FeeRate() = default;

  static constexpr FeeRate from_nano(std::int64_t nano) { return FeeRate(nano); }
  static FeeRate from_double(double fraction);
  static FeeRate parse(std::string_view text);

  constexpr std::int64_t nano() const { return nano_; }
  double to_double() const { return static_cast<double>(nano_) / kScale; }
  std::string to_string() const;

  constexpr auto operator<=>(const FeeRate&) const = default;

 private:
  constexpr explicit FeeRate(std::int64_t nano) : nano_(nano) {}
  std::int64_t nano_ = 0;
};

/// rate * amount, rounded half away from zero to the nearest nano-coin.
Coins operator*(FeeRate rate, Coins amount);
inline Coins operator*(Coins amount, FeeRate rate) { return rate * amount; }

}  // namespace pcn
