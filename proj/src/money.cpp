#include "pcn/money.hpp"

#include <cmath>
#include <limits>

#include "pcn/errors.hpp"

namespace pcn {
namespace {

std::int64_t scaled_from_double(double value, std::int64_t scale) {
  if (!std::isfinite(value)) throw InvalidArgument("non-finite amount");
  const double scaled = std::round(value * static_cast<double>(scale));
  if (std::abs(scaled) > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2)) {
    throw InvalidArgument("amount out of range");
  }
  return static_cast<std::int64_t>(scaled);
}

// Exact decimal parse into units of 1e-9.
std::int64_t parse_scaled(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool any_digit = false;
  for (; pos < text.size() && text[pos] != '.'; ++pos) {
    const char c = text[pos];
    if (c < '0' || c > '9') throw ParseError("bad decimal: " + std::string(text));
    if (whole > std::numeric_limits<std::int64_t>::max() / 10 / Coins::kScale) {
      throw ParseError("decimal out of range: " + std::string(text));
    }
    whole = whole * 10 + (c - '0');
    any_digit = true;
  }
  if (pos < text.size()) {
    ++pos;
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (c < '0' || c > '9') throw ParseError("bad decimal: " + std::string(text));
      if (frac_digits == 9) throw ParseError("more than 9 fractional digits: " + std::string(text));
      frac = frac * 10 + (c - '0');
      ++frac_digits;
      any_digit = true;
    }
  }
  if (!any_digit) throw ParseError("bad decimal: " + std::string(text));
  for (int i = frac_digits; i < 9; ++i) frac *= 10;
  const std::int64_t value = whole * Coins::kScale + frac;
  return negative ? -value : value;
}

std::string render_scaled(std::int64_t nano) {
  const bool negative = nano < 0;
  // Magnitude fits: values are kept well below int64 max.
  const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-nano) : static_cast<std::uint64_t>(nano);
  std::string out = negative ? "-" : "";
  out += std::to_string(mag / Coins::kScale);
  std::uint64_t frac = mag % Coins::kScale;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 9 - digits.size(), '0');
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

}  // namespace

Coins Coins::from_double(double coins) { return Coins(scaled_from_double(coins, kScale)); }
Coins Coins::parse(std::string_view text) { return Coins(parse_scaled(text)); }
std::string Coins::to_string() const { return render_scaled(nano_); }

FeeRate FeeRate::from_double(double fraction) { return FeeRate(scaled_from_double(fraction, kScale)); }
FeeRate FeeRate::parse(std::string_view text) { return FeeRate(parse_scaled(text)); }
std::string FeeRate::to_string() const { return render_scaled(nano_); }

Coins operator*(FeeRate rate, Coins amount) {
  const __int128 product = static_cast<__int128>(rate.nano()) * amount.nano();
  const __int128 half = FeeRate::kScale / 2;
  const __int128 rounded =
      product >= 0 ? (product + half) / FeeRate::kScale : -((-product + half) / FeeRate::kScale);
  return Coins::from_nano(static_cast<std::int64_t>(rounded));
}

}  // namespace pcn
