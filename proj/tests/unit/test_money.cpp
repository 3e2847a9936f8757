#include <doctest.h>

#include "pcn/errors.hpp"
#include "pcn/money.hpp"

using pcn::Coins;
using pcn::FeeRate;

TEST_CASE("decimal literals parse exactly") {
  CHECK(Coins::parse("10").nano() == 10'000'000'000);
  CHECK(Coins::parse("0.32").nano() == 320'000'000);
  CHECK(Coins::parse("-1.5").nano() == -1'500'000'000);
  CHECK(Coins::parse("0.000000001").nano() == 1);
  CHECK(Coins::parse("+7.").nano() == 7'000'000'000);
  CHECK_THROWS_AS(Coins::parse(""), pcn::ParseError);
  CHECK_THROWS_AS(Coins::parse("1.2.3"), pcn::ParseError);
  CHECK_THROWS_AS(Coins::parse("0.0000000001"), pcn::ParseError);
  CHECK_THROWS_AS(Coins::parse("abc"), pcn::ParseError);
}

TEST_CASE("rendering trims trailing zeros") {
  CHECK(Coins::parse("10.08").to_string() == "10.08");
  CHECK(Coins::whole(5).to_string() == "5");
  CHECK(Coins::parse("-0.5").to_string() == "-0.5");
  CHECK(Coins().to_string() == "0");
  CHECK(FeeRate::parse("0.04").to_string() == "0.04");
}

TEST_CASE("decimal fee values are exact") {
  // 0.2 * 1.6 and 0.1 * 1 + 0.2 * 1.1: the decimals a binary double gets wrong.
  CHECK(FeeRate::parse("0.2") * Coins::parse("1.6") == Coins::parse("0.32"));
  CHECK(Coins::parse("0.1") + Coins::parse("0.2") == Coins::parse("0.3"));
  CHECK(FeeRate::parse("0.5") * Coins::whole(3) + Coins::whole(1) == Coins::parse("2.5"));
  CHECK(Coins::parse("5.04") + Coins::parse("4.64") + Coins::parse("0.4") == Coins::parse("10.08"));
}

TEST_CASE("multiplication rounds half away from zero") {
  CHECK(FeeRate::parse("0.5") * Coins::from_nano(3) == Coins::from_nano(2));
  CHECK(FeeRate::parse("0.5") * Coins::from_nano(-3) == Coins::from_nano(-2));
  CHECK(FeeRate::parse("0.5") * Coins::from_nano(2) == Coins::from_nano(1));
  CHECK(FeeRate() * Coins::whole(1000) == Coins());
}

TEST_CASE("from_double rounds to the nearest nano-coin") {
  CHECK(Coins::from_double(0.1).nano() == 100'000'000);
  CHECK(Coins::from_double(12.345678901).nano() == 12'345'678'901);
  CHECK(FeeRate::from_double(0.05).nano() == 50'000'000);
}
