#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "doctest.h"
#include "emuc/model.hpp"
#include "emuc/trace.hpp"
#include "support.hpp"

using namespace emuc;

TEST_CASE("numeric types carry width and signedness") {
  CHECK(width_bits(NumericType::real64) == 64);
  CHECK(width_bits(NumericType::int32) == 32);
  CHECK(width_bits(NumericType::uint32) == 32);
  CHECK(width_bits(NumericType::bool8) == 8);
  CHECK(is_signed(NumericType::int32));
  CHECK_FALSE(is_signed(NumericType::uint32));
  CHECK_FALSE(is_signed(NumericType::bool8));
  for (auto t : {NumericType::real64, NumericType::int32, NumericType::uint32, NumericType::bool8}) {
    CHECK(parse_type_name(type_name(t)) == t);
  }
  CHECK_FALSE(parse_type_name("float").has_value());
}

TEST_CASE("values keep their type") {
  CHECK(Value::real(1.5).type() == NumericType::real64);
  CHECK(Value::int32(-3).type() == NumericType::int32);
  CHECK(Value::uint32(3).type() == NumericType::uint32);
  CHECK(Value::boolean(true).type() == NumericType::bool8);
  CHECK(Value::zero(NumericType::uint32) == Value::uint32(0));
  CHECK_FALSE(Value::int32(1) == Value::uint32(1));
  CHECK_FALSE(Value::real(0.0) == Value::real(-0.0));
  double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(Value::real(nan) == Value::real(nan));
}

TEST_CASE("exact conversion refuses narrowing") {
  CHECK(convert_exact(Value::int32(7), NumericType::real64) == Value::real(7.0));
  CHECK(convert_exact(Value::uint32(7), NumericType::int32) == Value::int32(7));
  CHECK_FALSE(convert_exact(Value::int32(-1), NumericType::uint32).has_value());
  CHECK_FALSE(convert_exact(Value::real(0.5), NumericType::int32).has_value());
  CHECK_FALSE(convert_exact(Value::uint32(4000000000u), NumericType::int32).has_value());
  CHECK_FALSE(convert_exact(Value::int32(1), NumericType::bool8).has_value());
  CHECK_FALSE(convert_exact(Value::real(16777217.0 * 16777216.0 * 16.0), NumericType::int32).has_value());
}

TEST_CASE("expression equality ignores the flexible marker") {
  auto a = Expr::binary(BinaryOp::lt, Expr::var("x"), Expr::literal(Value::int32(5), true));
  auto b = Expr::binary(BinaryOp::lt, Expr::var("x"), Expr::literal(Value::int32(5), false));
  auto c = Expr::binary(BinaryOp::le, Expr::var("x"), Expr::literal(Value::int32(5)));
  CHECK(equal(*a, *b));
  CHECK_FALSE(equal(*a, *c));
  auto e = Expr::binary(BinaryOp::add, Expr::var("y"), Expr::binary(BinaryOp::mul, Expr::var("x"), Expr::var("y")));
  CHECK(variables_read(*e) == std::vector<std::string>{"y", "x"});
  CHECK(Expr::truth()->is_true_literal());
}

TEST_CASE("trigger set and arc lookup") {
  auto d = test::load_corpus("minimed");
  CHECK(trigger_set(d) == std::vector<std::string>{"click_on_off", "click_UP", "click_DN"});
  CHECK(arcs_for(d, "on", "click_UP").size() == 2);
  CHECK(arcs_for(d, "off", "click_UP").empty());
  CHECK(arc_indices_for(d, "on", "click_on_off") == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(arcs_for(d, "standby", "click_UP"), DomainError);
  Diagram copy = d;
  CHECK(structurally_equal(d, copy));
  std::swap(copy.arcs[2], copy.arcs[3]);
  CHECK_FALSE(structurally_equal(d, copy));
}

TEST_CASE("C identifiers") {
  CHECK(is_c_identifier("click_UP"));
  CHECK(is_c_identifier("_x1"));
  CHECK_FALSE(is_c_identifier("1x"));
  CHECK_FALSE(is_c_identifier(""));
  CHECK_FALSE(is_c_identifier("a-b"));
}

TEST_CASE("real formatting examples") {
  CHECK(format_real(0.0) == "0.0");
  CHECK(format_real(-0.0) == "-0.0");
  CHECK(format_real(10.0) == "10.0");
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(0.1 + 0.2) == "0.30000000000000004");
  CHECK(format_real(1e20) == "1e+20");
  CHECK(format_real(1e-5) == "1e-05");
  CHECK(format_real(0.0001) == "0.0001");
  CHECK(format_real(123456789012345.0) == "123456789012345.0");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_real(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_value(Value::boolean(true)) == "1");
  CHECK(format_value(Value::uint32(4294967295u)) == "4294967295");
  CHECK(format_value(Value::int32(std::numeric_limits<std::int32_t>::min())) == "-2147483648");
}

// Oracle: the printed text reads back to the same bits, and in fixed
// notation one digit fewer would not.
TEST_CASE("real formatting round-trips and is shortest in fixed range") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 20000; ++i) {
    double v;
    if (i % 2 == 0) {
      std::uint64_t bits = rng();
      std::memcpy(&v, &bits, sizeof v);
    } else {
      v = static_cast<double>(static_cast<std::int64_t>(rng() % 2000001) - 1000000) / 1000.0;
    }
    if (std::isnan(v) || std::isinf(v)) continue;
    const std::string s = format_real(v);
    CAPTURE(s);
    double back = std::strtod(s.c_str(), nullptr);
    REQUIRE(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
    REQUIRE((s.find('.') != std::string::npos || s.find('e') != std::string::npos));
    const double mag = std::fabs(v);
    if (mag >= 1e-4 && mag < 1e15 && s.find('e') == std::string::npos) {
      auto dot = s.find('.');
      int decimals = static_cast<int>(s.size() - dot - 1);
      if (decimals > 1 || s.back() != '0') {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", decimals - 1, v);
        CHECK(std::strtod(buf, nullptr) != v);
      }
    }
  }
}

TEST_CASE("state line format") {
  auto d = test::load_corpus("flags");
  MachineState s{"locked", "locked", {{"armed", Value::boolean(true)},
                                      {"door_open", Value::boolean(false)},
                                      {"tries", Value::int32(-2)}}};
  CHECK(format_state(d, s) == "locked;locked;armed=1;door_open=0;tries=-2");
}
