#include <doctest.h>

#include <set>

#include "sage/types.hpp"

using namespace sage;

TEST_SUITE("types") {

TEST_CASE("stage table has 5 Low, 10 Med and 6 High stages") {
  std::size_t low = 0, med = 0, high = 0;
  for (auto s : all_stages()) {
    switch (severity(s)) {
      case Severity::Low: ++low; break;
      case Severity::Med: ++med; break;
      case Severity::High: ++high; break;
    }
  }
  CHECK(low == 5);
  CHECK(med == 10);
  CHECK(high == 6);
  CHECK(severity(AttackStage::SURFING) == Severity::Low);
  CHECK(severity(AttackStage::INFO_DISC) == Severity::Low);
  CHECK(severity(AttackStage::USER_PRIV_ESC) == Severity::Med);
  CHECK(severity(AttackStage::PRIV_ESC) == Severity::Med);
  CHECK(severity(AttackStage::NETWORK_DOS) == Severity::High);
  CHECK(severity(AttackStage::DATA_DESTRUCTION) == Severity::High);
}

TEST_CASE("acronyms round-trip and are unique") {
  std::set<std::string_view> seen;
  for (auto s : all_stages()) {
    CHECK(seen.insert(acronym(s)).second);
    CHECK(parse_stage(acronym(s)) == s);
  }
  CHECK(acronym(AttackStage::DATA_EXFILTRATION) == "DATA_EXFILTRATION");
  CHECK_FALSE(parse_stage("EXFIL").has_value());
  CHECK_FALSE(parse_stage("").has_value());
}

TEST_CASE("symbol text form") {
  const Symbol s{AttackStage::VULN_DISC, "http"};
  CHECK(to_string(s) == "VULN_DISC|http");
  CHECK(parse_symbol("VULN_DISC|http") == s);
  CHECK_FALSE(parse_symbol("VULN_DISC|").has_value());
  CHECK_FALSE(parse_symbol("VULN_DISC").has_value());
  CHECK_FALSE(parse_symbol("NOPE|http").has_value());
}

TEST_CASE("timestamps") {
  SUBCASE("EVE offset form") {
    auto t = parse_timestamp("2018-11-03T10:00:05.250000+0000");
    REQUIRE(t);
    CHECK(format_timestamp(*t) == "2018-11-03T10:00:05.250000Z");
  }
  SUBCASE("offsets shift to UTC") {
    auto a = parse_timestamp("2018-11-03T12:00:00+02:00");
    auto b = parse_timestamp("2018-11-03T10:00:00Z");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(*a == *b);
    CHECK(parse_timestamp("2018-11-03T05:30:00-0430") == parse_timestamp("2018-11-03T10:00:00Z"));
  }
  SUBCASE("space separator and no zone") {
    CHECK(parse_timestamp("2018-11-03 10:00:00") == parse_timestamp("2018-11-03T10:00:00Z"));
  }
  SUBCASE("malformed") {
    CHECK_FALSE(parse_timestamp("").has_value());
    CHECK_FALSE(parse_timestamp("2018-13-03T10:00:00Z").has_value());
    CHECK_FALSE(parse_timestamp("2018-11-03T25:00:00Z").has_value());
    CHECK_FALSE(parse_timestamp("yesterday").has_value());
  }
  CHECK(to_seconds(from_seconds(1.5)) == doctest::Approx(1.5));
  CHECK(from_seconds(0.0000004).count() == 0);
}

}  // TEST_SUITE
