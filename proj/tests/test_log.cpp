#include <doctest.h>

#include <string>

#include "fixtures.hpp"
#include "procdrift/log.hpp"
#include "procdrift/log_io.hpp"
#include "procdrift/time.hpp"

using namespace procdrift;
using procdrift::testing::letters_log;

namespace {

const char* kTwoTraces = R"(<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0">
  <trace>
    <string key="concept:name" value="t1"/>
    <event><string key="concept:name" value="register"/><date key="time:timestamp" value="2021-03-01T10:00:00.000+01:00"/></event>
    <event><string key="concept:name" value="check"/><date key="time:timestamp" value="2021-03-01T10:05:00.000+01:00"/><int key="cost" value="12"/></event>
    <event><string key="concept:name" value="decide"/><date key="time:timestamp" value="2021-03-01T10:20:00.000+01:00"/></event>
  </trace>
  <trace>
    <string key="concept:name" value="t2"/>
    <event><string key="concept:name" value="register"/><date key="time:timestamp" value="2021-03-01T09:00:00.000Z"/></event>
    <event><string key="concept:name" value="decide"/><date key="time:timestamp" value="2021-03-01T08:59:00.000Z"/></event>
    <event><string key="concept:name" value="archive"/><date key="time:timestamp" value="2021-03-01T09:30:00.000Z"/></event>
  </trace>
</log>
)";

}  // namespace

TEST_CASE("timestamps") {
  auto ts = parse_iso8601("2021-03-01T10:00:00.250+01:00");
  REQUIRE(ts);
  CHECK(format_iso8601(*ts) == "2021-03-01T09:00:00.250Z");
  CHECK(format_iso8601(*parse_iso8601("2021-03-01 07:08")) == "2021-03-01T07:08:00.000Z");
  CHECK_FALSE(parse_iso8601("2021-13-01"));
  CHECK_FALSE(parse_iso8601("yesterday"));
  auto custom = parse_timestamp("03/01/2021 10:11:12", "%m/%d/%Y %H:%M:%S");
  REQUIRE(custom);
  CHECK(format_iso8601(*custom) == "2021-03-01T10:11:12.000Z");
}

TEST_CASE("xes with two traces") {
  auto log = parse_xes(kTwoTraces);
  CHECK(log.size() == 2);
  CHECK(log.event_count() == 6);
  CHECK(log.alphabet() == std::vector<std::string>{"archive", "check", "decide", "register"});
  CHECK(log.trace(0).events[1].attrs.at("cost") == "12");
  // events are sorted by time inside a trace
  CHECK(log.trace(1).events[0].activity == "decide");
  // t2 starts before t1
  CHECK(log.start_order() == std::vector<std::size_t>{1, 0});
  CHECK(log.activity_id("decide") == ActivityId{2});
  CHECK_FALSE(log.activity_id("nope"));
}

TEST_CASE("xes errors") {
  std::string missing_ts = R"(<log><trace><string key="concept:name" value="broken"/>
    <event><string key="concept:name" value="a"/></event></trace></log>)";
  try {
    parse_xes(missing_ts);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("broken") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_xes("<log><trace>"), ParseError);
  CHECK_THROWS_AS(parse_xes("<other/>"), ParseError);
  CHECK_THROWS_AS(parse_xes("<log><trace><string key=\"concept:name\" value=\"e\"/></trace></log>"),
                  ParseError);
}

TEST_CASE("xes round trip") {
  auto log = parse_xes(kTwoTraces);
  auto again = parse_xes(write_xes(log));
  CHECK(log_to_json(again) == log_to_json(log));
  auto from_json = log_from_json(log_to_json(log));
  CHECK(log_to_json(from_json) == log_to_json(log));
}

TEST_CASE("csv") {
  std::string csv =
      "case_id,activity,timestamp,who\n"
      "1,a,2020-01-01T00:00:00Z,ann\n"
      "2,a,2020-01-01T01:00:00Z,bob\n"
      "1,\"b, quoted\",2020-01-01T00:10:00Z,ann\n"
      "2,c,2020-01-01T01:05:00Z,bob\n";
  auto log = parse_csv(csv);
  CHECK(log.size() == 2);
  CHECK(log.trace(0).events[1].activity == "b, quoted");
  CHECK(log.trace(1).events[0].attrs.at("who") == "bob");
  CHECK(detect_format(csv) == LogFormat::csv);
  CHECK(log_to_json(parse_log(csv)) == log_to_json(log));
}

TEST_CASE("csv keeps file order on equal timestamps") {
  std::string csv =
      "case,act,time\n"
      "x,first,2020-01-01T00:00:00Z\n"
      "x,second,2020-01-01T00:00:00Z\n"
      "x,third,2020-01-01T00:00:00Z\n";
  auto log = parse_csv(csv, {"case", "act", "time", "iso8601"});
  REQUIRE(log.size() == 1);
  CHECK(log.trace(0).events[0].activity == "first");
  CHECK(log.trace(0).events[1].activity == "second");
  CHECK(log.trace(0).events[2].activity == "third");
}

TEST_CASE("csv errors") {
  std::string csv = "case_id,activity,timestamp\n1,a,2020-01-01T00:00:00Z\n";
  try {
    parse_csv(csv, {"case_id", "activity", "tmestamp", "iso8601"});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("tmestamp") != std::string::npos);
    CHECK(msg.find("case_id, activity, timestamp") != std::string::npos);
  }
  try {
    parse_csv("case_id,activity,timestamp\n1,a,2020-01-01\n1,b,never\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_csv("case_id,activity,timestamp\n1,a\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("case_id,activity,timestamp\n1,\"a,2020-01-01\n"), ParseError);
  CHECK_THROWS_AS(parse_csv(""), ParseError);
}

TEST_CASE("json errors") {
  CHECK_THROWS_AS(parse_log("{\"traces\": 3}"), ParseError);
  CHECK_THROWS_AS(parse_log("{not json"), ParseError);
}

TEST_CASE("default windows") {
  auto big = letters_log({{"ab", 1050}});
  CHECK(default_window_config(big) == WindowConfig{34, 17});
  auto small = letters_log({{"ab", 61}});
  CHECK(default_window_config(small) == WindowConfig{12, 6});
  CHECK(default_window_config(letters_log({{"a", 5}})) == WindowConfig{2, 1});
  CHECK_THROWS_AS(default_window_config(letters_log({{"a", 1}})), LogError);
}

TEST_CASE("window count") {
  CHECK(window_count(1050, {50, 25}) == 39);
  CHECK(window_count(100, {50, 50}) == 2);
  CHECK(window_count(10, {10, 10}) == 1);
  CHECK(window_count(1050, {34, 17}) == 58);
}

TEST_CASE("tumbling windows cover the log") {
  auto log = letters_log({{"a", 100}});
  auto w = make_windows(log, {50, 50});
  REQUIRE(w.size() == 2);
  CHECK(w[0].first == 0);
  CHECK(w[0].last == 50);
  CHECK(w[1].first == 50);
  CHECK(w[1].last == 100);
  CHECK(w[1].span_begin == log.trace(50).start());
  CHECK(w[1].span_end == log.trace(99).start());

  auto one = make_windows(letters_log({{"a", 10}}), {10, 10});
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 10);
}

TEST_CASE("window validation") {
  CHECK_THROWS_AS(validate({50, 60}, 1000), LogError);
  CHECK_THROWS_AS(validate({0, 1}, 1000), LogError);
  CHECK_THROWS_AS(validate({2000, 10}, 1000), LogError);
  CHECK_NOTHROW(validate({50, 25}, 1050));
}

TEST_CASE("sliding windows are full and evenly spaced") {
  auto log = letters_log({{"ab", 1050}});
  auto w = make_windows(log, {50, 25});
  REQUIRE(w.size() == 39);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(w[i].index == i);
    CHECK(w[i].first == 25 * i);
    CHECK(w[i].size() == 50);
    CHECK(w[i].last <= 1050);
  }
}
