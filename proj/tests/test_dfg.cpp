#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "procdrift/dfg.hpp"

using namespace procdrift;
using procdrift::testing::letters_log;

TEST_CASE("direct counts") {
  auto dfg = mine_dfg(letters_log({{"ab", 2}, {"ac", 1}}));
  CHECK(dfg.arcs.size() == 2);
  CHECK(dfg.arcs.at({"a", "b"}) == 2);
  CHECK(dfg.arcs.at({"a", "c"}) == 1);
  CHECK(dfg.starts == std::map<std::string, std::uint64_t>{{"a", 3}});
  CHECK(dfg.ends == std::map<std::string, std::uint64_t>{{"b", 2}, {"c", 1}});
  CHECK(dfg.nodes.at("a") == 3);
}

TEST_CASE("single-event traces") {
  auto dfg = mine_dfg(letters_log({{"a", 2}, {"b", 1}}));
  CHECK(dfg.arcs.empty());
  CHECK(dfg.starts == dfg.ends);
}

TEST_CASE("self loops and repeats") {
  auto dfg = mine_dfg(letters_log({{"aab", 1}, {"aba", 1}}));
  CHECK(dfg.arcs.at({"a", "a"}) == 1);
  CHECK(dfg.arcs.at({"a", "b"}) == 2);
  CHECK(dfg.arcs.at({"b", "a"}) == 1);
  CHECK(dfg.nodes.at("a") == 4);
}

TEST_CASE("arc totals match event totals") {
  std::mt19937 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::pair<std::string, int>> variants;
    for (int t = 0; t < 15; ++t) {
      std::string w;
      for (int e = 0, len = 1 + int(rng() % 9); e < len; ++e) w += char('a' + rng() % 5);
      variants.push_back({w, 1});
    }
    auto log = letters_log(variants);
    auto dfg = mine_dfg(log);
    std::uint64_t arcs = 0, nodes = 0, starts = 0, ends = 0;
    for (auto& [k, n] : dfg.arcs) arcs += n;
    for (auto& [k, n] : dfg.nodes) nodes += n;
    for (auto& [k, n] : dfg.starts) starts += n;
    for (auto& [k, n] : dfg.ends) ends += n;
    CHECK(nodes == log.event_count());
    CHECK(arcs == log.event_count() - log.size());
    CHECK(starts == log.size());
    CHECK(ends == log.size());
  }
}

TEST_CASE("filtering") {
  auto dfg = mine_dfg(letters_log({{"ab", 2}, {"ac", 1}}));
  auto same = filter_dfg(dfg, 0);
  CHECK(same.arcs == dfg.arcs);
  CHECK(same.nodes == dfg.nodes);
  CHECK(filter_dfg(dfg, 100).arcs.empty());
  auto two = filter_dfg(dfg, 2);
  CHECK(two.arcs.size() == 1);
  CHECK(two.arcs.count({"a", "b"}) == 1);
  // c still ends a trace, so the node stays
  CHECK(two.nodes.count("c") == 1);
}

TEST_CASE("exports") {
  auto dfg = mine_dfg(letters_log({{"ab", 2}}));
  auto j = dfg_to_json(dfg);
  CHECK(j["arcs"][0]["from"] == "a");
  CHECK(j["arcs"][0]["count"] == 2);
  auto dot = dfg_to_dot(dfg);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("\"a\" -> \"b\"") != std::string::npos);
  CHECK(dot_quote("say \"hi\"") == "\"say \\\"hi\\\"\"");
}
