#include <doctest.h>

#include <set>
#include <stdexcept>

#include "procdrift/log_io.hpp"
#include "procdrift/synthetic.hpp"

using namespace procdrift;

namespace {

bool same_trace(const Trace& a, const Trace& b) {
  if (a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i)
    if (a.events[i].activity != b.events[i].activity) return false;
  return true;
}

bool touches(const Trace& t, const std::pair<std::string, std::string>& pair) {
  for (const auto& e : t.events)
    if (e.activity == pair.first || e.activity == pair.second) return true;
  return false;
}

}  // namespace

TEST_CASE("generator") {
  GeneratorConfig g;
  auto a = generate_log(g);
  auto b = generate_log(g);
  CHECK(log_to_json(a) == log_to_json(b));
  CHECK(a.size() == 1000);
  CHECK(a.alphabet().size() >= 2);
  CHECK(a.alphabet().size() <= 10);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.start_order()[i] == i);
  g.seed = 2;
  CHECK(log_to_json(generate_log(g)) != log_to_json(a));

  g.loop = true;
  g.traces = 300;
  auto looped = generate_log(g);
  bool repeats = false;
  for (const auto& t : looped.traces()) {
    std::set<std::string> seen;
    for (const auto& e : t.events) repeats |= !seen.insert(e.activity).second;
  }
  CHECK(repeats);
  CHECK_THROWS_AS(generate_log({10, 1, false, 1}), std::invalid_argument);
}

TEST_CASE("sudden drift at the midpoint") {
  auto base = generate_log({});
  const double at[] = {0.5};
  auto d = inject_drift(base, DriftKind::sudden, at);
  CHECK(d.change_traces == std::vector<std::size_t>{500});
  REQUIRE(d.swapped.size() == 1);
  int changed_before = 0, changed_after = 0, touching_after = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const bool same = same_trace(base.trace(i), d.log.trace(i));
    if (i < 500) changed_before += !same;
    else {
      changed_after += !same;
      touching_after += touches(base.trace(i), d.swapped[0]);
    }
  }
  CHECK(changed_before == 0);
  CHECK(changed_after == touching_after);
  CHECK(changed_after > 0);
  auto j = ground_truth_json(d);
  CHECK(j["change_traces"] == std::vector<int>{500});
  CHECK(j["kind"] == "sudden");
  CHECK(j["traces"] == 1000);
}

TEST_CASE("fractions are rounded, sorted and deduplicated") {
  auto base = generate_log({});
  const double at[] = {0.7, 0.29, 0.7};
  auto d = inject_drift(base, DriftKind::sudden, at);
  CHECK(d.change_traces == std::vector<std::size_t>{290, 700});
  CHECK(d.fractions == std::vector<double>{0.29, 0.7});
  CHECK(d.swapped.size() == 2);
}

TEST_CASE("reoccurring toggles one swap") {
  auto base = generate_log({});
  const double at[] = {0.25, 0.5, 0.75};
  auto d = inject_drift(base, DriftKind::reoccurring, at);
  CHECK(d.change_traces == std::vector<std::size_t>{250, 500, 750});
  REQUIRE(d.swapped.size() == 1);
  for (std::size_t i = 0; i < base.size(); ++i) {
    const bool swapped_regime = (i >= 250 && i < 500) || i >= 750;
    if (!swapped_regime) CHECK(same_trace(base.trace(i), d.log.trace(i)));
    else if (touches(base.trace(i), d.swapped[0])) CHECK_FALSE(same_trace(base.trace(i), d.log.trace(i)));
  }
}

TEST_CASE("incremental stages") {
  auto base = generate_log({});
  const double at[] = {0.4};
  auto d = inject_drift(base, DriftKind::incremental, at);
  CHECK(d.change_traces == std::vector<std::size_t>{400, 440, 480});
  CHECK(d.swapped.size() == 3);
}

TEST_CASE("gradual ramp") {
  auto base = generate_log({});
  const double at[] = {0.5};
  auto d = inject_drift(base, DriftKind::gradual, at, 3);
  int early = 0, late = 0, early_n = 0, late_n = 0;
  for (std::size_t i = 500; i < 1000; ++i) {
    if (!touches(base.trace(i), d.swapped[0])) continue;
    const bool changed = !same_trace(base.trace(i), d.log.trace(i));
    if (i < 600) early += changed, ++early_n;
    if (i >= 900) late += changed, ++late_n;
  }
  REQUIRE(early_n > 0);
  REQUIRE(late_n > 0);
  CHECK(double(early) / early_n < 0.35);
  CHECK(double(late) / late_n > 0.75);
}

TEST_CASE("bad fractions") {
  auto base = generate_log({});
  for (double bad : {0.0, 1.0, 1.5, -0.2}) {
    const double at[] = {bad};
    CHECK_THROWS_AS(inject_drift(base, DriftKind::sudden, at), std::invalid_argument);
  }
  CHECK_THROWS_AS(inject_drift(base, DriftKind::sudden, std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("drift kind names") {
  for (auto k : {DriftKind::sudden, DriftKind::gradual, DriftKind::incremental, DriftKind::reoccurring})
    CHECK(parse_drift_kind(to_string(k)) == k);
  CHECK_FALSE(parse_drift_kind("abrupt"));
}
