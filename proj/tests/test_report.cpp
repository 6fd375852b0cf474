#include <doctest.h>

#include <atomic>
#include <cmath>

#include "drift_eval.hpp"
#include "fixtures.hpp"
#include "procdrift/report.hpp"
#include "procdrift/synthetic.hpp"

using namespace procdrift;
using procdrift::testing::letters_log;

namespace {

BehaviorCluster cluster_with(std::vector<double> mean, int members = 10) {
  BehaviorCluster c;
  c.mean_series = Eigen::Map<SeriesVector<double>>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  for (int i = 0; i < members; ++i) c.members.push_back(i);
  return c;
}

std::vector<AcfLag> acf_of(std::vector<double> r, double band) {
  std::vector<AcfLag> out;
  for (std::size_t k = 0; k < r.size(); ++k) out.push_back({int(k), r[k], std::abs(r[k]) > band});
  return out;
}

EventLog sudden_log(std::uint64_t seed, double at) {
  GeneratorConfig g;
  g.seed = seed;
  const double fractions[] = {at};
  return inject_drift(generate_log(g), DriftKind::sudden, fractions, seed).log;
}

}  // namespace

TEST_CASE("classification table") {
  ClassifyParams p;

  auto flat = cluster_with(std::vector<double>(20, 0.5));
  flat.adf = AdfResult{0, 0, 0, 20, true};
  CHECK(classify_cluster(flat, p) == std::vector<DriftTag>{DriftTag::stable});

  auto stepped = flat;
  stepped.change_points = {12, 30};
  CHECK(classify_cluster(stepped, p) == std::vector<DriftTag>{DriftTag::sudden});

  std::vector<double> down(30);
  for (int i = 0; i < 30; ++i) down[i] = 0.9 - 0.02 * i;
  auto trend = cluster_with(down);
  trend.adf = AdfResult{-0.5, 0.98045, 0, 29, false};
  CHECK(classify_cluster(trend, p) == std::vector<DriftTag>{DriftTag::incremental});

  std::vector<double> jagged(30);
  for (int i = 0; i < 30; ++i) jagged[i] = 0.5 + (i % 2 ? 0.2 : -0.2) + 0.001 * i;
  auto rough = cluster_with(jagged);
  rough.adf = AdfResult{-1.0, 0.6, 0, 29, false};
  CHECK(classify_cluster(rough, p) == std::vector<DriftTag>{DriftTag::gradual});

  auto seasonal = flat;
  seasonal.acf = acf_of({1, 0.5, 0.1, -0.2, -0.1, 0.2, 0.45, 0.4, 0.1}, 0.3);
  CHECK(classify_cluster(seasonal, p) == std::vector<DriftTag>{DriftTag::reoccurring});
  // a decaying positive ACF alone is not a season
  auto decaying = flat;
  decaying.acf = acf_of({1, 0.9, 0.8, 0.7, 0.6}, 0.3);
  CHECK(classify_cluster(decaying, p) == std::vector<DriftTag>{DriftTag::stable});
  // peaks inside the window overlap are ignored
  ClassifyParams overlap = p;
  overlap.season_min_lag = 7;
  CHECK(classify_cluster(seasonal, overlap) == std::vector<DriftTag>{DriftTag::stable});

  std::vector<double> spike(30, 0.5);
  for (int i = 0; i < 30; ++i) spike[i] += 0.001 * (i % 3);
  spike[17] = 0.0;
  auto lone = cluster_with(spike, 2);
  CHECK(classify_cluster(lone, p) == std::vector<DriftTag>{DriftTag::outlier});
  auto crowd = cluster_with(spike, 20);
  CHECK(classify_cluster(crowd, p) == std::vector<DriftTag>{DriftTag::stable});

  auto both = trend;
  both.change_points = {10};
  CHECK(classify_cluster(both, p) == std::vector<DriftTag>{DriftTag::sudden, DriftTag::incremental});
}

TEST_CASE("extended dfg colours") {
  auto log = letters_log({{"tc", 3}});
  Dfg dfg = mine_dfg(log);
  auto alphabet = log.alphabet();
  const auto t = *log.activity_id("t"), c = *log.activity_id("c");
  std::vector<ReportedConstraint> chain{{0, {TemplateKind::ChainPrecedence, t, c}, 1, 1, 1}};
  auto e = build_edfg(dfg, chain, alphabet);
  REQUIRE(e.constraint_arcs.size() == 1);
  CHECK(e.constraint_arcs[0].color == "green");
  CHECK(e.constraint_arcs[0].from == "t");
  CHECK(e.constraint_arcs[0].to == "c");

  std::vector<ReportedConstraint> neg{{0, {TemplateKind::NotSuccession, c, t}, 1, 1, 1}};
  CHECK(build_edfg(dfg, neg, alphabet).constraint_arcs.at(0).color == "red");
  std::vector<ReportedConstraint> ev{{0, {TemplateKind::Response, t, c}, 1, 1, 1}};
  CHECK(build_edfg(dfg, ev, alphabet).constraint_arcs.at(0).color == "blue");

  auto empty = build_edfg(dfg, {}, alphabet);
  CHECK(empty.constraint_arcs.empty());
  CHECK(empty.base.arcs == dfg.arcs);
  CHECK(empty.base.nodes == dfg.nodes);
}

TEST_CASE("too small a log fails in step 2") {
  auto log = letters_log({{"ab", 1}});
  try {
    analyze(log, {});
    FAIL("expected AnalysisError");
  } catch (const AnalysisError& e) {
    CHECK(e.step() == 2);
    CHECK(std::string(e.what()).rfind("step 2", 0) == 0);
  }
  AnalysisParams big;
  big.window = WindowConfig{50, 10};
  try {
    analyze(letters_log({{"ab", 20}}), big);
    FAIL("expected AnalysisError");
  } catch (const AnalysisError& e) {
    CHECK(e.step() == 2);
  }
}

TEST_CASE("one injected sudden drift is found once") {
  auto log = sudden_log(1, 0.5);
  auto report = analyze(log, {});
  const auto& w = *report.params.window;
  const int truth = procdrift::testing::truth_window(500, w);
  REQUIRE(report.global_change_points.size() == 1);
  CHECK(std::abs(report.global_change_points[0] - truth) <= 1);
}

TEST_CASE("report structure") {
  auto log = sudden_log(3, 0.4);
  auto report = analyze(log, {});
  CHECK(report.windows.size() == window_count(log.size(), *report.params.window));
  CHECK(report.matrix.rows() == static_cast<Eigen::Index>(report.rows.size()));
  CHECK(report.matrix.cols() == static_cast<Eigen::Index>(report.windows.size()));
  CHECK(report.constraints.size() == enumerate_constraints(log.alphabet().size(), kAllTemplateKinds).size());
  CHECK(report.minimized.size() == report.clusters.size());
  CHECK(report.edfgs.size() == report.clusters.size());

  std::size_t members = 0;
  for (std::size_t i = 0; i < report.clusters.size(); ++i) {
    const auto& c = report.clusters[i];
    members += c.members.size();
    if (i) {
      const auto& prev = report.clusters[i - 1];
      CHECK((prev.erratic > c.erratic || (prev.erratic == c.erratic && prev.id < c.id)));
    }
    CHECK(c.erratic >= double(c.members.size()));
    CHECK_FALSE(c.tags.empty());
    if (c.stable_band) CHECK(c.tags == std::vector<DriftTag>{DriftTag::stable});
    CHECK(report.find_cluster(c.id) == &c);
  }
  CHECK(members == report.rows.size());
  CHECK(report.spread == doctest::Approx(spread(report.matrix)));
  CHECK_FALSE(report.cluster_change_points.empty());
}

TEST_CASE("template restriction") {
  auto log = sudden_log(2, 0.5);
  AnalysisParams p;
  p.kinds = {TemplateKind::Response, TemplateKind::Precedence};
  auto report = analyze(log, p);
  const std::size_t k = log.alphabet().size();
  CHECK(report.constraints.size() == 2 * k * (k - 1));
  for (const auto& c : report.constraints)
    CHECK((c.kind == TemplateKind::Response || c.kind == TemplateKind::Precedence));
}

TEST_CASE("determinism") {
  auto log = sudden_log(4, 0.3);
  AnalysisParams one;
  one.threads = 1;
  AnalysisParams many;
  many.threads = 4;
  auto a = serialize_report(analyze(log, one));
  auto b = serialize_report(analyze(log, one));
  auto c = serialize_report(analyze(log, many));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.back() == '\n');
  auto j = nlohmann::json::parse(a);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["params"]["win_size"].is_number());
}

TEST_CASE("cancellation") {
  auto log = sudden_log(5, 0.5);
  std::atomic<bool> stop{true};
  CHECK_THROWS_AS(analyze(log, {}, &stop), AnalysisCancelled);
}

TEST_CASE("params json") {
  AnalysisParams p;
  p.window = WindowConfig{50, 25};
  p.cut_threshold = 3.5;
  p.change_points.penalty = 2.0;
  p.linkage = Linkage::weighted;
  auto back = params_from_json(params_to_json(p));
  CHECK(params_to_json(back) == params_to_json(p));

  auto defaults = params_from_json(nlohmann::json::object());
  CHECK_FALSE(defaults.window);
  CHECK(defaults.cut_threshold == 16.0);
  CHECK_FALSE(defaults.change_points.penalty);

  auto field_of = [](nlohmann::json j) {
    try {
      params_from_json(j);
    } catch (const ParamError& e) {
      return e.field();
    }
    return std::string();
  };
  CHECK(field_of({{"win_size", 50}, {"win_step", 60}}) == "win_step");
  CHECK(field_of({{"win_size", 50}}) == "win_step");
  CHECK(field_of({{"cut_threshold", -1}}) == "cut_threshold");
  CHECK(field_of({{"templates", {"Response", "Nope"}}}) == "templates");
  CHECK(field_of({{"penalty", "high"}}) == "penalty");
  CHECK(field_of({{"bogus", 1}}) == "bogus");
  CHECK(field_of({{"linkage", "single"}}) == "linkage");
  CHECK(params_from_json({{"templates", "Response,Precedence"}}).kinds.size() == 2);
}
