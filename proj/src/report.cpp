#include "procdrift/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace procdrift {

namespace {

void check_cancel(const std::atomic<bool>* cancel) {
  if (cancel && cancel->load()) throw AnalysisCancelled();
}

int default_acf_lag(int win_num) {
  const int lag = static_cast<int>(std::floor(10.0 * std::log10(static_cast<double>(win_num))));
  return std::max(1, std::min(win_num - 1, lag));
}

std::vector<int> detect_or_empty(const ConstraintMatrix& rows, const ChangePointConfig& cfg) {
  if (rows.rows() == 0 || rows.cols() < 2 * std::max(1, cfg.min_segment)) return {};
  return detect_change_points(rows, cfg);
}

// With overlapping windows one transition spans ceil(size / step) + 1
// windows, and clusters may cut it anywhere in that run. Points closer than
// `gap` chain into one run, which keeps its most supported point (closest to
// the middle of the run on ties).
std::vector<int> consolidate_change_points(const std::map<int, int>& support, int gap) {
  std::vector<int> out;
  std::vector<std::pair<int, int>> run;
  auto flush = [&] {
    if (run.empty()) return;
    const double mid = 0.5 * (run.front().first + run.back().first);
    auto best = run.front();
    for (const auto& p : run)
      if (p.second > best.second ||
          (p.second == best.second && std::abs(p.first - mid) < std::abs(best.first - mid)))
        best = p;
    out.push_back(best.first);
    run.clear();
  };
  for (const auto& p : support) {
    if (!run.empty() && p.first - run.back().first > gap) flush();
    run.push_back(p);
  }
  flush();
  return out;
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json series_json(const SeriesVector<double>& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string_view to_string(DriftTag t) {
  switch (t) {
    case DriftTag::sudden: return "sudden";
    case DriftTag::incremental: return "incremental";
    case DriftTag::gradual: return "gradual";
    case DriftTag::reoccurring: return "reoccurring";
    case DriftTag::outlier: return "outlier";
    case DriftTag::stable: return "stable";
  }
  return "stable";
}

std::string_view category_color(Category c) {
  switch (c) {
    case Category::immediate: return "green";
    case Category::eventual: return "blue";
    case Category::negated: return "red";
  }
  return "blue";
}

const BehaviorCluster* DriftReport::find_cluster(int id) const {
  for (const auto& c : clusters)
    if (c.id == id) return &c;
  return nullptr;
}

std::size_t DriftReport::cluster_position(int id) const {
  for (std::size_t i = 0; i < clusters.size(); ++i)
    if (clusters[i].id == id) return i;
  return clusters.size();
}

std::vector<DriftTag> classify_cluster(const BehaviorCluster& cluster,
                                       const ClassifyParams& params) {
  std::vector<DriftTag> tags;
  if (!cluster.change_points.empty()) tags.push_back(DriftTag::sudden);

  const auto& mean = cluster.mean_series;
  if (cluster.adf && cluster.adf->p_value > params.alpha && mean.size() > 1) {
    const double range = mean.maxCoeff() - mean.minCoeff();
    const double roughness = range > 0.0 ? path_variation(mean) / range : 0.0;
    tags.push_back(roughness < params.split_threshold ? DriftTag::incremental : DriftTag::gradual);
  }

  // A significant positive correlation that rises again after decaying; a
  // monotone decay is a trend or level shift, not a season.
  const auto& acf = cluster.acf;
  for (std::size_t k = 1; k < acf.size(); ++k)
    if (acf[k].lag >= std::max(2, params.season_min_lag) && acf[k].significant && acf[k].r > 0.0 &&
        acf[k].r > acf[k - 1].r) {
      tags.push_back(DriftTag::reoccurring);
      break;
    }

  if (static_cast<int>(cluster.members.size()) < params.outlier_min && mean.size() > 1) {
    const double mu = mean.mean();
    const double sigma = std::sqrt((mean.array() - mu).square().mean());
    if (sigma > 0.0) {
      const auto spikes = ((mean.array() - mu).abs() > 3.0 * sigma).count();
      if (spikes >= 1 && spikes <= 2) tags.push_back(DriftTag::outlier);
    }
  }

  if (tags.empty()) tags.push_back(DriftTag::stable);
  std::sort(tags.begin(), tags.end());
  return tags;
}

ExtendedDfg build_edfg(const Dfg& dfg, std::span<const ReportedConstraint> constraints,
                       std::span<const std::string> alphabet) {
  ExtendedDfg out{dfg, {}};
  for (const auto& rc : constraints) {
    ConstraintArc arc;
    arc.from = alphabet[rc.constraint.a];
    arc.to = alphabet[rc.constraint.b.value_or(rc.constraint.a)];
    arc.kind = rc.constraint.kind;
    arc.category = category(arc.kind);
    arc.color = category_color(arc.category);
    arc.mean_confidence = rc.mean;
    out.base.nodes.try_emplace(arc.from, 0);
    out.base.nodes.try_emplace(arc.to, 0);
    out.constraint_arcs.push_back(std::move(arc));
  }
  return out;
}

void validate_params(const AnalysisParams& p, std::size_t log_size) {
  if (p.window) {
    if (p.window->win_size == 0) throw ParamError("win_size", "win_size must be positive");
    if (p.window->win_step == 0) throw ParamError("win_step", "win_step must be positive");
    if (p.window->win_step > p.window->win_size)
      throw ParamError("win_step", "win_step (" + std::to_string(p.window->win_step) +
                                       ") must not exceed win_size (" +
                                       std::to_string(p.window->win_size) + ")");
    if (log_size > 0 && p.window->win_size > log_size)
      throw ParamError("win_size", "win_size (" + std::to_string(p.window->win_size) +
                                       ") exceeds the log size (" + std::to_string(log_size) +
                                       ")");
  }
  if (p.kinds.empty()) throw ParamError("templates", "at least one template kind is required");
  if (!(p.cut_threshold > 0.0) || !std::isfinite(p.cut_threshold))
    throw ParamError("cut_threshold", "cut_threshold must be a positive number");
  if (p.change_points.penalty && !(*p.change_points.penalty > 0.0))
    throw ParamError("penalty", "penalty must be positive or \"auto\"");
  if (!(p.change_points.auto_scale > 0.0))
    throw ParamError("auto_scale", "auto_scale must be positive");
  if (p.change_points.min_segment < 1)
    throw ParamError("min_segment", "min_segment must be at least 1");
  if (!(p.classify.alpha > 0.0 && p.classify.alpha < 1.0))
    throw ParamError("adf_alpha", "adf_alpha must lie in (0, 1)");
  if (!(p.classify.split_threshold > 0.0))
    throw ParamError("split_threshold", "split_threshold must be positive");
  if (p.classify.outlier_min < 1) throw ParamError("outlier_min", "outlier_min must be >= 1");
  if (p.acf_max_lag && *p.acf_max_lag < 1)
    throw ParamError("acf_max_lag", "acf_max_lag must be >= 1");
  if (!(p.report_threshold >= 0.0 && p.report_threshold <= 1.0))
    throw ParamError("report_threshold", "report_threshold must lie in [0, 1]");
  if (p.colormap != "plasma") throw ParamError("colormap", "only the plasma colormap is supported");
}

AnalysisParams resolve_params(const EventLog& log, const AnalysisParams& params) {
  AnalysisParams p = params;
  if (!p.window) {
    try {
      p.window = default_window_config(log);
    } catch (const LogError& e) {
      throw ParamError("win_size", e.what());
    }
  }
  validate_params(p, log.size());
  std::sort(p.kinds.begin(), p.kinds.end());
  p.kinds.erase(std::unique(p.kinds.begin(), p.kinds.end()), p.kinds.end());
  return p;
}

DriftReport analyze(const EventLog& log, const AnalysisParams& params,
                    const std::atomic<bool>* cancel) {
  DriftReport report;
  check_cancel(cancel);

  // Step 1: overview DFG.
  if (log.empty()) throw AnalysisError(1, "the event log is empty");
  report.traces = log.size();
  report.events = log.event_count();
  report.alphabet = log.alphabet();
  report.first_event = log.earliest();
  report.last_event = log.latest();
  report.dfg = mine_dfg(log);
  check_cancel(cancel);

  // Step 2: constraint confidence per window.
  try {
    report.params = resolve_params(log, params);
  } catch (const ParamError& e) {
    throw AnalysisError(2, std::string(e.what()) + " (field " + e.field() + ")");
  }
  // Windows closer than ceil(size / step) share traces.
  const auto& wc = *report.params.window;
  report.params.change_points.noise_lag =
      static_cast<int>((wc.win_size + wc.win_step - 1) / wc.win_step);
  report.params.classify.season_min_lag = report.params.change_points.noise_lag;
  const AnalysisParams& p = report.params;
  report.windows = make_windows(log, *p.window);
  const int win_num = static_cast<int>(report.windows.size());
  report.constraints = enumerate_constraints(log.alphabet().size(), p.kinds);
  const ConstraintMatrix full =
      confidence_matrix(log, report.windows, report.constraints, p.threads);
  check_cancel(cancel);

  // Step 3: cluster the varying series; never-activated rows are dropped and
  // constant rows form a separate stable band.
  std::vector<int> varying, constant;
  for (Eigen::Index i = 0; i < full.rows(); ++i) {
    const double hi = full.row(i).maxCoeff();
    const double lo = full.row(i).minCoeff();
    if (hi <= 0.0) continue;
    report.rows.push_back(static_cast<int>(i));
    (hi > lo ? varying : constant).push_back(static_cast<int>(i));
  }
  report.matrix = select_rows(full, report.rows);

  std::vector<BehaviorCluster> clusters;
  if (!varying.empty()) {
    const auto labels =
        cluster_series(select_rows(full, varying), p.linkage, p.metric, p.cut_threshold);
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    clusters.resize(k);
    for (int c = 0; c < k; ++c) clusters[c].id = c + 1;
    for (std::size_t r = 0; r < varying.size(); ++r) clusters[labels[r]].members.push_back(varying[r]);
  }
  if (!constant.empty()) {
    BehaviorCluster band;
    band.id = static_cast<int>(clusters.size()) + 1;
    band.members = constant;
    band.stable_band = true;
    clusters.push_back(std::move(band));
  }
  check_cancel(cancel);

  // Step 4: sudden drifts, globally and per cluster.
  report.global_change_points = detect_or_empty(report.matrix, p.change_points);
  std::map<int, int> support;
  for (auto& c : clusters) {
    c.mean_series = mean_series(full, c.members);
    if (!c.stable_band) c.change_points = detect_or_empty(select_rows(full, c.members), p.change_points);
    for (int cp : c.change_points) ++support[cp];
    check_cancel(cancel);
  }
  report.cluster_change_points = consolidate_change_points(support, p.change_points.noise_lag);

  // Step 5: metrics and drift types.
  report.spread = spread(report.matrix);
  const int max_lag = p.acf_max_lag ? std::min(*p.acf_max_lag, win_num - 1) : default_acf_lag(win_num);
  std::vector<std::vector<char>> contains(log.alphabet().size(), std::vector<char>(log.size(), 0));
  for (std::size_t t = 0; t < log.size(); ++t)
    for (ActivityId a : log.encoded(t)) contains[a][t] = 1;

  for (auto& c : clusters) {
    c.erratic = erratic(select_rows(full, c.members), win_num);
    const std::span<const double> mean(c.mean_series.data(), c.mean_series.size());
    if (win_num >= 8) c.adf = adf_test(mean);
    if (max_lag >= 1) c.acf = autocorrelation(mean, max_lag);
    c.tags = classify_cluster(c, p.classify);

    std::vector<char> related(log.size(), 0);
    std::set<ActivityId> acts;
    for (int m : c.members) {
      acts.insert(report.constraints[m].a);
      if (report.constraints[m].b) acts.insert(*report.constraints[m].b);
    }
    for (ActivityId a : acts)
      for (std::size_t t = 0; t < log.size(); ++t) related[t] |= contains[a][t];
    c.related_cases = static_cast<std::size_t>(std::count(related.begin(), related.end(), 1));
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    if (a.erratic != b.erratic) return a.erratic > b.erratic;
    return a.id < b.id;
  });
  report.clusters = std::move(clusters);
  check_cancel(cancel);

  // Step 6: minimized constraint lists and extended DFGs. A constraint is
  // reported on its peak window confidence.
  for (const auto& c : report.clusters) {
    std::vector<MeasuredConstraint> measured;
    measured.reserve(c.members.size());
    for (int m : c.members) measured.push_back({report.constraints[m], full.row(m).maxCoeff()});
    std::vector<ReportedConstraint> list;
    for (std::size_t idx : minimize_constraints(measured, p.report_threshold)) {
      const int m = c.members[idx];
      list.push_back({m, report.constraints[m], full.row(m).minCoeff(), full.row(m).maxCoeff(),
                      full.row(m).mean()});
    }
    report.edfgs.push_back(build_edfg(report.dfg, list, report.alphabet));
    report.minimized.push_back(std::move(list));
  }
  return report;
}

nlohmann::json params_to_json(const AnalysisParams& p) {
  nlohmann::json j;
  if (p.window) {
    j["win_size"] = p.window->win_size;
    j["win_step"] = p.window->win_step;
  } else {
    j["win_size"] = nullptr;
    j["win_step"] = nullptr;
  }
  auto& kinds = j["templates"] = nlohmann::json::array();
  for (auto k : p.kinds) kinds.push_back(std::string(to_string(k)));
  j["linkage"] = std::string(to_string(p.linkage));
  j["metric"] = std::string(to_string(p.metric));
  j["cut_threshold"] = p.cut_threshold;
  j["cost"] = std::string(to_string(p.change_points.cost));
  j["penalty"] = p.change_points.penalty ? nlohmann::json(*p.change_points.penalty)
                                         : nlohmann::json("auto");
  j["auto_scale"] = p.change_points.auto_scale;
  j["min_segment"] = p.change_points.min_segment;
  j["adf_alpha"] = p.classify.alpha;
  j["split_threshold"] = p.classify.split_threshold;
  j["outlier_min"] = p.classify.outlier_min;
  j["acf_max_lag"] = p.acf_max_lag ? nlohmann::json(*p.acf_max_lag) : nlohmann::json(nullptr);
  j["report_threshold"] = p.report_threshold;
  j["colormap"] = p.colormap;
  return j;
}

AnalysisParams params_from_json(const nlohmann::json& j) {
  AnalysisParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw ParamError("params", "params must be a JSON object");

  auto number = [&](const char* field) -> double {
    const auto& v = j.at(field);
    if (!v.is_number()) throw ParamError(field, std::string(field) + " must be a number");
    return v.get<double>();
  };
  auto integer = [&](const char* field) -> long long {
    const auto& v = j.at(field);
    if (!v.is_number_integer()) throw ParamError(field, std::string(field) + " must be an integer");
    return v.get<long long>();
  };
  auto text = [&](const char* field) -> std::string {
    const auto& v = j.at(field);
    if (!v.is_string()) throw ParamError(field, std::string(field) + " must be a string");
    return v.get<std::string>();
  };

  static const std::set<std::string> known = {
      "win_size",   "win_step",        "templates",   "linkage",     "metric",
      "cut_threshold", "cost",         "penalty",     "auto_scale",  "min_segment",
      "adf_alpha",  "split_threshold", "outlier_min", "acf_max_lag", "report_threshold",
      "colormap"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ParamError(key, "unknown parameter '" + key + "'");

  const bool has_size = j.contains("win_size") && !j["win_size"].is_null();
  const bool has_step = j.contains("win_step") && !j["win_step"].is_null();
  if (has_size != has_step)
    throw ParamError(has_size ? "win_step" : "win_size", "win_size and win_step go together");
  if (has_size) {
    auto size = integer("win_size");
    auto step = integer("win_step");
    if (size < 1) throw ParamError("win_size", "win_size must be positive");
    if (step < 1) throw ParamError("win_step", "win_step must be positive");
    p.window = WindowConfig{static_cast<std::size_t>(size), static_cast<std::size_t>(step)};
  }
  if (j.contains("templates")) {
    const auto& t = j["templates"];
    std::vector<std::string> names;
    if (t.is_string()) {
      std::string s = t.get<std::string>();
      std::size_t start = 0;
      while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos) comma = s.size();
        if (comma > start) names.push_back(s.substr(start, comma - start));
        start = comma + 1;
      }
    } else if (t.is_array()) {
      for (const auto& e : t) {
        if (!e.is_string()) throw ParamError("templates", "templates must be strings");
        names.push_back(e.get<std::string>());
      }
    } else {
      throw ParamError("templates", "templates must be a list or comma-separated string");
    }
    p.kinds.clear();
    for (const auto& name : names) {
      auto kind = parse_template_kind(name);
      if (!kind) throw ParamError("templates", "unknown template '" + name + "'");
      p.kinds.push_back(*kind);
    }
  }
  if (j.contains("linkage")) {
    auto l = parse_linkage(text("linkage"));
    if (!l) throw ParamError("linkage", "linkage must be ward or weighted");
    p.linkage = *l;
  }
  if (j.contains("metric")) {
    auto m = parse_metric(text("metric"));
    if (!m) throw ParamError("metric", "metric must be euclidean or correlation");
    p.metric = *m;
  }
  if (j.contains("cut_threshold")) p.cut_threshold = number("cut_threshold");
  if (j.contains("cost")) {
    auto c = parse_cost_kind(text("cost"));
    if (!c) throw ParamError("cost", "cost must be kernel-rbf, kernel-linear or l2-mean");
    p.change_points.cost = *c;
  }
  if (j.contains("penalty")) {
    const auto& v = j["penalty"];
    if (v.is_string() && v.get<std::string>() == "auto") {
      p.change_points.penalty.reset();
    } else if (v.is_number()) {
      p.change_points.penalty = v.get<double>();
    } else {
      throw ParamError("penalty", "penalty must be a number or \"auto\"");
    }
  }
  if (j.contains("auto_scale")) p.change_points.auto_scale = number("auto_scale");
  if (j.contains("min_segment")) p.change_points.min_segment = static_cast<int>(integer("min_segment"));
  if (j.contains("adf_alpha")) p.classify.alpha = number("adf_alpha");
  if (j.contains("split_threshold")) p.classify.split_threshold = number("split_threshold");
  if (j.contains("outlier_min")) p.classify.outlier_min = static_cast<int>(integer("outlier_min"));
  if (j.contains("acf_max_lag") && !j["acf_max_lag"].is_null())
    p.acf_max_lag = static_cast<int>(integer("acf_max_lag"));
  if (j.contains("report_threshold")) p.report_threshold = number("report_threshold");
  if (j.contains("colormap")) p.colormap = text("colormap");
  validate_params(p, 0);
  return p;
}

nlohmann::json cluster_to_json(const DriftReport& report, const BehaviorCluster& c) {
  nlohmann::json j;
  j["id"] = c.id;
  j["size"] = c.members.size();
  j["members"] = c.members;
  j["stable_band"] = c.stable_band;
  j["mean_series"] = series_json(c.mean_series);
  j["change_points"] = c.change_points;
  j["erratic"] = c.erratic;
  if (c.adf) {
    j["adf"] = {{"statistic", finite_or_null(c.adf->statistic)},
                {"p_value", c.adf->p_value},
                {"lags", c.adf->lags},
                {"nobs", c.adf->nobs},
                {"degenerate", c.adf->degenerate},
                {"stationary", c.adf->p_value < report.params.classify.alpha}};
  } else {
    j["adf"] = nullptr;
  }
  auto& acf = j["acf"] = nlohmann::json::array();
  for (const auto& lag : c.acf)
    acf.push_back({{"lag", lag.lag}, {"r", lag.r}, {"significant", lag.significant}});
  auto& tags = j["tags"] = nlohmann::json::array();
  for (auto t : c.tags) tags.push_back(std::string(to_string(t)));
  j["related_cases"] = c.related_cases;
  return j;
}

nlohmann::json report_to_json(const DriftReport& r) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["log"] = {{"traces", r.traces},
              {"events", r.events},
              {"activities", r.alphabet},
              {"first_event", format_iso8601(r.first_event)},
              {"last_event", format_iso8601(r.last_event)}};
  j["params"] = params_to_json(r.params);
  j["dfg"] = dfg_to_json(r.dfg);

  auto& windows = j["windows"] = nlohmann::json::array();
  for (const auto& w : r.windows)
    windows.push_back({{"index", w.index},
                       {"first", w.first},
                       {"last", w.last},
                       {"span_begin", format_iso8601(w.span_begin)},
                       {"span_end", format_iso8601(w.span_end)}});

  auto& rows = j["rows"] = nlohmann::json::array();
  auto& matrix = j["matrix"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& c = r.constraints[r.rows[i]];
    rows.push_back({{"index", r.rows[i]},
                    {"constraint", describe(c, r.alphabet)},
                    {"template", std::string(to_string(c.kind))},
                    {"activity1", r.alphabet[c.a]},
                    {"activity2", c.b ? nlohmann::json(r.alphabet[*c.b]) : nlohmann::json(nullptr)}});
    const auto row = r.matrix.row(static_cast<Eigen::Index>(i));
    matrix.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  j["constraint_count"] = r.constraints.size();
  j["spread"] = r.spread;
  j["global_change_points"] = r.global_change_points;
  j["cluster_change_points"] = r.cluster_change_points;

  auto& clusters = j["clusters"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.clusters.size(); ++i) {
    auto cj = cluster_to_json(r, r.clusters[i]);
    auto& list = cj["constraints"] = nlohmann::json::array();
    for (const auto& rc : r.minimized[i])
      list.push_back({{"index", rc.index},
                      {"template", std::string(to_string(rc.constraint.kind))},
                      {"activity1", r.alphabet[rc.constraint.a]},
                      {"activity2", rc.constraint.b ? nlohmann::json(r.alphabet[*rc.constraint.b])
                                                    : nlohmann::json(nullptr)},
                      {"min", rc.min},
                      {"max", rc.max},
                      {"mean", rc.mean}});
    clusters.push_back(std::move(cj));
  }
  return j;
}

std::string serialize_report(const DriftReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

}  // namespace procdrift
