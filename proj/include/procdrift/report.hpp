#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "procdrift/changepoint.hpp"
#include "procdrift/cluster.hpp"
#include "procdrift/declare.hpp"
#include "procdrift/dfg.hpp"
#include "procdrift/log.hpp"
#include "procdrift/series.hpp"
#include "procdrift/stationarity.hpp"

namespace procdrift {

inline constexpr int kReportSchemaVersion = 1;

enum class DriftTag : std::uint8_t { sudden, incremental, gradual, reoccurring, outlier, stable };

std::string_view to_string(DriftTag t);

struct ClassifyParams {
  double alpha = 0.05;
  /// Roughness (path variation / range of the mean series) separating
  /// incremental (below) from gradual (above) non-stationary drift.
  double split_threshold = 5.0;
  int outlier_min = 5;
  /// Smallest ACF lag considered for reoccurring drift. analyze() sets it to
  /// ceil(size / step), below which overlapping windows correlate by construction.
  int season_min_lag = 1;
};

struct AnalysisParams {
  std::optional<WindowConfig> window;  ///< nullopt: default_window_config(log)
  std::vector<TemplateKind> kinds{kAllTemplateKinds.begin(), kAllTemplateKinds.end()};
  Linkage linkage = Linkage::ward;
  Metric metric = Metric::euclidean;
  double cut_threshold = 16.0;
  ChangePointConfig change_points;
  ClassifyParams classify;
  std::optional<int> acf_max_lag;  ///< nullopt: min(WinNum - 1, 10 log10(WinNum))
  double report_threshold = 0.9;
  std::string colormap = "plasma";
  unsigned threads = 0;
};

/// Field-level validation; `field` names the offending parameter.
class ParamError : public std::invalid_argument {
 public:
  ParamError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Failure inside analyze(), attributed to a pipeline step (1-6).
class AnalysisError : public std::runtime_error {
 public:
  AnalysisError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class AnalysisCancelled : public std::runtime_error {
 public:
  AnalysisCancelled() : std::runtime_error("analysis cancelled") {}
};

struct BehaviorCluster {
  int id = 0;
  std::vector<int> members;  ///< constraint indices (enumeration order)
  SeriesVector<double> mean_series;
  std::vector<int> change_points;
  double erratic = 0.0;
  std::optional<AdfResult> adf;  ///< nullopt when the series is too short
  std::vector<AcfLag> acf;
  std::vector<DriftTag> tags;
  bool stable_band = false;       ///< zero-variance rows kept out of clustering
  std::size_t related_cases = 0;  ///< traces touching an activity of a member constraint
};

struct ConstraintArc {
  std::string from;
  std::string to;
  TemplateKind kind = TemplateKind::Response;
  Category category = Category::eventual;
  std::string color;
  double mean_confidence = 0.0;
};

struct ExtendedDfg {
  Dfg base;
  std::vector<ConstraintArc> constraint_arcs;
};

std::string_view category_color(Category c);

struct ReportedConstraint {
  int index = 0;  ///< enumeration index
  Constraint constraint;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct DriftReport {
  // Log summary.
  std::size_t traces = 0;
  std::size_t events = 0;
  std::vector<std::string> alphabet;
  Timestamp first_event;
  Timestamp last_event;

  Dfg dfg;
  AnalysisParams params;  ///< resolved (window filled in)

  std::vector<Constraint> constraints;  ///< full enumeration
  std::vector<int> rows;                ///< retained enumeration indices, matrix row order
  ConstraintMatrix matrix;              ///< retained rows x windows
  std::vector<SubLogWindow> windows;

  std::vector<BehaviorCluster> clusters;  ///< erratic descending, ties by id
  std::vector<int> global_change_points;
  /// Union over clusters; points at most ceil(size / step) windows apart
  /// collapse to their most supported one.
  std::vector<int> cluster_change_points;
  double spread = 0.0;
  std::vector<std::vector<ReportedConstraint>> minimized;  ///< parallel to clusters
  std::vector<ExtendedDfg> edfgs;                          ///< parallel to clusters

  const BehaviorCluster* find_cluster(int id) const;
  std::size_t cluster_position(int id) const;
};

/// Runs the six-step pipeline. `cancel` is polled between steps.
DriftReport analyze(const EventLog& log, const AnalysisParams& params,
                    const std::atomic<bool>* cancel = nullptr);

/// Tags from change points, ADF p-value, ACF significance, and the shape of
/// the mean series. Pure and table-driven.
std::vector<DriftTag> classify_cluster(const BehaviorCluster& cluster,
                                       const ClassifyParams& params);

/// One arc per reported constraint; activities missing from the DFG become
/// zero-count nodes.
ExtendedDfg build_edfg(const Dfg& dfg, std::span<const ReportedConstraint> constraints,
                       std::span<const std::string> alphabet);

/// Resolved parameters for a log (window defaults filled in, all fields validated).
AnalysisParams resolve_params(const EventLog& log, const AnalysisParams& params);
void validate_params(const AnalysisParams& params, std::size_t log_size);

nlohmann::json params_to_json(const AnalysisParams& params);
/// Missing fields keep their defaults. Throws ParamError naming the field.
AnalysisParams params_from_json(const nlohmann::json& j);

nlohmann::json cluster_to_json(const DriftReport& report, const BehaviorCluster& cluster);
nlohmann::json report_to_json(const DriftReport& report);
/// Stable text form of report_to_json (2-space indent, trailing newline).
std::string serialize_report(const DriftReport& report);

}  // namespace procdrift
