#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "procdrift/report.hpp"

namespace procdrift {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// 256-entry plasma lookup table, 0 -> dark blue, 255 -> yellow.
const std::array<Rgb, 256>& plasma_lut();
/// Confidence in [0,1] (clamped) to a plasma color.
Rgb plasma(double value);
/// "#rrggbb".
std::string to_hex(Rgb c);

struct DriftMapOptions {
  int cell_width = 12;
  int row_height = 2;
  int margin_left = 40;
  int margin_top = 20;
  int margin_bottom = 30;
  int margin_right = 10;
};

/// Geometry and data of the drift map: one row per retained constraint,
/// grouped in bands by cluster (ranking order, stable band last) and sorted
/// within a band by mean squared error to the cluster mean.
nlohmann::json drift_map_layout(const DriftReport& report, const DriftMapOptions& opt = {});
std::string render_drift_map_svg(const DriftReport& report, const DriftMapOptions& opt = {});

nlohmann::json drift_chart_data(const DriftReport& report, const BehaviorCluster& cluster);
std::string render_drift_chart_svg(const DriftReport& report, const BehaviorCluster& cluster);

std::string render_acf_svg(const BehaviorCluster& cluster);

nlohmann::json edfg_to_json(const ExtendedDfg& edfg);
std::string edfg_to_dot(const ExtendedDfg& edfg);

/// Columns: cluster, template, activity1, activity2, min, max, mean.
std::string constraints_csv(const DriftReport& report, const BehaviorCluster& cluster);
nlohmann::json constraints_json(const DriftReport& report, const BehaviorCluster& cluster);

/// Cluster summaries in ranking order (no constraint lists).
nlohmann::json clusters_json(const DriftReport& report);
/// Spread, change points and per-cluster erratic/ADF/ACF/tags.
nlohmann::json metrics_json(const DriftReport& report);

}  // namespace procdrift
