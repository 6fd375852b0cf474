#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "procdrift/log.hpp"

namespace procdrift {

/// Random block-structured process: a sequence of single activities, XOR
/// choices and AND interleavings, optionally with one block in a loop.
struct GeneratorConfig {
  std::size_t traces = 1000;
  std::size_t activities = 10;
  bool loop = false;
  std::uint64_t seed = 1;
};

EventLog generate_log(const GeneratorConfig& cfg);

enum class DriftKind : std::uint8_t { sudden, gradual, incremental, reoccurring };

std::string_view to_string(DriftKind k);
std::optional<DriftKind> parse_drift_kind(std::string_view s);

struct InjectedDrift {
  EventLog log;
  DriftKind kind = DriftKind::sudden;
  std::vector<double> fractions;
  /// Positions in start order where the new behavior begins.
  std::vector<std::size_t> change_traces;
  /// Activity pairs whose labels are swapped in the drifted regime.
  std::vector<std::pair<std::string, std::string>> swapped;
};

/// Mutates the traces after each cut. Fractions must lie in (0,1); they are
/// sorted and deduplicated. Throws std::invalid_argument otherwise.
///
/// sudden: from each cut on, one more activity pair has its labels swapped.
/// gradual: the swap is applied with a probability rising linearly from 0 at
///   the cut to 1 at the next cut (or the end of the log).
/// incremental: each cut starts three staged swaps, spaced 4% of the log apart.
/// reoccurring: the same swap is toggled on and off at every cut.
InjectedDrift inject_drift(const EventLog& log, DriftKind kind, std::span<const double> fractions,
                           std::uint64_t seed = 1);

nlohmann::json ground_truth_json(const InjectedDrift& d);

}  // namespace procdrift
