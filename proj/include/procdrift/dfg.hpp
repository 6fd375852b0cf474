#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include <json.hpp>

#include "procdrift/log.hpp"

namespace procdrift {

/// Directly-follows graph keyed by activity label. std::map keeps every
/// export in label order, so serialization is deterministic.
struct Dfg {
  std::map<std::string, std::uint64_t> nodes;  ///< event occurrences per activity
  std::map<std::pair<std::string, std::string>, std::uint64_t> arcs;
  std::map<std::string, std::uint64_t> starts;
  std::map<std::string, std::uint64_t> ends;
};

Dfg mine_dfg(const EventLog& log);

/// Drops arcs with count < min_arc_count and nodes left without arcs, except
/// nodes that still start or end a trace.
Dfg filter_dfg(const Dfg& dfg, std::uint64_t min_arc_count);

nlohmann::json dfg_to_json(const Dfg& dfg);
std::string dfg_to_dot(const Dfg& dfg);

/// DOT identifiers and labels are always emitted quoted.
std::string dot_quote(const std::string& s);

}  // namespace procdrift
