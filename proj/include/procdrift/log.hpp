#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "procdrift/time.hpp"

namespace procdrift {

/// Index into EventLog::alphabet(). The alphabet is sorted, so id order is label order.
using ActivityId = std::uint32_t;

struct Event {
  std::string activity;
  Timestamp timestamp;
  std::map<std::string, std::string> attrs;
};

struct Trace {
  std::string case_id;
  std::vector<Event> events;

  Timestamp start() const { return events.front().timestamp; }
};

class LogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A multiset of traces. Duplicated traces are stored individually, so size()
/// counts instances.
///
/// Construction validates every trace (non-empty, non-empty activity labels),
/// stably sorts events by timestamp, builds the sorted alphabet and an integer
/// encoding of each trace used by the constraint checker. Immutable afterwards.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::vector<Trace> traces);

  const std::vector<Trace>& traces() const { return traces_; }
  const Trace& trace(std::size_t i) const { return traces_[i]; }
  std::size_t size() const { return traces_.size(); }
  bool empty() const { return traces_.empty(); }
  std::size_t event_count() const { return event_count_; }

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::optional<ActivityId> activity_id(std::string_view label) const;

  std::span<const ActivityId> encoded(std::size_t i) const { return encoded_[i]; }

  /// Trace indices ordered by start timestamp; ties keep file order.
  const std::vector<std::size_t>& start_order() const { return start_order_; }

  Timestamp earliest() const;
  Timestamp latest() const;

 private:
  std::vector<Trace> traces_;
  std::vector<std::string> alphabet_;
  std::vector<std::vector<ActivityId>> encoded_;
  std::vector<std::size_t> start_order_;
  std::size_t event_count_ = 0;
};

struct WindowConfig {
  std::size_t win_size = 0;
  std::size_t win_step = 0;

  bool operator==(const WindowConfig&) const = default;
};

/// Throws LogError naming the violated bound.
void validate(const WindowConfig& cfg, std::size_t log_size);

struct SubLogWindow {
  std::size_t index = 0;
  std::size_t first = 0;  ///< position in EventLog::start_order()
  std::size_t last = 0;   ///< one past the end
  Timestamp span_begin;   ///< earliest start timestamp in the window
  Timestamp span_end;     ///< latest start timestamp in the window

  std::size_t size() const { return last - first; }
};

/// Defaults of WinStep = |L|/61 and WinSize = 2*WinStep. Logs with fewer than
/// 122 traces use WinStep = max(1, |L|/10). Throws LogError when |L| < 2.
WindowConfig default_window_config(const EventLog& log);

/// Count of windows produced for a log of `log_size` traces.
std::size_t window_count(std::size_t log_size, const WindowConfig& cfg);

/// Sliding windows over the start-time-sorted traces. Every window holds
/// exactly win_size traces; trailing traces that do not fill a window are not
/// covered.
std::vector<SubLogWindow> make_windows(const EventLog& log, const WindowConfig& cfg);

}  // namespace procdrift
