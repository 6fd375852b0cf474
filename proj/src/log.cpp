#include "procdrift/log.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace procdrift {

EventLog::EventLog(std::vector<Trace> traces) : traces_(std::move(traces)) {
  std::set<std::string> labels;
  for (std::size_t t = 0; t < traces_.size(); ++t) {
    auto& trace = traces_[t];
    if (trace.events.empty()) throw LogError("trace '" + trace.case_id + "' has no events");
    for (std::size_t e = 0; e < trace.events.size(); ++e) {
      if (trace.events[e].activity.empty())
        throw LogError("trace '" + trace.case_id + "' event " + std::to_string(e) +
                       " has an empty activity label");
      labels.insert(trace.events[e].activity);
    }
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    event_count_ += trace.events.size();
  }
  alphabet_.assign(labels.begin(), labels.end());

  encoded_.reserve(traces_.size());
  for (const auto& trace : traces_) {
    std::vector<ActivityId> codes;
    codes.reserve(trace.events.size());
    for (const auto& ev : trace.events) codes.push_back(*activity_id(ev.activity));
    encoded_.push_back(std::move(codes));
  }

  start_order_.resize(traces_.size());
  std::iota(start_order_.begin(), start_order_.end(), std::size_t{0});
  std::stable_sort(start_order_.begin(), start_order_.end(), [this](std::size_t a, std::size_t b) {
    return traces_[a].start() < traces_[b].start();
  });
}

std::optional<ActivityId> EventLog::activity_id(std::string_view label) const {
  auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), label);
  if (it == alphabet_.end() || *it != label) return std::nullopt;
  return static_cast<ActivityId>(it - alphabet_.begin());
}

Timestamp EventLog::earliest() const {
  Timestamp best = Timestamp::max();
  for (const auto& t : traces_) best = std::min(best, t.events.front().timestamp);
  return best;
}

Timestamp EventLog::latest() const {
  Timestamp best = Timestamp::min();
  for (const auto& t : traces_) best = std::max(best, t.events.back().timestamp);
  return best;
}

void validate(const WindowConfig& cfg, std::size_t log_size) {
  if (cfg.win_size == 0) throw LogError("win_size must be positive");
  if (cfg.win_step == 0) throw LogError("win_step must be positive");
  if (cfg.win_step > cfg.win_size)
    throw LogError("win_step (" + std::to_string(cfg.win_step) + ") exceeds win_size (" +
                   std::to_string(cfg.win_size) + ")");
  if (cfg.win_size > log_size)
    throw LogError("win_size (" + std::to_string(cfg.win_size) + ") exceeds log size (" +
                   std::to_string(log_size) + ")");
}

WindowConfig default_window_config(const EventLog& log) {
  const std::size_t n = log.size();
  if (n < 2) throw LogError("log too small: " + std::to_string(n) + " trace(s), need at least 2");
  std::size_t step = n >= 122 ? n / 61 : std::max<std::size_t>(1, n / 10);
  std::size_t size = std::min(2 * step, n);
  return {size, step};
}

std::size_t window_count(std::size_t log_size, const WindowConfig& cfg) {
  validate(cfg, log_size);
  const auto n = static_cast<long long>(log_size);
  const auto size = static_cast<long long>(cfg.win_size);
  const auto step = static_cast<long long>(cfg.win_step);
  // Sizing formula first; small logs fall back to every fully populated window.
  long long formula = n - size - step;
  formula = formula < 0 ? 0 : formula / step;
  if (formula >= 1) return static_cast<std::size_t>(formula);
  return static_cast<std::size_t>((n - size) / step + 1);
}

std::vector<SubLogWindow> make_windows(const EventLog& log, const WindowConfig& cfg) {
  const std::size_t count = window_count(log.size(), cfg);
  const auto& order = log.start_order();
  std::vector<SubLogWindow> windows;
  windows.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    SubLogWindow w;
    w.index = j;
    w.first = j * cfg.win_step;
    w.last = w.first + cfg.win_size;
    // start_order is sorted, so the span is the first and last start timestamps.
    w.span_begin = log.trace(order[w.first]).start();
    w.span_end = log.trace(order[w.last - 1]).start();
    windows.push_back(w);
  }
  return windows;
}

}  // namespace procdrift
