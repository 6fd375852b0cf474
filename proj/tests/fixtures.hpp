#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "procdrift/log.hpp"

namespace procdrift::testing {

/// One-letter activities; each variant repeated `count` times, traces an hour apart.
inline EventLog letters_log(const std::vector<std::pair<std::string, int>>& variants) {
  using namespace std::chrono;
  std::vector<Trace> traces;
  Timestamp t0{sys_days{year{2020} / 1 / 1}};
  int n = 0;
  for (const auto& [word, count] : variants) {
    for (int k = 0; k < count; ++k, ++n) {
      Trace tr;
      tr.case_id = "c" + std::to_string(n);
      Timestamp t = t0 + hours(n);
      for (char ch : word) {
        tr.events.push_back({std::string(1, ch), t, {}});
        t += minutes(1);
      }
      traces.push_back(std::move(tr));
    }
  }
  return EventLog(std::move(traces));
}

/// Encoded trace over a fixed alphabet "a".."z" (ids follow letters).
inline std::vector<ActivityId> encode(const std::string& word) {
  std::vector<ActivityId> out;
  for (char ch : word) out.push_back(static_cast<ActivityId>(ch - 'a'));
  return out;
}

}  // namespace procdrift::testing
