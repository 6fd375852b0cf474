#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "procdrift/log.hpp"

namespace procdrift {

/// Malformed input. `line` is 1-based and 0 when not applicable (CSV row numbers
/// are reported as lines, counting the header as line 1).
class ParseError : public LogError {
 public:
  ParseError(const std::string& what, std::size_t line = 0) : LogError(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// XES subset: <log>/<trace>/<event>, concept:name and time:timestamp keys.
/// Other string/int/float/boolean event attributes are kept as strings.
EventLog parse_xes(std::string_view bytes);
std::string write_xes(const EventLog& log);

struct CsvMapping {
  std::string case_col = "case_id";
  std::string activity_col = "activity";
  std::string time_col = "timestamp";
  std::string time_format = "iso8601";
};

EventLog parse_csv(std::string_view bytes, const CsvMapping& mapping = {});

/// Canonical JSON dump: {"traces":[{"case_id","events":[{"activity","timestamp","attrs"}]}]}.
nlohmann::json log_to_json(const EventLog& log);
EventLog log_from_json(const nlohmann::json& j);

enum class LogFormat { xes, csv, json };

/// Format sniffing: XML prolog or '<' → XES, '{' → JSON, otherwise CSV.
LogFormat detect_format(std::string_view bytes);
EventLog parse_log(std::string_view bytes, const CsvMapping& mapping = {});
EventLog read_log_file(const std::filesystem::path& path, const CsvMapping& mapping = {});

}  // namespace procdrift
