#include "procdrift/log_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace procdrift {

namespace pt = boost::property_tree;

namespace {

struct XesAttr {
  std::string key;
  std::string value;
};

std::optional<XesAttr> attribute_of(const pt::ptree& node) {
  auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) return std::nullopt;
  auto key = attrs->get_optional<std::string>("key");
  if (!key) return std::nullopt;
  return XesAttr{*key, attrs->get<std::string>("value", "")};
}

bool is_attribute_tag(const std::string& tag) {
  return tag == "string" || tag == "date" || tag == "int" || tag == "float" ||
         tag == "boolean" || tag == "id";
}

Trace read_trace(const pt::ptree& node, std::size_t ordinal) {
  Trace trace;
  std::size_t event_ordinal = 0;
  for (const auto& [tag, child] : node) {
    if (tag == "event") {
      Event ev;
      bool has_name = false;
      bool has_time = false;
      for (const auto& [etag, attr_node] : child) {
        if (!is_attribute_tag(etag)) continue;
        auto attr = attribute_of(attr_node);
        if (!attr) continue;
        if (attr->key == "concept:name" && etag == "string") {
          ev.activity = attr->value;
          has_name = true;
        } else if (attr->key == "time:timestamp" && etag == "date") {
          auto ts = parse_iso8601(attr->value);
          if (!ts)
            throw ParseError("trace '" + trace.case_id + "' event " +
                             std::to_string(event_ordinal) + ": unparseable time:timestamp '" +
                             attr->value + "'");
          ev.timestamp = *ts;
          has_time = true;
        } else {
          ev.attrs[attr->key] = attr->value;
        }
      }
      const std::string trace_label =
          trace.case_id.empty() ? "trace-" + std::to_string(ordinal) : trace.case_id;
      if (!has_name)
        throw ParseError("trace '" + trace_label + "' event " + std::to_string(event_ordinal) +
                         ": missing concept:name");
      if (!has_time)
        throw ParseError("trace '" + trace_label + "' event " + std::to_string(event_ordinal) +
                         ": missing time:timestamp");
      trace.events.push_back(std::move(ev));
      ++event_ordinal;
    } else if (tag == "string") {
      auto attr = attribute_of(child);
      if (attr && attr->key == "concept:name") trace.case_id = attr->value;
    }
  }
  if (trace.case_id.empty()) trace.case_id = "trace-" + std::to_string(ordinal);
  if (trace.events.empty()) throw ParseError("trace '" + trace.case_id + "' has no events");
  return trace;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// RFC 4180 records. Quoted fields may contain separators, quotes ("") and newlines.
struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

std::vector<CsvRecord> read_csv_records(std::string_view text) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      // swallowed; "\r\n" ends the record on '\n'
    } else if (c == '\n') {
      ++line;
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line);
  if (field_started || !current.fields.empty()) end_record();
  return records;
}

}  // namespace

EventLog parse_xes(std::string_view bytes) {
  pt::ptree tree;
  std::istringstream in{std::string(bytes)};
  try {
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed XML at line " + std::to_string(e.line()) + ": " + e.message(),
                     e.line());
  }
  auto log_node = tree.get_child_optional("log");
  if (!log_node) throw ParseError("missing <log> root element");

  std::vector<Trace> traces;
  std::size_t ordinal = 0;
  for (const auto& [tag, child] : *log_node) {
    if (tag != "trace") continue;
    traces.push_back(read_trace(child, ordinal++));
  }
  return EventLog(std::move(traces));
}

std::string write_xes(const EventLog& log) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<log xes.version=\"1849-2016\" xes.features=\"\">\n"
      << "  <extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n"
      << "  <extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n";
  for (const auto& trace : log.traces()) {
    out << "  <trace>\n    <string key=\"concept:name\" value=\"" << xml_escape(trace.case_id)
        << "\"/>\n";
    for (const auto& ev : trace.events) {
      out << "    <event>\n      <string key=\"concept:name\" value=\"" << xml_escape(ev.activity)
          << "\"/>\n      <date key=\"time:timestamp\" value=\"" << format_iso8601(ev.timestamp)
          << "\"/>\n";
      for (const auto& [k, v] : ev.attrs)
        out << "      <string key=\"" << xml_escape(k) << "\" value=\"" << xml_escape(v) << "\"/>\n";
      out << "    </event>\n";
    }
    out << "  </trace>\n";
  }
  out << "</log>\n";
  return out.str();
}

EventLog parse_csv(std::string_view bytes, const CsvMapping& mapping) {
  auto records = read_csv_records(bytes);
  if (records.empty()) throw ParseError("CSV input has no header row", 1);

  const auto& header = records.front().fields;
  auto column = [&](const std::string& name, const char* role) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      std::string available;
      for (const auto& h : header) available += (available.empty() ? "" : ", ") + h;
      throw ParseError(std::string("unknown ") + role + " column '" + name +
                           "'; available headers: " + available,
                       1);
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t case_idx = column(mapping.case_col, "case");
  const std::size_t act_idx = column(mapping.activity_col, "activity");
  const std::size_t time_idx = column(mapping.time_col, "time");

  std::vector<Trace> traces;
  std::unordered_map<std::string, std::size_t> by_case;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size())
      throw ParseError("row has " + std::to_string(rec.fields.size()) + " fields, header has " +
                           std::to_string(header.size()),
                       rec.line);
    auto ts = parse_timestamp(rec.fields[time_idx], mapping.time_format);
    if (!ts)
      throw ParseError("unparseable timestamp '" + rec.fields[time_idx] + "' at line " +
                           std::to_string(rec.line),
                       rec.line);
    if (rec.fields[act_idx].empty())
      throw ParseError("empty activity at line " + std::to_string(rec.line), rec.line);

    Event ev{rec.fields[act_idx], *ts, {}};
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != case_idx && c != act_idx && c != time_idx) ev.attrs[header[c]] = rec.fields[c];

    const auto& case_id = rec.fields[case_idx];
    auto [it, inserted] = by_case.try_emplace(case_id, traces.size());
    if (inserted) traces.push_back(Trace{case_id, {}});
    traces[it->second].events.push_back(std::move(ev));
  }
  return EventLog(std::move(traces));
}

nlohmann::json log_to_json(const EventLog& log) {
  nlohmann::json traces = nlohmann::json::array();
  for (const auto& trace : log.traces()) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& ev : trace.events) {
      events.push_back({{"activity", ev.activity},
                        {"timestamp", format_iso8601(ev.timestamp)},
                        {"attrs", ev.attrs}});
    }
    traces.push_back({{"case_id", trace.case_id}, {"events", std::move(events)}});
  }
  return {{"traces", std::move(traces)}};
}

EventLog log_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("traces") || !j["traces"].is_array())
    throw ParseError("JSON log must be an object with a 'traces' array");
  std::vector<Trace> traces;
  std::size_t ordinal = 0;
  for (const auto& jt : j["traces"]) {
    Trace trace;
    trace.case_id = jt.value("case_id", "trace-" + std::to_string(ordinal));
    if (!jt.contains("events") || !jt["events"].is_array())
      throw ParseError("trace '" + trace.case_id + "' lacks an 'events' array");
    std::size_t e = 0;
    for (const auto& je : jt["events"]) {
      if (!je.contains("activity") || !je["activity"].is_string())
        throw ParseError("trace '" + trace.case_id + "' event " + std::to_string(e) +
                         ": missing activity");
      if (!je.contains("timestamp") || !je["timestamp"].is_string())
        throw ParseError("trace '" + trace.case_id + "' event " + std::to_string(e) +
                         ": missing timestamp");
      auto ts = parse_iso8601(je["timestamp"].get<std::string>());
      if (!ts)
        throw ParseError("trace '" + trace.case_id + "' event " + std::to_string(e) +
                         ": unparseable timestamp");
      Event ev{je["activity"].get<std::string>(), *ts, {}};
      if (je.contains("attrs") && je["attrs"].is_object())
        for (const auto& [k, v] : je["attrs"].items())
          ev.attrs[k] = v.is_string() ? v.get<std::string>() : v.dump();
      trace.events.push_back(std::move(ev));
      ++e;
    }
    traces.push_back(std::move(trace));
    ++ordinal;
  }
  return EventLog(std::move(traces));
}

LogFormat detect_format(std::string_view bytes) {
  auto first = bytes.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
  if (first == std::string_view::npos) return LogFormat::csv;
  if (bytes[first] == '<') return LogFormat::xes;
  if (bytes[first] == '{') return LogFormat::json;
  return LogFormat::csv;
}

EventLog parse_log(std::string_view bytes, const CsvMapping& mapping) {
  switch (detect_format(bytes)) {
    case LogFormat::xes:
      return parse_xes(bytes);
    case LogFormat::json: {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(bytes);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
      }
      return log_from_json(j);
    }
    case LogFormat::csv:
      break;
  }
  return parse_csv(bytes, mapping);
}

EventLog read_log_file(const std::filesystem::path& path, const CsvMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError("cannot open log file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_log(buf.str(), mapping);
}

}  // namespace procdrift
