#include "procdrift/service.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

// Eigen-based headers first: <resolv.h>, pulled in by httplib, defines `_res`.
#include "procdrift/log_io.hpp"
#include "procdrift/render.hpp"
#include "procdrift/report.hpp"

#include <httplib.h>
#include <openssl/evp.h>

namespace procdrift {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class JobState { pending, running, done, failed };

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::pending: return "pending";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
  }
  return "pending";
}

std::string now_iso() {
  return format_iso8601(std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now()));
}

struct StoredLog {
  std::string id;
  EventLog log;
  std::string format;
};

struct Outputs {
  DriftReport report;
  std::string report_json;
  std::string layout_json;
  std::string driftmap_svg;
  std::string clusters_json;
  std::string metrics_json;
};

struct Job {
  std::string id;
  std::shared_ptr<const StoredLog> log;
  AnalysisParams params;
  json params_echo;
  std::string created_at;
  std::atomic<bool> cancel{false};

  mutable std::mutex mu;
  JobState state = JobState::pending;
  std::string error;
  int error_step = 0;
  std::shared_ptr<const Outputs> outputs;
};

json summary_of(const StoredLog& s) {
  return {{"log_id", s.id},
          {"format", s.format},
          {"size", s.log.size()},
          {"events", s.log.event_count()},
          {"alphabet", s.log.alphabet()},
          {"time_span",
           {{"first", format_iso8601(s.log.earliest())}, {"last", format_iso8601(s.log.latest())}}}};
}

json error_body(const std::string& msg) { return {{"error", msg}}; }

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

bool accepts(const httplib::Request& req, std::string_view type) {
  return req.get_header_value("Accept").find(type) != std::string::npos;
}

std::string format_name(LogFormat f) {
  switch (f) {
    case LogFormat::xes: return "xes";
    case LogFormat::csv: return "csv";
    case LogFormat::json: return "json";
  }
  return "csv";
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

std::pair<std::string, int> parse_bind_addr(const std::string& addr) {
  std::string host = "127.0.0.1";
  std::string port = addr;
  if (auto colon = addr.rfind(':'); colon != std::string::npos) {
    host = addr.substr(0, colon);
    port = addr.substr(colon + 1);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']')
      host = host.substr(1, host.size() - 2);
    if (host.empty()) host = "0.0.0.0";
  }
  try {
    std::size_t used = 0;
    const int p = std::stoi(port, &used);
    if (used != port.size() || p < 0 || p > 65535) throw std::out_of_range(port);
    return {host, p};
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid bind address '" + addr + "'");
  }
}

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig cfg;
  if (const char* v = std::getenv("DATA_DIR"); v && *v) cfg.data_dir = v;
  if (const char* v = std::getenv("BIND_ADDR"); v && *v) cfg.bind_addr = v;
  if (const char* v = std::getenv("MAX_UPLOAD_MB"); v && *v) {
    const double mb = std::strtod(v, nullptr);
    if (mb > 0) cfg.max_upload_bytes = static_cast<std::size_t>(mb * 1024 * 1024);
  }
  return cfg;
}

json openapi_document() {
  auto op = [](std::string summary, json responses) {
    return json{{"summary", std::move(summary)}, {"responses", std::move(responses)}};
  };
  auto id_param = [](const char* name) {
    return json{{"name", name}, {"in", "path"}, {"required", true}, {"schema", {{"type", "string"}}}};
  };
  auto ok = [](const char* d) { return json{{"description", d}}; };
  json cluster_params = json::array({id_param("id"), id_param("k")});
  json analysis_params = json::array({id_param("id")});

  json paths;
  paths["/logs"]["post"] = op("Upload an XES, CSV or JSON event log (multipart field 'file' or raw body)",
                              {{"201", ok("Stored; log summary")},
                               {"200", ok("Already stored; log summary")},
                               {"400", ok("Parse failure")},
                               {"413", ok("Upload too large")}});
  paths["/logs/{id}"]["get"] = op("Log summary", {{"200", ok("Log summary")}, {"404", ok("Unknown log")}});
  paths["/logs/{id}"]["parameters"] = analysis_params;
  paths["/analyses"]["post"] = op("Start an analysis: {log_id, params?}",
                                  {{"202", ok("Analysis handle")},
                                   {"400", ok("Malformed body")},
                                   {"404", ok("Unknown log")},
                                   {"422", ok("Invalid parameter (field named)")}});
  paths["/analyses/{id}"]["get"] = op("Analysis handle", {{"200", ok("Handle")}, {"404", ok("Unknown analysis")}});
  paths["/analyses/{id}"]["delete"] = op("Cancel an analysis", {{"200", ok("Handle")}, {"404", ok("Unknown analysis")}});
  paths["/analyses/{id}"]["parameters"] = analysis_params;
  const json view = {{"200", ok("View")}, {"404", ok("Unknown analysis or cluster")}, {"409", ok("Analysis not done")}};
  for (const char* p : {"/analyses/{id}/report", "/analyses/{id}/driftmap", "/analyses/{id}/clusters",
                        "/analyses/{id}/metrics"}) {
    paths[p]["get"] = op("Report view", view);
    paths[p]["parameters"] = analysis_params;
  }
  paths["/analyses/{id}/driftmap"]["get"]["summary"] =
      "Drift map layout JSON, or SVG with Accept: image/svg+xml";
  for (const char* p : {"/analyses/{id}/clusters/{k}", "/analyses/{id}/clusters/{k}/chart",
                        "/analyses/{id}/clusters/{k}/acf", "/analyses/{id}/clusters/{k}/constraints",
                        "/analyses/{id}/clusters/{k}/edfg"}) {
    paths[p]["get"] = op("Cluster view", view);
    paths[p]["parameters"] = cluster_params;
  }
  paths["/analyses/{id}/clusters/{k}/chart"]["get"]["summary"] =
      "Drift chart data, or SVG with Accept: image/svg+xml";
  paths["/analyses/{id}/clusters/{k}/acf"]["get"]["summary"] =
      "Autocorrelation lags, or SVG with Accept: image/svg+xml";
  paths["/analyses/{id}/clusters/{k}/constraints"]["get"]["summary"] =
      "Minimized constraint list, or CSV with Accept: text/csv";
  paths["/analyses/{id}/clusters/{k}/edfg"]["get"]["summary"] =
      "Extended DFG, or DOT with Accept: text/vnd.graphviz";
  paths["/openapi.json"]["get"] = op("This document", {{"200", ok("OpenAPI document")}});

  return {{"openapi", "3.0.3"},
          {"info", {{"title", "procdrift"}, {"version", "1"}}},
          {"paths", std::move(paths)}};
}

struct Service::Impl {
  ServiceConfig cfg;
  httplib::Server server;

  std::mutex logs_mu;
  std::map<std::string, std::shared_ptr<const StoredLog>> logs;

  std::mutex jobs_mu;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::uint64_t job_counter = 0;

  std::mutex queue_mu;
  std::condition_variable queue_cv;
  std::deque<std::shared_ptr<Job>> queue;
  bool stopping = false;
  std::vector<std::thread> workers;

  explicit Impl(ServiceConfig c) : cfg(std::move(c)) {
    // a second server on a busy port must fail to bind
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    std::error_code ec;
    fs::create_directories(cfg.data_dir / "logs", ec);
    if (!ec) fs::create_directories(cfg.data_dir / "reports", ec);
    if (ec)
      throw std::runtime_error("cannot create data directory " + cfg.data_dir.string() + ": " +
                               ec.message());
    const auto probe = cfg.data_dir / ".write-probe";
    {
      std::ofstream out(probe);
      if (!(out << "ok")) throw std::runtime_error("data directory " + cfg.data_dir.string() + " is not writable");
    }
    fs::remove(probe, ec);

    unsigned n = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    for (unsigned i = 0; i < n; ++i) workers.emplace_back([this] { work(); });
    server.set_payload_max_length(cfg.max_upload_bytes);
    routes();
  }

  ~Impl() {
    server.stop();
    {
      std::lock_guard lock(queue_mu);
      stopping = true;
    }
    {
      std::lock_guard lock(jobs_mu);
      for (auto& [id, job] : jobs) job->cancel = true;
    }
    queue_cv.notify_all();
    for (auto& w : workers) w.join();
  }

  void work() {
    while (true) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(queue_mu);
        queue_cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        job = std::move(queue.front());
        queue.pop_front();
      }
      {
        std::lock_guard lock(job->mu);
        if (job->state != JobState::pending) continue;
        job->state = JobState::running;
      }
      run(*job);
    }
  }

  void run(Job& job) {
    try {
      auto out = std::make_shared<Outputs>();
      AnalysisParams p = job.params;
      p.threads = 1;
      out->report = analyze(job.log->log, p, &job.cancel);
      out->report_json = serialize_report(out->report);
      out->layout_json = drift_map_layout(out->report).dump(2) + "\n";
      out->driftmap_svg = render_drift_map_svg(out->report);
      out->clusters_json = clusters_json(out->report).dump(2) + "\n";
      out->metrics_json = metrics_json(out->report).dump(2) + "\n";
      std::ofstream(cfg.data_dir / "reports" / (job.id + ".json"), std::ios::binary)
          << out->report_json;
      std::lock_guard lock(job.mu);
      job.outputs = std::move(out);
      job.state = JobState::done;
    } catch (const AnalysisCancelled& e) {
      fail(job, e.what(), 0);
    } catch (const AnalysisError& e) {
      fail(job, e.what(), e.step());
    } catch (const std::exception& e) {
      fail(job, e.what(), 0);
    }
  }

  static void fail(Job& job, const std::string& msg, int step) {
    std::lock_guard lock(job.mu);
    job.state = JobState::failed;
    job.error = msg;
    job.error_step = step;
  }

  static json handle_of(const Job& job) {
    std::lock_guard lock(job.mu);
    json j = {{"id", job.id},
              {"log_id", job.log->id},
              {"state", std::string(to_string(job.state))},
              {"params", job.params_echo},
              {"created_at", job.created_at}};
    if (job.state == JobState::failed) {
      j["error"] = job.error;
      if (job.error_step) j["step"] = job.error_step;
    }
    if (job.state == JobState::done) {
      const auto& r = job.outputs->report;
      j["summary"] = {{"windows", r.windows.size()},
                      {"constraints", r.rows.size()},
                      {"clusters", r.clusters.size()},
                      {"global_change_points", r.global_change_points},
                      {"spread", r.spread}};
    }
    return j;
  }

  std::shared_ptr<const StoredLog> find_log(const std::string& id) {
    {
      std::lock_guard lock(logs_mu);
      if (auto it = logs.find(id); it != logs.end()) return it->second;
    }
    if (id.find_first_not_of("0123456789abcdef") != std::string::npos) return nullptr;
    const auto path = cfg.data_dir / "logs" / (id + ".log.json");
    std::ifstream in(path, std::ios::binary);
    if (!in) return nullptr;
    try {
      auto stored = std::make_shared<StoredLog>();
      json meta = json::parse(in);
      stored->id = id;
      stored->format = meta.value("format", "json");
      stored->log = log_from_json(meta.at("log"));
      std::lock_guard lock(logs_mu);
      return logs.emplace(id, std::move(stored)).first->second;
    } catch (const std::exception&) {
      return nullptr;
    }
  }

  std::shared_ptr<Job> find_job(const std::string& id) {
    std::lock_guard lock(jobs_mu);
    auto it = jobs.find(id);
    return it == jobs.end() ? nullptr : it->second;
  }

  void post_log(const httplib::Request& req, httplib::Response& res) {
    std::string bytes;
    std::string filename;
    if (req.is_multipart_form_data()) {
      if (req.has_file("file")) {
        auto f = req.get_file_value("file");
        bytes = f.content;
        filename = f.filename;
      } else if (!req.files.empty()) {
        bytes = req.files.begin()->second.content;
        filename = req.files.begin()->second.filename;
      }
    } else {
      bytes = req.body;
    }
    if (bytes.empty()) return send_json(res, 400, error_body("empty upload"));

    CsvMapping mapping;
    if (req.has_param("case_col")) mapping.case_col = req.get_param_value("case_col");
    if (req.has_param("activity_col")) mapping.activity_col = req.get_param_value("activity_col");
    if (req.has_param("time_col")) mapping.time_col = req.get_param_value("time_col");
    if (req.has_param("time_format")) mapping.time_format = req.get_param_value("time_format");

    const LogFormat format = detect_format(bytes);
    std::string key = bytes;
    if (format == LogFormat::csv)
      key += "\n#" + mapping.case_col + "|" + mapping.activity_col + "|" + mapping.time_col + "|" +
             mapping.time_format;
    const std::string id = format == LogFormat::csv ? sha256_hex(key) : sha256_hex(bytes);

    if (auto existing = find_log(id)) return send_json(res, 200, summary_of(*existing));

    auto stored = std::make_shared<StoredLog>();
    stored->id = id;
    stored->format = format_name(format);
    try {
      stored->log = parse_log(bytes, mapping);
    } catch (const ParseError& e) {
      json body = error_body(e.what());
      if (e.line()) body["line"] = e.line();
      return send_json(res, 400, body);
    } catch (const std::exception& e) {
      return send_json(res, 400, error_body(e.what()));
    }
    if (stored->log.empty()) return send_json(res, 400, error_body("the log has no traces"));

    const auto dir = cfg.data_dir / "logs";
    std::ofstream(dir / (id + "." + stored->format), std::ios::binary) << bytes;
    std::ofstream(dir / (id + ".log.json"), std::ios::binary)
        << json{{"format", stored->format}, {"log", log_to_json(stored->log)}}.dump();
    {
      std::lock_guard lock(logs_mu);
      logs.emplace(id, stored);
    }
    send_json(res, 201, summary_of(*stored));
  }

  void post_analysis(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = req.body.empty() ? json::object() : json::parse(req.body);
    } catch (const json::parse_error& e) {
      return send_json(res, 400, error_body(std::string("malformed JSON: ") + e.what()));
    }
    if (!body.is_object()) return send_json(res, 400, error_body("body must be a JSON object"));
    if (!body.contains("log_id") || !body["log_id"].is_string())
      return send_json(res, 422, {{"error", "log_id is required"}, {"field", "log_id"}});
    auto log = find_log(body["log_id"].get<std::string>());
    if (!log) return send_json(res, 404, error_body("unknown log " + body["log_id"].get<std::string>()));

    AnalysisParams params;
    try {
      params = resolve_params(log->log, params_from_json(body.value("params", json(nullptr))));
    } catch (const ParamError& e) {
      return send_json(res, 422, {{"error", e.what()}, {"field", e.field()}});
    }

    auto job = std::make_shared<Job>();
    job->log = log;
    job->params = params;
    job->params_echo = params_to_json(params);
    job->created_at = now_iso();
    {
      std::lock_guard lock(jobs_mu);
      const auto n = ++job_counter;
      job->id = sha256_hex(log->id + job->params_echo.dump() + job->created_at + std::to_string(n))
                    .substr(0, 20);
      jobs.emplace(job->id, job);
    }
    {
      std::lock_guard lock(queue_mu);
      queue.push_back(job);
    }
    queue_cv.notify_one();
    send_json(res, 202, handle_of(*job));
  }

  // Resolves the job and its finished outputs, or writes the 404/409 response.
  std::shared_ptr<const Outputs> done_outputs(const std::string& id, httplib::Response& res) {
    auto job = find_job(id);
    if (!job) {
      send_json(res, 404, error_body("unknown analysis " + id));
      return nullptr;
    }
    std::lock_guard lock(job->mu);
    if (job->state != JobState::done) {
      json body = error_body("analysis is " + std::string(to_string(job->state)));
      body["state"] = std::string(to_string(job->state));
      if (job->state == JobState::failed) body["detail"] = job->error;
      send_json(res, 409, body);
      return nullptr;
    }
    return job->outputs;
  }

  const BehaviorCluster* find_cluster(const Outputs& out, const std::string& k,
                                      httplib::Response& res) {
    const BehaviorCluster* c = nullptr;
    try {
      std::size_t used = 0;
      const int id = std::stoi(k, &used);
      if (used == k.size()) c = out.report.find_cluster(id);
    } catch (const std::exception&) {
    }
    if (!c) send_json(res, 404, error_body("unknown cluster " + k));
    return c;
  }

  void routes() {
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                    std::exception_ptr ep) {
      std::string msg = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        msg = e.what();
      } catch (...) {
      }
      send_json(res, 500, error_body(msg));
    });

    server.Get("/openapi.json", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, openapi_document());
    });
    server.Post("/logs", [this](const httplib::Request& req, httplib::Response& res) {
      post_log(req, res);
    });
    server.Get(R"(/logs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto log = find_log(req.matches[1]);
      if (!log) return send_json(res, 404, error_body("unknown log"));
      send_json(res, 200, summary_of(*log));
    });
    server.Post("/analyses", [this](const httplib::Request& req, httplib::Response& res) {
      post_analysis(req, res);
    });
    server.Get(R"(/analyses/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto job = find_job(req.matches[1]);
      if (!job) return send_json(res, 404, error_body("unknown analysis"));
      send_json(res, 200, handle_of(*job));
    });
    server.Delete(R"(/analyses/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto job = find_job(req.matches[1]);
      if (!job) return send_json(res, 404, error_body("unknown analysis"));
      job->cancel = true;
      {
        std::lock_guard lock(job->mu);
        if (job->state == JobState::pending) {
          job->state = JobState::failed;
          job->error = "analysis cancelled";
        }
      }
      send_json(res, 200, handle_of(*job));
    });

    server.Get(R"(/analyses/([^/]+)/report)", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto out = done_outputs(req.matches[1], res)) res.set_content(out->report_json, "application/json");
    });
    server.Get(R"(/analyses/([^/]+)/driftmap)", [this](const httplib::Request& req, httplib::Response& res) {
      auto out = done_outputs(req.matches[1], res);
      if (!out) return;
      if (accepts(req, "image/svg+xml")) res.set_content(out->driftmap_svg, "image/svg+xml");
      else res.set_content(out->layout_json, "application/json");
    });
    server.Get(R"(/analyses/([^/]+)/clusters)", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto out = done_outputs(req.matches[1], res)) res.set_content(out->clusters_json, "application/json");
    });
    server.Get(R"(/analyses/([^/]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto out = done_outputs(req.matches[1], res)) res.set_content(out->metrics_json, "application/json");
    });
    server.Get(R"(/analyses/([^/]+)/clusters/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 auto out = done_outputs(req.matches[1], res);
                 if (!out) return;
                 if (auto c = find_cluster(*out, req.matches[2], res)) {
                   auto j = cluster_to_json(out->report, *c);
                   j["constraints"] = constraints_json(out->report, *c);
                   send_json(res, 200, j);
                 }
               });
    server.Get(R"(/analyses/([^/]+)/clusters/([^/]+)/(chart|acf|constraints|edfg))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 auto out = done_outputs(req.matches[1], res);
                 if (!out) return;
                 auto c = find_cluster(*out, req.matches[2], res);
                 if (!c) return;
                 const auto& r = out->report;
                 const std::string view = req.matches[3];
                 if (view == "chart") {
                   if (accepts(req, "image/svg+xml"))
                     res.set_content(render_drift_chart_svg(r, *c), "image/svg+xml");
                   else
                     send_json(res, 200, drift_chart_data(r, *c));
                 } else if (view == "acf") {
                   if (accepts(req, "image/svg+xml")) {
                     res.set_content(render_acf_svg(*c), "image/svg+xml");
                   } else {
                     send_json(res, 200, cluster_to_json(r, *c)["acf"]);
                   }
                 } else if (view == "constraints") {
                   if (accepts(req, "text/csv")) res.set_content(constraints_csv(r, *c), "text/csv");
                   else send_json(res, 200, constraints_json(r, *c));
                 } else {
                   const auto& e = r.edfgs[r.cluster_position(c->id)];
                   if (accepts(req, "text/vnd.graphviz")) res.set_content(edfg_to_dot(e), "text/vnd.graphviz");
                   else send_json(res, 200, edfg_to_json(e));
                 }
               });
  }
};

Service::Service(ServiceConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
Service::~Service() = default;

bool Service::bind(const std::string& host, int port) {
  return impl_->server.bind_to_port(host, port);
}
int Service::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool Service::run() { return impl_->server.listen_after_bind(); }
void Service::stop() { impl_->server.stop(); }
void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }
const ServiceConfig& Service::config() const { return impl_->cfg; }

}  // namespace procdrift
