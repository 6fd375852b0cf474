#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "procdrift/log_io.hpp"
#include "procdrift/render.hpp"
#include "procdrift/report.hpp"
#include "procdrift/synthetic.hpp"
#include "procdrift/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace procdrift;

namespace {

constexpr int kExitParse = 1;
constexpr int kExitParams = 2;

bool write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    std::cerr << "error: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

struct AnalyzeOptions {
  std::string log;
  std::string out = "out";
  std::optional<std::size_t> win_size, win_step;
  std::string templates;
  std::optional<double> cut_threshold;
  std::string penalty;
  std::string cost, linkage, metric;
  std::optional<double> auto_scale;
  unsigned threads = 0;
  std::string format = "text";
  CsvMapping csv;
};

int run_analyze(const AnalyzeOptions& o) {
  EventLog log;
  try {
    log = read_log_file(o.log, o.csv);
  } catch (const ParseError& e) {
    std::cerr << "error: " << o.log << (e.line() ? ":" + std::to_string(e.line()) : "") << ": "
              << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << o.log << ": " << e.what() << "\n";
    return kExitParse;
  }

  json pj = json::object();
  if (o.win_size) pj["win_size"] = *o.win_size;
  if (o.win_step) pj["win_step"] = *o.win_step;
  if (o.win_size && !o.win_step) {
    std::cerr << "error: --win-size requires --win-step\n";
    return kExitParams;
  }
  if (o.win_step && !o.win_size) {
    std::cerr << "error: --win-step requires --win-size\n";
    return kExitParams;
  }
  if (!o.templates.empty()) pj["templates"] = o.templates;
  if (o.cut_threshold) pj["cut_threshold"] = *o.cut_threshold;
  if (!o.penalty.empty()) {
    if (o.penalty == "auto") {
      pj["penalty"] = "auto";
    } else {
      char* end = nullptr;
      const double v = std::strtod(o.penalty.c_str(), &end);
      if (end == o.penalty.c_str() || *end) {
        std::cerr << "error: --penalty must be 'auto' or a number\n";
        return kExitParams;
      }
      pj["penalty"] = v;
    }
  }
  if (!o.cost.empty()) pj["cost"] = o.cost;
  if (!o.linkage.empty()) pj["linkage"] = o.linkage;
  if (!o.metric.empty()) pj["metric"] = o.metric;
  if (o.auto_scale) pj["auto_scale"] = *o.auto_scale;

  AnalysisParams params;
  DriftReport report;
  try {
    params = params_from_json(pj);
    params.threads = o.threads;
    report = analyze(log, params);
  } catch (const ParamError& e) {
    std::cerr << "error: invalid " << e.field() << ": " << e.what() << "\n";
    return kExitParams;
  } catch (const AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.step() == 2 ? kExitParams : kExitParse;
  }

  const fs::path dir = o.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << dir.string() << ": " << ec.message() << "\n";
    return kExitParse;
  }
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, std::string_view content) {
    if (!write_file(dir / name, content)) return false;
    files.push_back(name);
    return true;
  };
  bool ok = emit("report.json", serialize_report(report)) &&
            emit("driftmap.svg", render_drift_map_svg(report)) &&
            emit("driftmap.json", drift_map_layout(report).dump(2) + "\n");
  for (std::size_t i = 0; ok && i < report.clusters.size(); ++i) {
    const auto& c = report.clusters[i];
    const std::string k = std::to_string(c.id);
    ok = emit("chart-" + k + ".svg", render_drift_chart_svg(report, c)) &&
         emit("acf-" + k + ".svg", render_acf_svg(c)) &&
         emit("constraints-" + k + ".csv", constraints_csv(report, c)) &&
         emit("edfg-" + k + ".dot", edfg_to_dot(report.edfgs[i]));
  }
  if (!ok) return kExitParse;

  if (o.format == "json") {
    json s;
    s["out"] = dir.string();
    s["traces"] = report.traces;
    s["windows"] = report.windows.size();
    s["win_size"] = report.params.window->win_size;
    s["win_step"] = report.params.window->win_step;
    s["constraints"] = report.rows.size();
    s["spread"] = report.spread;
    s["global_change_points"] = report.global_change_points;
    auto& cl = s["clusters"] = json::array();
    for (const auto& c : report.clusters) {
      json tags = json::array();
      for (auto t : c.tags) tags.push_back(std::string(to_string(t)));
      cl.push_back({{"id", c.id}, {"size", c.members.size()}, {"erratic", c.erratic}, {"tags", tags}});
    }
    s["files"] = files;
    std::cout << s.dump(2) << "\n";
  } else {
    std::cout << report.traces << " traces, " << report.windows.size() << " windows (size "
              << report.params.window->win_size << ", step " << report.params.window->win_step
              << "), " << report.rows.size() << " constraint series, " << report.clusters.size()
              << " clusters\n";
    std::cout << "global change points:";
    for (int cp : report.global_change_points) std::cout << ' ' << cp;
    std::cout << "\nspread: " << report.spread << "\n";
    for (const auto& c : report.clusters) {
      std::cout << "  cluster " << c.id << ": " << c.members.size() << " constraints, erratic "
                << c.erratic << ", tags";
      for (auto t : c.tags) std::cout << ' ' << to_string(t);
      std::cout << "\n";
    }
    std::cout << "wrote " << files.size() << " files to " << dir.string() << "\n";
  }
  return 0;
}

int write_log(const EventLog& log, const fs::path& path) {
  const auto ext = path.extension().string();
  std::string text;
  if (ext == ".json") text = log_to_json(log).dump(1) + "\n";
  else text = write_xes(log);
  return write_file(path, text) ? 0 : kExitParse;
}

std::vector<double> parse_fractions(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end) throw std::invalid_argument("invalid fraction '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int run_serve(ServiceConfig cfg) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  std::pair<std::string, int> addr;
  try {
    addr = parse_bind_addr(cfg.bind_addr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParams;
  }
  std::unique_ptr<Service> service;
  try {
    service = std::make_unique<Service>(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  if (!service->bind(addr.first, addr.second)) {
    std::cerr << "error: cannot bind " << cfg.bind_addr << " (address in use?)\n";
    return kExitParse;
  }
  std::cerr << "listening on " << addr.first << ":" << addr.second << ", data dir "
            << cfg.data_dir.string() << "\n";
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    service->stop();
  });
  service->run();
  // Unblock the waiter when the server stopped for another reason.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept drift detection in event logs via Declare constraint series"};
  app.require_subcommand(1);

  AnalyzeOptions ao;
  auto* analyze_cmd = app.add_subcommand("analyze", "Run the drift analysis and write the report and figures");
  analyze_cmd->add_option("--log", ao.log, "XES, CSV or JSON event log")->required();
  analyze_cmd->add_option("--out", ao.out, "Output directory")->capture_default_str();
  analyze_cmd->add_option("--win-size", ao.win_size, "Traces per window");
  analyze_cmd->add_option("--win-step", ao.win_step, "Window shift in traces");
  analyze_cmd->add_option("--templates", ao.templates, "Comma-separated template kinds");
  analyze_cmd->add_option("--cut-threshold", ao.cut_threshold, "Dendrogram cut height");
  analyze_cmd->add_option("--penalty", ao.penalty, "Change-point penalty: auto or a number");
  analyze_cmd->add_option("--auto-scale", ao.auto_scale, "Scale of the automatic penalty");
  analyze_cmd->add_option("--cost", ao.cost, "kernel-rbf, kernel-linear or l2-mean");
  analyze_cmd->add_option("--linkage", ao.linkage, "ward or weighted");
  analyze_cmd->add_option("--metric", ao.metric, "euclidean or correlation");
  analyze_cmd->add_option("--threads", ao.threads, "Worker threads (0: all cores)");
  analyze_cmd->add_option("--format", ao.format, "Summary format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  analyze_cmd->add_option("--case-col", ao.csv.case_col, "CSV case column")->capture_default_str();
  analyze_cmd->add_option("--activity-col", ao.csv.activity_col, "CSV activity column")->capture_default_str();
  analyze_cmd->add_option("--time-col", ao.csv.time_col, "CSV timestamp column")->capture_default_str();
  analyze_cmd->add_option("--time-format", ao.csv.time_format, "CSV timestamp format (strftime or iso8601)")
      ->capture_default_str();

  std::string inj_log, inj_kind, inj_at, inj_out, inj_truth;
  std::uint64_t inj_seed = 1;
  auto* inject_cmd = app.add_subcommand("inject-drift", "Write a copy of a log with drifts inserted");
  inject_cmd->add_option("--log", inj_log, "Source log")->required();
  inject_cmd->add_option("--kind", inj_kind, "sudden, gradual, incremental or reoccurring")->required();
  inject_cmd->add_option("--at", inj_at, "Comma-separated fractions in (0,1)")->required();
  inject_cmd->add_option("--out", inj_out, "Output log (.xes or .json)")->required();
  inject_cmd->add_option("--truth", inj_truth, "Ground-truth JSON (default: <out>.truth.json)");
  inject_cmd->add_option("--seed", inj_seed, "Random seed")->capture_default_str();

  GeneratorConfig gen;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Simulate a random block-structured process");
  gen_cmd->add_option("--traces", gen.traces)->capture_default_str();
  gen_cmd->add_option("--activities", gen.activities)->capture_default_str();
  gen_cmd->add_flag("--loop", gen.loop, "Put one block in a loop");
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output log (.xes or .json)")->required();

  ServiceConfig scfg = ServiceConfig::from_env();
  double max_mb = static_cast<double>(scfg.max_upload_bytes) / (1024.0 * 1024.0);
  std::string data_dir = scfg.data_dir.string();
  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
  serve_cmd->add_option("--bind", scfg.bind_addr, "host:port (env BIND_ADDR)")->capture_default_str();
  serve_cmd->add_option("--data-dir", data_dir, "Storage directory (env DATA_DIR)")->capture_default_str();
  serve_cmd->add_option("--max-upload-mb", max_mb, "Upload limit (env MAX_UPLOAD_MB)")->capture_default_str();
  serve_cmd->add_option("--workers", scfg.workers, "Concurrent analyses (0: CPU count)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParams;
  }

  if (*analyze_cmd) return run_analyze(ao);

  if (*inject_cmd) {
    auto kind = parse_drift_kind(inj_kind);
    if (!kind) {
      std::cerr << "error: unknown drift kind '" << inj_kind << "'\n";
      return kExitParams;
    }
    std::vector<double> fractions;
    try {
      fractions = parse_fractions(inj_at);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitParams;
    }
    EventLog log;
    try {
      log = read_log_file(inj_log);
    } catch (const std::exception& e) {
      std::cerr << "error: " << inj_log << ": " << e.what() << "\n";
      return kExitParse;
    }
    InjectedDrift drift;
    try {
      drift = inject_drift(log, *kind, fractions, inj_seed);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitParams;
    }
    if (int rc = write_log(drift.log, inj_out)) return rc;
    const std::string truth = inj_truth.empty() ? inj_out + ".truth.json" : inj_truth;
    return write_file(truth, ground_truth_json(drift).dump(2) + "\n") ? 0 : kExitParse;
  }

  if (*gen_cmd) {
    try {
      return write_log(generate_log(gen), gen_out);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitParams;
    }
  }

  scfg.data_dir = data_dir;
  if (max_mb > 0) scfg.max_upload_bytes = static_cast<std::size_t>(max_mb * 1024 * 1024);
  return run_serve(scfg);
}
