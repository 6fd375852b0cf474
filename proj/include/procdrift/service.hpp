#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

namespace procdrift {

struct ServiceConfig {
  std::filesystem::path data_dir = "data";
  std::string bind_addr = "127.0.0.1:8080";
  std::size_t max_upload_bytes = 200u * 1024u * 1024u;
  unsigned workers = 0;  ///< 0: hardware concurrency

  /// Defaults overridden by DATA_DIR, BIND_ADDR and MAX_UPLOAD_MB when set.
  static ServiceConfig from_env();
};

/// "host:port" split; a bare port binds 127.0.0.1. Throws std::invalid_argument.
std::pair<std::string, int> parse_bind_addr(const std::string& addr);

/// Hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

nlohmann::json openapi_document();

/// HTTP facade over analyze(). Logs and finished reports are stored under
/// data_dir; analyses run on a bounded worker pool.
class Service {
 public:
  /// Creates data_dir and checks it is writable; throws std::runtime_error otherwise.
  explicit Service(ServiceConfig cfg);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket; false when the address is unavailable.
  bool bind(const std::string& host, int port);
  /// Binds an ephemeral port and returns it (-1 on failure).
  int bind_any(const std::string& host);
  /// Serves until stop(). Requires a successful bind.
  bool run();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

  const ServiceConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace procdrift
