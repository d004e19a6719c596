#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clickbench/backend.hpp"

namespace clickbench {

struct CdpOptions {
  Viewport viewport;
  double device_pixel_ratio = 1.0;
  std::chrono::milliseconds connect_timeout{10000};
  std::chrono::milliseconds command_timeout{10000};
  std::chrono::milliseconds navigation_timeout{15000};
};

struct WsUrl {
  std::string scheme;
  std::string host;
  std::string port;
  std::string target;
};

/// Splits "ws://host:port/path" or "http://host:port[/path]". Throws
/// ConnectFailed on anything else.
WsUrl parse_endpoint_url(const std::string& url);

/// ws:// endpoints are returned unchanged; http:// endpoints are resolved
/// through GET /json/version (webSocketDebuggerUrl). Throws ConnectFailed.
std::string resolve_websocket_url(const std::string& endpoint, std::chrono::milliseconds timeout);

/// One page target driven over its own browser-level WebSocket connection
/// with a flattened target session. Commands are strictly sequential.
class BrowserSession {
 public:
  /// Creates and attaches a blank page target and applies the viewport
  /// metrics. Throws ConnectFailed or ProtocolError.
  static std::unique_ptr<BrowserSession> connect(const std::string& endpoint, const CdpOptions& options);
  ~BrowserSession();

  BrowserSession(const BrowserSession&) = delete;
  BrowserSession& operator=(const BrowserSession&) = delete;

  const std::string& websocket_url() const { return ws_url_; }
  const std::string& target_id() const { return target_id_; }
  double device_pixel_ratio() const { return options_.device_pixel_ratio; }
  Viewport viewport() const { return options_.viewport; }
  /// False once a transport error or timeout has broken the connection.
  bool healthy() const;

  /// Sends {id, method, params[, sessionId]} and waits for the matching
  /// response. Error responses and malformed frames throw ProtocolError.
  nlohmann::json call(const std::string& method, const nlohmann::json& params = nlohmann::json::object(),
                      bool page_scoped = true);

  /// Loads a file:// URL and waits for the load event. Throws LoadFailed or
  /// NavigationTimeout.
  void navigate(const std::filesystem::path& snapshot);
  /// RGBA raster at exactly the viewport size, in CSS pixels.
  Raster capture_screenshot();
  /// Bounding client rect of the first match. Throws NotFound or ZeroArea.
  BoundingBox query_xpath_geometry(const std::string& xpath);
  ExclusionVerdict detect_exclusion(const TaskSpec& task);
  /// Runtime.evaluate with returnByValue; script exceptions throw ProtocolError.
  nlohmann::json evaluate(const std::string& expression);

 private:
  struct Transport;

  BrowserSession(std::unique_ptr<Transport> transport, std::string ws_url, CdpOptions options);
  /// nullopt when the deadline passes; the session is unusable afterwards.
  std::optional<nlohmann::json> read_frame(std::chrono::steady_clock::time_point deadline);
  void write_frame(const std::string& text);
  bool wait_event(const std::string& method, std::chrono::steady_clock::time_point deadline);

  std::unique_ptr<Transport> transport_;
  std::string ws_url_;
  CdpOptions options_;
  std::string target_id_;
  std::string session_id_;
  std::int64_t next_id_ = 0;
  std::deque<nlohmann::json> events_;
};

/// Page backend over one BrowserSession; reconnects after a failed session.
class CdpBackend final : public PageBackend {
 public:
  CdpBackend(std::string endpoint, CdpOptions options = {});

  Viewport viewport() const override { return options_.viewport; }
  void load(const TaskSpec& task) override;
  std::shared_ptr<const Raster> screenshot() override;
  ExclusionVerdict detect_exclusion(const TaskSpec& task) override;

  BrowserSession& session();

 private:
  std::string endpoint_;
  CdpOptions options_;
  std::unique_ptr<BrowserSession> session_;
  std::optional<std::filesystem::path> loaded_;
  std::shared_ptr<const Raster> cached_;
};

BackendFactory cdp_backend_factory(std::string endpoint, CdpOptions options = {});

/// CLICKBENCH_CHROME, else the first chromium/chrome binary on PATH.
std::optional<std::filesystem::path> find_browser();

/// Headless browser child process with remote debugging on an ephemeral port.
class BrowserProcess {
 public:
  /// Throws ConnectFailed when the browser does not report its endpoint in time.
  static std::unique_ptr<BrowserProcess> launch(const std::filesystem::path& executable,
                                                std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~BrowserProcess();

  BrowserProcess(const BrowserProcess&) = delete;
  BrowserProcess& operator=(const BrowserProcess&) = delete;

  /// ws:// browser endpoint.
  const std::string& endpoint() const { return endpoint_; }

 private:
  BrowserProcess() = default;

  int pid_ = -1;
  std::string endpoint_;
  std::filesystem::path profile_dir_;
};

}  // namespace clickbench
