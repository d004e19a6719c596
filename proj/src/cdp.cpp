#include "clickbench/cdp.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <cstdlib>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <thread>

#include "clickbench/codec.hpp"
#include "clickbench/error.hpp"

namespace clickbench {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct BrowserSession::Transport {
  net::io_context ioc;
  websocket::stream<beast::tcp_stream> ws{ioc};
  beast::flat_buffer buffer;
  bool broken = false;
};

namespace {

constexpr std::size_t kMaxBufferedEvents = 1024;

template <typename Start>
beast::error_code run_op(net::io_context& ioc, beast::tcp_stream& stream, Clock::duration timeout, Start start) {
  stream.expires_after(timeout);
  beast::error_code result;
  start([&result](beast::error_code ec, auto&&...) { result = ec; });
  ioc.restart();
  ioc.run();
  return result;
}

tcp::resolver::results_type resolve(net::io_context& ioc, const WsUrl& u) {
  tcp::resolver resolver(ioc);
  beast::error_code ec;
  auto results = resolver.resolve(u.host, u.port, ec);
  if (ec) throw Error(Errc::ConnectFailed, "cannot resolve " + u.host + ": " + ec.message());
  return results;
}

void connect_stream(net::io_context& ioc, beast::tcp_stream& stream, const WsUrl& u, Clock::duration timeout) {
  const auto results = resolve(ioc, u);
  const auto ec = run_op(ioc, stream, timeout, [&](auto handler) { stream.async_connect(results, handler); });
  if (ec) throw Error(Errc::ConnectFailed, "cannot connect to " + u.host + ":" + u.port + ": " + ec.message());
}

std::string http_get(const WsUrl& u, const std::string& target, Clock::duration timeout) {
  net::io_context ioc;
  beast::tcp_stream stream(ioc);
  connect_stream(ioc, stream, u, timeout);
  http::request<http::empty_body> req{http::verb::get, target, 11};
  req.set(http::field::host, u.host + ":" + u.port);
  auto ec = run_op(ioc, stream, timeout, [&](auto handler) { http::async_write(stream, req, handler); });
  if (ec) throw Error(Errc::ConnectFailed, "discovery request failed: " + ec.message());
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  ec = run_op(ioc, stream, timeout, [&](auto handler) { http::async_read(stream, buffer, res, handler); });
  if (ec) throw Error(Errc::ConnectFailed, "discovery response failed: " + ec.message());
  if (res.result_int() != 200) {
    throw Error(Errc::ConnectFailed, "discovery returned HTTP " + std::to_string(res.result_int()));
  }
  return res.body();
}

std::string js_string(const std::string& s) { return json(s).dump(); }

std::string file_url(const std::filesystem::path& path) {
  static const char* hex = "0123456789ABCDEF";
  std::string out = "file://";
  for (unsigned char c : std::filesystem::absolute(path).lexically_normal().string()) {
    if (std::isalnum(c) || c == '/' || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

Raster resize_nearest(const Raster& src, int w, int h) {
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(src.height() - 1, static_cast<int>((y + 0.5) * src.height() / h));
    for (int x = 0; x < w; ++x) {
      const int sx = std::min(src.width() - 1, static_cast<int>((x + 0.5) * src.width() / w));
      out.set(x, y, src.at(sx, sy));
    }
  }
  return out;
}

template <typename F>
auto protocol_guard(const char* what, F f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::ProtocolError, std::string(what) + ": unexpected response shape: " + e.what());
  }
}

const char* kLocateScript = R"JS((function (xp) {
  var n;
  try {
    n = document.evaluate(xp, document, null, XPathResult.FIRST_ORDERED_NODE_TYPE, null).singleNodeValue;
  } catch (e) {
    return {found: false};
  }
  if (!n) return {found: false};
  var el = n.nodeType === 1 ? n : n.parentElement;
  if (!el) return {found: false};
  var r = el.getBoundingClientRect();
  var out = {found: true, x: r.left, y: r.top, w: r.width, h: r.height};
  if (WITH_HIT) {
    var text = el.innerText;
    if (!text) text = el.value || el.getAttribute('aria-label') || el.getAttribute('alt') || el.textContent || '';
    out.text = String(text);
    var hit = (r.width > 0 && r.height > 0) ? document.elementFromPoint(r.left + r.width / 2, r.top + r.height / 2) : null;
    out.hit_inside = !!hit && el.contains(hit);
  }
  return out;
}))JS";

std::string locate_expression(const std::string& xpath, bool with_hit) {
  std::string script = kLocateScript;
  const std::string key = "WITH_HIT";
  script.replace(script.find(key), key.size(), with_hit ? "true" : "false");
  return script + "(" + js_string(xpath) + ")";
}

}  // namespace

WsUrl parse_endpoint_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::ConnectFailed, "endpoint lacks a scheme: " + url);
  WsUrl u;
  u.scheme = url.substr(0, scheme_end);
  if (u.scheme != "ws" && u.scheme != "http") throw Error(Errc::ConnectFailed, "unsupported scheme: " + u.scheme);
  const auto rest = url.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  const auto authority = rest.substr(0, slash);
  u.target = slash == std::string::npos ? "/" : rest.substr(slash);
  const auto colon = authority.rfind(':');
  if (colon == std::string::npos) {
    u.host = authority;
    u.port = "80";
  } else {
    u.host = authority.substr(0, colon);
    u.port = authority.substr(colon + 1);
  }
  if (u.host.empty() || u.port.empty()) throw Error(Errc::ConnectFailed, "malformed endpoint: " + url);
  return u;
}

std::string resolve_websocket_url(const std::string& endpoint, std::chrono::milliseconds timeout) {
  const WsUrl u = parse_endpoint_url(endpoint);
  if (u.scheme == "ws") return endpoint;
  const auto body = http_get(u, "/json/version", timeout);
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("webSocketDebuggerUrl") ||
      !j["webSocketDebuggerUrl"].is_string()) {
    throw Error(Errc::ConnectFailed, "/json/version lacks webSocketDebuggerUrl");
  }
  return j["webSocketDebuggerUrl"].get<std::string>();
}

BrowserSession::BrowserSession(std::unique_ptr<Transport> transport, std::string ws_url, CdpOptions options)
    : transport_(std::move(transport)), ws_url_(std::move(ws_url)), options_(options) {}

std::unique_ptr<BrowserSession> BrowserSession::connect(const std::string& endpoint, const CdpOptions& options) {
  if (options.viewport.width <= 0 || options.viewport.height <= 0 || !(options.device_pixel_ratio > 0.0)) {
    throw Error(Errc::InvalidArguments, "viewport and device pixel ratio must be positive");
  }
  const std::string ws_url = resolve_websocket_url(endpoint, options.connect_timeout);
  const WsUrl u = parse_endpoint_url(ws_url);

  auto transport = std::make_unique<Transport>();
  auto& lowest = beast::get_lowest_layer(transport->ws);
  connect_stream(transport->ioc, lowest, u, options.connect_timeout);
  transport->ws.read_message_max(256u << 20);
  const auto ec = run_op(transport->ioc, lowest, options.connect_timeout, [&](auto handler) {
    transport->ws.async_handshake(u.host + ":" + u.port, u.target, handler);
  });
  if (ec) throw Error(Errc::ConnectFailed, "websocket handshake failed: " + ec.message());

  std::unique_ptr<BrowserSession> s(new BrowserSession(std::move(transport), ws_url, options));
  protocol_guard("connect", [&] {
    s->target_id_ = s->call("Target.createTarget", {{"url", "about:blank"}}, false).at("targetId").get<std::string>();
    s->session_id_ = s->call("Target.attachToTarget", {{"targetId", s->target_id_}, {"flatten", true}}, false)
                         .at("sessionId")
                         .get<std::string>();
    return 0;
  });
  s->call("Page.enable");
  s->call("Emulation.setDeviceMetricsOverride", {{"width", options.viewport.width},
                                                 {"height", options.viewport.height},
                                                 {"deviceScaleFactor", options.device_pixel_ratio},
                                                 {"mobile", false}});
  return s;
}

BrowserSession::~BrowserSession() {
  if (!transport_ || transport_->broken) return;
  try {
    if (!target_id_.empty()) {
      options_.command_timeout = std::chrono::milliseconds(2000);
      call("Target.closeTarget", {{"targetId", target_id_}}, false);
    }
    auto& lowest = beast::get_lowest_layer(transport_->ws);
    run_op(transport_->ioc, lowest, std::chrono::seconds(2),
           [&](auto handler) { transport_->ws.async_close(websocket::close_code::normal, handler); });
  } catch (...) {
  }
}

bool BrowserSession::healthy() const { return transport_ && !transport_->broken; }

void BrowserSession::write_frame(const std::string& text) {
  if (!healthy()) throw Error(Errc::ProtocolError, "session is closed");
  auto& lowest = beast::get_lowest_layer(transport_->ws);
  transport_->ws.text(true);
  const auto ec = run_op(transport_->ioc, lowest, options_.command_timeout,
                         [&](auto handler) { transport_->ws.async_write(net::buffer(text), handler); });
  if (ec) {
    transport_->broken = true;
    throw Error(Errc::ProtocolError, "websocket write failed: " + ec.message());
  }
}

std::optional<json> BrowserSession::read_frame(Clock::time_point deadline) {
  if (!healthy()) throw Error(Errc::ProtocolError, "session is closed");
  const auto remaining = deadline - Clock::now();
  if (remaining <= Clock::duration::zero()) return std::nullopt;
  auto& lowest = beast::get_lowest_layer(transport_->ws);
  transport_->buffer.clear();
  const auto ec = run_op(transport_->ioc, lowest, remaining,
                         [&](auto handler) { transport_->ws.async_read(transport_->buffer, handler); });
  if (ec == beast::error::timeout) {
    transport_->broken = true;
    return std::nullopt;
  }
  if (ec) {
    transport_->broken = true;
    throw Error(Errc::ProtocolError, "websocket read failed: " + ec.message());
  }
  auto j = json::parse(beast::buffers_to_string(transport_->buffer.data()), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::ProtocolError, "malformed frame");
  return j;
}

json BrowserSession::call(const std::string& method, const json& params, bool page_scoped) {
  const std::int64_t id = ++next_id_;
  json msg{{"id", id}, {"method", method}, {"params", params}};
  if (page_scoped && !session_id_.empty()) msg["sessionId"] = session_id_;
  write_frame(msg.dump());

  const auto deadline = Clock::now() + options_.command_timeout;
  for (;;) {
    auto frame = read_frame(deadline);
    if (!frame) throw Error(Errc::Timeout, "no response to " + method);
    if (frame->contains("id")) {
      const auto& jid = (*frame)["id"];
      if (!jid.is_number_integer()) throw Error(Errc::ProtocolError, "non-integer response id");
      if (jid.get<std::int64_t>() != id) continue;
      if (frame->contains("error")) {
        const auto& err = (*frame)["error"];
        const std::string text = err.is_object() && err.contains("message") ? err["message"].dump() : err.dump();
        throw Error(Errc::ProtocolError, method + " failed: " + text);
      }
      if (!frame->contains("result") || !(*frame)["result"].is_object()) {
        throw Error(Errc::ProtocolError, method + ": response without result");
      }
      return std::move((*frame)["result"]);
    }
    if (frame->contains("method")) {
      if (events_.size() >= kMaxBufferedEvents) events_.pop_front();
      events_.push_back(std::move(*frame));
      continue;
    }
    throw Error(Errc::ProtocolError, "frame is neither response nor event");
  }
}

bool BrowserSession::wait_event(const std::string& method, Clock::time_point deadline) {
  auto matches = [&](const json& e) {
    if (!e.contains("method") || e["method"] != method) return false;
    if (session_id_.empty()) return true;
    return e.contains("sessionId") && e["sessionId"] == session_id_;
  };
  for (auto it = events_.begin(); it != events_.end(); ++it) {
    if (matches(*it)) {
      events_.erase(it);
      return true;
    }
  }
  for (;;) {
    auto frame = read_frame(deadline);
    if (!frame) return false;
    if (matches(*frame)) return true;
    if (!frame->contains("id") && !frame->contains("method")) {
      throw Error(Errc::ProtocolError, "frame is neither response nor event");
    }
  }
}

void BrowserSession::navigate(const std::filesystem::path& snapshot) {
  if (!std::filesystem::is_regular_file(snapshot)) {
    throw Error(Errc::LoadFailed, "snapshot not found: " + snapshot.string());
  }
  events_.clear();
  const auto result = call("Page.navigate", {{"url", file_url(snapshot)}});
  if (result.contains("errorText") && result["errorText"].is_string() && !result["errorText"].get<std::string>().empty()) {
    throw Error(Errc::LoadFailed, "navigation failed: " + result["errorText"].get<std::string>());
  }
  if (!wait_event("Page.loadEventFired", Clock::now() + options_.navigation_timeout)) {
    throw Error(Errc::NavigationTimeout, "no load event for " + snapshot.string());
  }
}

Raster BrowserSession::capture_screenshot() {
  const auto& vp = options_.viewport;
  const auto result = call("Page.captureScreenshot", {{"format", "png"},
                                                      {"fromSurface", true},
                                                      {"captureBeyondViewport", false},
                                                      {"clip",
                                                       {{"x", 0},
                                                        {"y", 0},
                                                        {"width", vp.width},
                                                        {"height", vp.height},
                                                        {"scale", 1.0 / options_.device_pixel_ratio}}}});
  const auto data = protocol_guard("Page.captureScreenshot", [&] { return result.at("data").get<std::string>(); });
  Raster raster;
  try {
    raster = decode_png(base64_decode(data));
  } catch (const Error& e) {
    throw Error(Errc::ProtocolError, std::string("undecodable screenshot: ") + e.what());
  }
  if (raster.width() != vp.width || raster.height() != vp.height) return resize_nearest(raster, vp.width, vp.height);
  return raster;
}

json BrowserSession::evaluate(const std::string& expression) {
  const auto result = call("Runtime.evaluate", {{"expression", expression}, {"returnByValue", true}});
  if (result.contains("exceptionDetails")) {
    throw Error(Errc::ProtocolError, "script raised: " + result["exceptionDetails"].dump());
  }
  return protocol_guard("Runtime.evaluate", [&] {
    const auto& r = result.at("result");
    return r.contains("value") ? r["value"] : json();
  });
}

BoundingBox BrowserSession::query_xpath_geometry(const std::string& xpath) {
  const auto v = evaluate(locate_expression(xpath, false));
  return protocol_guard("query_xpath_geometry", [&] {
    if (!v.at("found").get<bool>()) throw Error(Errc::NotFound, "xpath matched nothing: " + xpath);
    BoundingBox b{v.at("x").get<double>(), v.at("y").get<double>(), v.at("w").get<double>(), v.at("h").get<double>()};
    if (b.w <= 0 || b.h <= 0) throw Error(Errc::ZeroArea, "xpath matched an element without area: " + xpath);
    return b;
  });
}

ExclusionVerdict BrowserSession::detect_exclusion(const TaskSpec& task) {
  const auto v = evaluate(locate_expression(task.target_locator, true));
  return protocol_guard("detect_exclusion", [&] {
    if (!v.at("found").get<bool>()) return ExclusionVerdict::NotFound;
    if (!visible_text_matches(v.at("text").get<std::string>(), task.target_text)) return ExclusionVerdict::Replaced;
    if (!v.at("hit_inside").get<bool>()) return ExclusionVerdict::Occluded;
    return ExclusionVerdict::Ok;
  });
}

CdpBackend::CdpBackend(std::string endpoint, CdpOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {}

BrowserSession& CdpBackend::session() {
  if (!session_ || !session_->healthy()) {
    session_.reset();
    cached_.reset();
    session_ = BrowserSession::connect(endpoint_, options_);
    if (loaded_) session_->navigate(*loaded_);
  }
  return *session_;
}

void CdpBackend::load(const TaskSpec& task) {
  cached_.reset();
  loaded_.reset();
  if (task.page.kind != PageKind::Snapshot) {
    throw Error(Errc::LoadFailed, "the cdp backend only loads HTML snapshots: " + task.task_id);
  }
  session().navigate(task.page.path);
  loaded_ = task.page.path;
}

std::shared_ptr<const Raster> CdpBackend::screenshot() {
  if (!cached_) cached_ = std::make_shared<const Raster>(session().capture_screenshot());
  return cached_;
}

ExclusionVerdict CdpBackend::detect_exclusion(const TaskSpec& task) { return session().detect_exclusion(task); }

BackendFactory cdp_backend_factory(std::string endpoint, CdpOptions options) {
  return [endpoint = std::move(endpoint), options]() -> std::unique_ptr<PageBackend> {
    return std::make_unique<CdpBackend>(endpoint, options);
  };
}

std::optional<std::filesystem::path> find_browser() {
  auto executable = [](const std::filesystem::path& p) { return ::access(p.c_str(), X_OK) == 0; };
  if (const char* env = std::getenv("CLICKBENCH_CHROME"); env && *env) {
    if (executable(env)) return std::filesystem::path(env);
    return std::nullopt;
  }
  const char* path_env = std::getenv("PATH");
  if (!path_env) return std::nullopt;
  for (const char* name : {"chromium", "chromium-browser", "google-chrome", "google-chrome-stable", "chrome",
                           "headless_shell", "chrome-headless-shell"}) {
    std::stringstream dirs(path_env);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      if (dir.empty()) continue;
      const auto candidate = std::filesystem::path(dir) / name;
      if (executable(candidate)) return candidate;
    }
  }
  return std::nullopt;
}

std::unique_ptr<BrowserProcess> BrowserProcess::launch(const std::filesystem::path& executable,
                                                       std::chrono::milliseconds timeout) {
  std::string tmpl = (std::filesystem::temp_directory_path() / "clickbench-chrome-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw Error(Errc::ConnectFailed, "cannot create a browser profile directory");
  std::unique_ptr<BrowserProcess> proc(new BrowserProcess());
  proc->profile_dir_ = tmpl;
  const auto log_path = proc->profile_dir_ / "stderr.log";

  std::vector<std::string> args = {executable.string(),
                                   "--headless=new",
                                   "--remote-debugging-port=0",
                                   "--user-data-dir=" + tmpl,
                                   "--no-first-run",
                                   "--no-default-browser-check",
                                   "--disable-gpu",
                                   "--no-sandbox",
                                   "--hide-scrollbars",
                                   "--mute-audio",
                                   "--disable-extensions",
                                   "--allow-file-access-from-files",
                                   "about:blank"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw Error(Errc::ConnectFailed, "fork failed");
  if (pid == 0) {
    const int err = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    const int null = ::open("/dev/null", O_RDWR);
    if (err >= 0) ::dup2(err, 2);
    if (null >= 0) {
      ::dup2(null, 0);
      ::dup2(null, 1);
    }
    ::execv(argv[0], argv.data());
    ::_exit(127);
  }
  proc->pid_ = pid;

  const std::string marker = "DevTools listening on ";
  const auto deadline = Clock::now() + timeout;
  while (Clock::now() < deadline) {
    std::ifstream log(log_path);
    std::string line;
    while (std::getline(log, line)) {
      const auto at = line.find(marker);
      if (at == std::string::npos) continue;
      auto url = line.substr(at + marker.size());
      while (!url.empty() && std::isspace(static_cast<unsigned char>(url.back()))) url.pop_back();
      proc->endpoint_ = url;
      return proc;
    }
    int status = 0;
    if (::waitpid(pid, &status, WNOHANG) == pid) {
      proc->pid_ = -1;
      throw Error(Errc::ConnectFailed, "browser exited before reporting its endpoint");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  throw Error(Errc::ConnectFailed, "browser did not report a DevTools endpoint in time");
}

BrowserProcess::~BrowserProcess() {
  if (pid_ > 0) {
    ::kill(pid_, SIGTERM);
    int status = 0;
    bool exited = false;
    for (int i = 0; i < 40 && !exited; ++i) {
      exited = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!exited) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    if (!exited) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
  }
  std::error_code ec;
  if (!profile_dir_.empty()) std::filesystem::remove_all(profile_dir_, ec);
}

}  // namespace clickbench
