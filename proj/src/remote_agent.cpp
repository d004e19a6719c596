#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cmath>
#include <cstdlib>

#include "clickbench/agents.hpp"
#include "clickbench/codec.hpp"
#include "clickbench/error.hpp"

namespace clickbench {
namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

class RemoteVlmAgent final : public Agent {
 public:
  explicit RemoteVlmAgent(RemoteEndpointConfig config) : config_(std::move(config)), client_(config_.base_url) {
    const auto seconds = static_cast<time_t>(config_.timeout_seconds);
    const auto usec = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
    client_.set_connection_timeout(seconds, usec);
    client_.set_read_timeout(seconds, usec);
    client_.set_write_timeout(seconds, usec);
    if (!config_.api_key.empty()) client_.set_bearer_token_auth(config_.api_key);
  }

  std::string respond(std::span<const Message> messages, const StepContext&) override {
    const std::string body = build_chat_request(config_, messages).dump();
    auto res = client_.Post(config_.path, body, "application/json");
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        throw InfraFailure(Errc::Timeout, "no reply from " + config_.base_url + ": " + httplib::to_string(err));
      }
      throw InfraFailure(Errc::HttpError, "request to " + config_.base_url + " failed: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300) {
      throw InfraFailure(Errc::HttpError, "HTTP " + std::to_string(res->status) + " from " + config_.base_url,
                         res->status);
    }
    return parse_chat_reply(res->body);
  }

 private:
  RemoteEndpointConfig config_;
  httplib::Client client_;
};

}  // namespace

void RemoteEndpointConfig::validate() const {
  if (base_url.empty()) throw Error(Errc::InvalidArguments, "remote endpoint base_url is empty");
  if (!(timeout_seconds > 0)) throw Error(Errc::InvalidArguments, "remote endpoint timeout must be > 0");
  if (max_tokens < 1) throw Error(Errc::InvalidArguments, "max_tokens must be >= 1");
}

RemoteEndpointConfig RemoteEndpointConfig::from_json(const nlohmann::json& j) {
  RemoteEndpointConfig c;
  c.base_url = j.value("base_url", c.base_url);
  c.path = j.value("path", c.path);
  c.model = j.value("model", c.model);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.temperature = j.value("temperature", c.temperature);
  c.api_key = j.value("api_key", c.api_key);
  return c;
}

RemoteEndpointConfig RemoteEndpointConfig::from_env() { return from_env(RemoteEndpointConfig()); }

RemoteEndpointConfig RemoteEndpointConfig::from_env(RemoteEndpointConfig base) {
  base.base_url = env_or("CLICKBENCH_REMOTE_URL", base.base_url);
  base.path = env_or("CLICKBENCH_REMOTE_PATH", base.path);
  base.model = env_or("CLICKBENCH_REMOTE_MODEL", base.model);
  base.api_key = env_or("CLICKBENCH_REMOTE_API_KEY", base.api_key);
  const std::string timeout = env_or("CLICKBENCH_REMOTE_TIMEOUT", "");
  if (!timeout.empty()) base.timeout_seconds = std::strtod(timeout.c_str(), nullptr);
  return base;
}

nlohmann::json build_chat_request(const RemoteEndpointConfig& config, std::span<const Message> messages) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) {
    nlohmann::json content = nlohmann::json::array();
    for (const auto& part : m.parts) {
      if (const auto* t = std::get_if<TextPart>(&part)) {
        content.push_back({{"type", "text"}, {"text", t->text}});
      } else {
        const auto& img = std::get<ImagePart>(part);
        if (!img.raster) continue;
        content.push_back(
            {{"type", "image"}, {"media_type", "image/png"}, {"data", base64_encode(encode_png(*img.raster))}});
      }
    }
    msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", std::move(content)}});
  }
  return {{"model", config.model},
          {"messages", std::move(msgs)},
          {"temperature", config.temperature},
          {"max_tokens", config.max_tokens}};
}

std::string parse_chat_reply(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw InfraFailure(Errc::ProtocolError, std::string("reply is not JSON: ") + e.what());
  }
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    throw InfraFailure(Errc::EmptyReply, "reply has no choices");
  }
  const auto& msg = j["choices"][0].value("message", nlohmann::json::object());
  const auto content = msg.value("content", nlohmann::json());
  std::string text;
  if (content.is_string()) {
    text = content.get<std::string>();
  } else if (content.is_array()) {
    for (const auto& part : content) {
      if (part.is_object() && part.value("type", "") == "text") text += part.value("text", "");
    }
  }
  if (text.empty()) throw InfraFailure(Errc::EmptyReply, "reply message has no text");
  return text;
}

std::unique_ptr<Agent> make_remote_vlm_agent(RemoteEndpointConfig config) {
  config.validate();
  return std::make_unique<RemoteVlmAgent>(std::move(config));
}

}  // namespace clickbench
