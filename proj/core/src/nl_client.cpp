#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "clustergen/nl.hpp"

namespace clustergen::nl {

std::optional<std::string> ClientConfig::resolve_api_key() const {
  if (api_key && !api_key->empty()) return api_key;
  if (const char* v = std::getenv(api_key_env.c_str()); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

namespace {

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(double timeout) : timeout_(timeout) {}

  HttpReply post(const std::string& url, const std::string& body,
                 const std::vector<std::pair<std::string, std::string>>& headers) override {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {0, {}, "malformed URL " + url};
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client cli(origin);
    const auto secs = static_cast<time_t>(timeout_);
    const auto usecs = static_cast<time_t>((timeout_ - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers h;
    std::string content_type = "application/json";
    for (const auto& [k, v] : headers) {
      if (k == "Content-Type") content_type = v;
      else h.emplace(k, v);
    }
    auto res = cli.Post(path, h, body, content_type);
    if (!res) return {0, {}, httplib::to_string(res.error())};
    return {res->status, res->body, {}};
  }

 private:
  double timeout_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(double timeout_seconds) {
  return std::make_unique<HttplibTransport>(timeout_seconds);
}

ChatClient::ChatClient(ClientConfig config, std::shared_ptr<HttpTransport> transport, Sleeper sleep)
    : config_(std::move(config)), transport_(std::move(transport)), sleep_(std::move(sleep)) {
  if (!transport_) transport_ = make_http_transport(config_.timeout_seconds);
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string ChatClient::request_body(const std::string& prompt) const {
  nlohmann::json body = {
      {"model", config_.model},
      {"temperature", 0},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  return body.dump();
}

std::string ChatClient::complete(const PromptRequest& request, PromptExchange* exchange) {
  const auto key = config_.resolve_api_key();
  if (!key)
    throw NlError(ErrorCode::kConfig, "no API key: set " + config_.api_key_env + " or configure api_key");
  if (config_.max_attempts < 1) throw NlError(ErrorCode::kConfig, "max_attempts must be >= 1");

  std::string url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";
  const std::string body = request_body(request.prompt);
  const std::vector<std::pair<std::string, std::string>> headers = {
      {"Authorization", "Bearer " + *key},
      {"Content-Type", "application/json"},
  };

  std::vector<std::string> attempts;
  auto note = [&](std::string line) {
    attempts.push_back(line);
    if (exchange) exchange->attempts.push_back(std::move(line));
  };

  auto backoff = config_.initial_backoff;
  ErrorCode last_code = ErrorCode::kNetwork;
  std::string last_msg;
  std::string last_body;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    const HttpReply reply = transport_->post(url, body, headers);
    const std::string tag = "attempt " + std::to_string(attempt) + ": ";
    if (reply.status == 0) {
      note(tag + "connection failed: " + reply.error);
      last_code = ErrorCode::kNetwork;
      last_msg = "connection to " + url + " failed: " + reply.error;
      last_body.clear();
    } else {
      note(tag + "HTTP " + std::to_string(reply.status));
      if (reply.status >= 200 && reply.status < 300) {
        try {
          const auto j = nlohmann::json::parse(reply.body);
          return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
          throw NlError(ErrorCode::kApi, std::string("unexpected API response: ") + e.what(), reply.body, attempts);
        }
      }
      if (reply.status == 401 || reply.status == 403)
        throw NlError(ErrorCode::kAuth, "API rejected the credentials (HTTP " + std::to_string(reply.status) + ")",
                      reply.body, attempts);
      if (reply.status == 429) {
        last_code = ErrorCode::kRateLimit;
        last_msg = "API rate limit exceeded";
      } else if (reply.status >= 500) {
        last_code = ErrorCode::kNetwork;
        last_msg = "API server error (HTTP " + std::to_string(reply.status) + ")";
      } else {
        throw NlError(ErrorCode::kApi, "API request failed (HTTP " + std::to_string(reply.status) + ")",
                      reply.body, attempts);
      }
      last_body = reply.body;
    }
    if (attempt < config_.max_attempts) {
      sleep_(backoff);
      backoff *= 2;
    }
  }
  throw NlError(last_code, last_msg + " after " + std::to_string(config_.max_attempts) + " attempts", last_body,
                attempts);
}

}  // namespace clustergen::nl
