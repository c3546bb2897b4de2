#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "clustergen/archetype.hpp"
#include "clustergen/errors.hpp"

namespace clustergen::nl {

enum class PromptKind { kParams, kIdentifier };

std::string_view kind_name(PromptKind kind);

/// Few-shot template text, ending in "Description: {description}" and the
/// answer cue.
std::string_view prompt_template(PromptKind kind);

inline constexpr std::string_view kDescriptionSlot = "{description}";

/// Substitutes the description into the template's trailing slot. Throws
/// NlError(kEmptyDescription) for a blank description.
std::string render_prompt(PromptKind kind, std::string_view description);

enum class ErrorCode {
  kEmptyDescription,
  kConfig,      ///< missing API key or bad client setup
  kAuth,        ///< HTTP 401 / 403
  kRateLimit,   ///< HTTP 429 after all attempts
  kNetwork,     ///< connection failure or HTTP 5xx after all attempts
  kApi,         ///< any other non-success reply or malformed API payload
  kParse,       ///< no JSON object in the model output
  kValidation,  ///< JSON found but the archetype is invalid
  kIdentifier,  ///< identifier reply is not a valid identifier
  kFixture,     ///< fixture database has no entry for the request
};

std::string_view error_code_name(ErrorCode code);

class NlError : public Error {
 public:
  NlError(ErrorCode code, const std::string& what, std::string raw_response = {},
          std::vector<std::string> attempts = {})
      : Error(what), code_(code), raw_(std::move(raw_response)), attempts_(std::move(attempts)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& raw_response() const noexcept { return raw_; }
  /// One line per HTTP attempt made before giving up.
  const std::vector<std::string>& attempts() const noexcept { return attempts_; }

 private:
  ErrorCode code_;
  std::string raw_;
  std::vector<std::string> attempts_;
};

/// Audit record of one prompt/response round trip.
struct PromptExchange {
  PromptKind kind = PromptKind::kParams;
  std::string description;
  std::string rendered_prompt;
  std::string raw_response;
  std::optional<nlohmann::json> parsed;  ///< archetype JSON or identifier string
  std::vector<std::string> applied_defaults;
  std::vector<std::string> attempts;
};

nlohmann::json exchange_to_json(const PromptExchange& e);

/// Appends one JSON line per exchange.
void append_exchange_log(const std::string& path, const std::vector<PromptExchange>& exchanges);

struct PromptRequest {
  PromptKind kind;
  std::string description;
  std::string prompt;
};

/// Source of model completions.
class Completer {
 public:
  virtual ~Completer() = default;
  /// Returns the assistant text. Implementations append transport details
  /// to `exchange` when it is non-null.
  virtual std::string complete(const PromptRequest& request, PromptExchange* exchange) = 0;
};

// ---------------------------------------------------------------------------
// HTTP chat-completions client

struct HttpReply {
  int status = 0;  ///< 0 when the request never got a response
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpReply post(const std::string& url, const std::string& body,
                         const std::vector<std::pair<std::string, std::string>>& headers) = 0;
};

/// cpp-httplib transport (https supported).
std::unique_ptr<HttpTransport> make_http_transport(double timeout_seconds);

struct ClientConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
  std::optional<std::string> api_key;  ///< overrides the environment
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double timeout_seconds = 60.0;

  std::optional<std::string> resolve_api_key() const;
};

/// Chat-completions client at temperature 0. Retries 429, 5xx and
/// connection failures with doubling backoff until max_attempts.
class ChatClient : public Completer {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  ChatClient(ClientConfig config, std::shared_ptr<HttpTransport> transport, Sleeper sleep = {});

  std::string complete(const PromptRequest& request, PromptExchange* exchange) override;

  std::string request_body(const std::string& prompt) const;

 private:
  ClientConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleep_;
};

/// Replays recorded responses byte-exact. The fixture document maps
/// {"params": {description: raw}, "identifier": {description: raw}}.
class FixtureCompleter : public Completer {
 public:
  explicit FixtureCompleter(nlohmann::json fixtures);
  static FixtureCompleter load(const std::string& path);

  std::string complete(const PromptRequest& request, PromptExchange* exchange) override;

 private:
  nlohmann::json fixtures_;
};

// ---------------------------------------------------------------------------
// Response parsing

/// First balanced {...} block, skipping braces inside string literals.
std::optional<std::string_view> extract_json_object(std::string_view raw);

/// Parses and validates an archetype from model output. Missing keys come
/// from `defaults`. Throws NlError(kParse) or NlError(kValidation), both
/// carrying the raw text.
Archetype parse_archetype_json(std::string_view raw, const Archetype& defaults = {},
                               std::vector<std::string>* applied_defaults = nullptr);

/// Trimmed identifier; throws NlError(kIdentifier) otherwise.
std::string parse_identifier(std::string_view raw);

struct DescriptionResult {
  Archetype archetype;
  std::vector<PromptExchange> exchanges;
};

/// Full workflow: parameters prompt, identifier prompt, validated archetype
/// named by the identifier.
DescriptionResult archetype_from_description(std::string_view description, Completer& completer,
                                             const Archetype& defaults = {});

}  // namespace clustergen::nl
