#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace interact::provider {

enum class Role { System, User, Assistant };
std::string_view to_string(Role r);

struct TextPart {
  std::string text;
  bool operator==(const TextPart&) const = default;
};

struct ImagePart {
  std::string media_type;  // e.g. "image/png"
  std::string base64;
  bool operator==(const ImagePart&) const = default;
};

using ContentPart = std::variant<TextPart, ImagePart>;

struct ChatMessage {
  Role role = Role::User;
  std::vector<ContentPart> content;

  static ChatMessage text(Role role, std::string body);
  bool has_image() const;
  // Concatenation of the text parts.
  std::string joined_text() const;
  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1;
  std::optional<std::int64_t> seed;
  // Local bookkeeping label ("student.question", "teacher.answer", ...).
  // Never sent on the wire.
  std::string tag;

  // Throws ConfigError when temperature is outside [0, 2], max_tokens < 1 or
  // a message has no content.
  void validate() const;
  bool has_image() const;
  // All text parts of all messages, newline-separated.
  std::string joined_text() const;
};

struct ChatResponse {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  int attempts = 1;
};

// The exact chat-completions request body.
nlohmann::ordered_json request_body(const ChatRequest& req);
std::string serialize_request(const ChatRequest& req);

// Reads choices[0].message.content and the usage block. Throws ContentError on
// a missing or empty completion.
ChatResponse parse_response(const std::string& body);

ImagePart load_image_file(const std::filesystem::path& path);
std::string base64_encode(std::string_view bytes);

// Every backend implements this. Implementations must be safe to call from
// several threads at once.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ChatResponse chat(const ChatRequest& req) = 0;
};

struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds timeout{120000};
  int max_concurrent = 8;
  // Models allowed to receive image parts.
  std::set<std::string> vision_models;

  // INTERACT_BASE_URL and INTERACT_API_KEY override the defaults when set.
  static ProviderConfig from_env();
};

// Chat-completions client over HTTP(S) with retries, full-jitter exponential
// backoff and an in-flight request bound.
class HttpProvider final : public ChatProvider {
 public:
  explicit HttpProvider(ProviderConfig cfg);
  ChatResponse chat(const ChatRequest& req) override;

  const ProviderConfig& config() const { return cfg_; }

 private:
  ProviderConfig cfg_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::counting_semaphore<> in_flight_;
};

// ---------------------------------------------------------------------------
// Scripted backend

struct ScriptRule {
  // Substrings that must all occur in the request text; "*" or empty matches
  // anything.
  std::vector<std::string> match;
  std::string reply;
  std::optional<std::string> model;  // exact model id filter
  std::optional<std::string> tag;    // exact request tag filter
  std::optional<std::int64_t> seed;  // exact request seed filter
  // false: consumed by its first match. true: stays active.
  bool repeat = false;

  bool matches(const ChatRequest& req, const std::string& joined) const;
};

enum class DefaultPolicy { None, RepeatLast, Fixed };

struct LoggedRequest {
  ChatRequest request;
  std::string reply;
};

// Deterministic in-process provider. A request is answered by the first
// active rule that matches it, then by the responder, then by the default
// policy; otherwise ScriptExhausted is thrown.
class ScriptedProvider final : public ChatProvider {
 public:
  using Responder = std::function<std::optional<std::string>(const ChatRequest&)>;

  explicit ScriptedProvider(std::vector<ScriptRule> rules = {},
                            DefaultPolicy policy = DefaultPolicy::None,
                            std::string fixed_default = {});

  // Loads {"rules": [...], "default": {"policy": "none|last|fixed", "reply": ...}}.
  static std::unique_ptr<ScriptedProvider> from_file(const std::filesystem::path& path);
  static std::unique_ptr<ScriptedProvider> from_json(const nlohmann::json& j);

  void set_responder(Responder r);
  // Models not listed here receive ContentError for image parts. Empty means
  // every model is treated as vision-capable.
  void set_vision_models(std::set<std::string> models);

  ChatResponse chat(const ChatRequest& req) override;

  std::vector<LoggedRequest> log() const;
  std::size_t call_count() const;
  std::size_t count_tag(std::string_view tag) const;
  void clear_log();

 private:
  mutable std::mutex mu_;
  std::vector<ScriptRule> rules_;
  std::vector<bool> consumed_;
  DefaultPolicy policy_;
  std::string fixed_default_;
  std::optional<std::string> last_reply_;
  Responder responder_;
  std::set<std::string> vision_models_;
  std::vector<LoggedRequest> log_;
};

// Shared precondition for every backend: image parts only go to
// vision-capable models.
void check_vision(const ChatRequest& req, const std::set<std::string>& vision_models,
                  bool empty_means_all);

}  // namespace interact::provider
