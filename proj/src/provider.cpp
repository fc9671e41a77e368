#include "interact/provider.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <regex>
#include <thread>

#include "httplib.h"
#include "interact/errors.hpp"
#include "interact/text.hpp"

namespace interact::provider {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

ChatMessage ChatMessage::text(Role role, std::string body) {
  return ChatMessage{role, {TextPart{std::move(body)}}};
}

bool ChatMessage::has_image() const {
  return std::any_of(content.begin(), content.end(), [](const ContentPart& p) {
    return std::holds_alternative<ImagePart>(p);
  });
}

std::string ChatMessage::joined_text() const {
  std::string out;
  for (const auto& part : content) {
    if (const auto* t = std::get_if<TextPart>(&part)) {
      if (!out.empty()) out += '\n';
      out += t->text;
    }
  }
  return out;
}

void ChatRequest::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0))
    throw ConfigError("temperature must lie in [0, 2]");
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (messages.empty()) throw ConfigError("request has no messages");
  for (const auto& m : messages)
    if (m.content.empty()) throw ConfigError("message with empty content");
}

bool ChatRequest::has_image() const {
  return std::any_of(messages.begin(), messages.end(),
                     [](const ChatMessage& m) { return m.has_image(); });
}

std::string ChatRequest::joined_text() const {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += '\n';
    out += m.joined_text();
  }
  return out;
}

nlohmann::ordered_json request_body(const ChatRequest& req) {
  nlohmann::ordered_json body;
  body["model"] = req.model_id;
  auto messages = nlohmann::ordered_json::array();
  for (const auto& m : req.messages) {
    nlohmann::ordered_json msg;
    msg["role"] = std::string(to_string(m.role));
    if (!m.has_image() && m.content.size() == 1) {
      msg["content"] = std::get<TextPart>(m.content.front()).text;
    } else {
      auto parts = nlohmann::ordered_json::array();
      for (const auto& part : m.content) {
        nlohmann::ordered_json p;
        if (const auto* t = std::get_if<TextPart>(&part)) {
          p["type"] = "text";
          p["text"] = t->text;
        } else {
          const auto& img = std::get<ImagePart>(part);
          p["type"] = "image_url";
          p["image_url"]["url"] = "data:" + img.media_type + ";base64," + img.base64;
        }
        parts.push_back(std::move(p));
      }
      msg["content"] = std::move(parts);
    }
    messages.push_back(std::move(msg));
  }
  body["messages"] = std::move(messages);
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_tokens;
  if (req.seed) body["seed"] = *req.seed;
  return body;
}

std::string serialize_request(const ChatRequest& req) { return request_body(req).dump(); }

ChatResponse parse_response(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ContentError(std::string("unparseable completion: ") + e.what());
  }
  ChatResponse out;
  const auto* content = [&]() -> const nlohmann::json* {
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) return nullptr;
    const auto& choice = j["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content")) return nullptr;
    return &choice["message"]["content"];
  }();
  if (content == nullptr || !content->is_string() || content->get<std::string>().empty())
    throw ContentError("empty completion");
  out.text = content->get<std::string>();
  if (j.contains("usage") && j["usage"].is_object()) {
    const auto& u = j["usage"];
    out.prompt_tokens = u.value("prompt_tokens", std::int64_t{0});
    out.completion_tokens = u.value("completion_tokens", std::int64_t{0});
  }
  return out;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(bytes.data()),
                          static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

ImagePart load_image_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContentError("cannot read image " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto ext = text::to_lower(path.extension().string());
  std::string media = "image/png";
  if (ext == ".jpg" || ext == ".jpeg") media = "image/jpeg";
  else if (ext == ".gif") media = "image/gif";
  else if (ext == ".webp") media = "image/webp";
  return ImagePart{media, base64_encode(bytes)};
}

void check_vision(const ChatRequest& req, const std::set<std::string>& vision_models,
                  bool empty_means_all) {
  if (!req.has_image()) return;
  if (empty_means_all && vision_models.empty()) return;
  if (!vision_models.count(req.model_id))
    throw ContentError("model '" + req.model_id + "' is not vision-capable but the request has an image");
}

// ---------------------------------------------------------------------------
// HttpProvider

ProviderConfig ProviderConfig::from_env() {
  ProviderConfig cfg;
  if (const char* url = std::getenv("INTERACT_BASE_URL"); url && *url) cfg.base_url = url;
  if (const char* key = std::getenv("INTERACT_API_KEY"); key && *key) cfg.api_key = key;
  return cfg;
}

namespace {

std::ptrdiff_t checked_concurrency(int n) {
  if (n < 1) throw ConfigError("max_concurrent must be >= 1");
  return n;
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& s_;
};

std::chrono::milliseconds jittered_backoff(std::chrono::milliseconds base, int attempt) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  double cap = static_cast<double>(base.count()) * std::pow(2.0, attempt);
  cap = std::min(cap, 30000.0);
  std::uniform_real_distribution<double> dist(0.0, cap);
  return std::chrono::milliseconds(static_cast<long long>(dist(rng)));
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpProvider::HttpProvider(ProviderConfig cfg)
    : cfg_(std::move(cfg)), in_flight_(checked_concurrency(cfg_.max_concurrent)) {
  if (cfg_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg_.base_url, m, kUrl)) throw ConfigError("bad base_url '" + cfg_.base_url + "'");
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].str();
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

ChatResponse HttpProvider::chat(const ChatRequest& req) {
  req.validate();
  check_vision(req, cfg_.vision_models, /*empty_means_all=*/false);
  const std::string body = serialize_request(req);
  const std::string path = path_prefix_ + "/chat/completions";

  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  std::string last_transport_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(jittered_backoff(cfg_.backoff_base, attempt - 1));

    httplib::Result res;
    {
      SlotGuard slot(in_flight_);
      httplib::Client client(scheme_host_port_);
      auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
      client.set_connection_timeout(secs);
      client.set_read_timeout(secs);
      client.set_write_timeout(secs);
      res = client.Post(path, headers, body, "application/json");
    }

    if (!res) {
      last_transport_error = httplib::to_string(res.error());
      std::clog << "[provider] attempt " << attempt + 1 << " transport error: "
                << last_transport_error << '\n';
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      auto out = parse_response(res->body);
      out.attempts = attempt + 1;
      return out;
    }
    if (!retryable_status(res->status) || attempt == cfg_.max_retries)
      throw ApiError(res->status, res->body);
    std::clog << "[provider] attempt " << attempt + 1 << " got HTTP " << res->status
              << ", retrying\n";
  }
  throw TransportError("request to " + scheme_host_port_ + path + " failed after " +
                       std::to_string(cfg_.max_retries + 1) + " attempts: " + last_transport_error);
}

// ---------------------------------------------------------------------------
// ScriptedProvider

bool ScriptRule::matches(const ChatRequest& req, const std::string& joined) const {
  if (model && *model != req.model_id) return false;
  if (tag && *tag != req.tag) return false;
  if (seed && (!req.seed || *seed != *req.seed)) return false;
  for (const auto& needle : match) {
    if (needle.empty() || needle == "*") continue;
    if (joined.find(needle) == std::string::npos) return false;
  }
  return true;
}

ScriptedProvider::ScriptedProvider(std::vector<ScriptRule> rules, DefaultPolicy policy,
                                   std::string fixed_default)
    : rules_(std::move(rules)),
      consumed_(rules_.size(), false),
      policy_(policy),
      fixed_default_(std::move(fixed_default)) {}

std::unique_ptr<ScriptedProvider> ScriptedProvider::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("scripted provider fixture must be a JSON object");
  std::vector<ScriptRule> rules;
  try {
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
      ScriptRule rule;
      if (r.contains("match")) {
        if (r["match"].is_array()) rule.match = r["match"].get<std::vector<std::string>>();
        else rule.match = {r["match"].get<std::string>()};
      }
      rule.reply = r.at("reply").get<std::string>();
      if (r.contains("model")) rule.model = r["model"].get<std::string>();
      if (r.contains("tag")) rule.tag = r["tag"].get<std::string>();
      if (r.contains("seed")) rule.seed = r["seed"].get<std::int64_t>();
      rule.repeat = r.value("repeat", false);
      rules.push_back(std::move(rule));
    }
    DefaultPolicy policy = DefaultPolicy::None;
    std::string fixed;
    if (j.contains("default")) {
      const auto& d = j["default"];
      auto name = d.value("policy", std::string("none"));
      if (name == "last") policy = DefaultPolicy::RepeatLast;
      else if (name == "fixed") policy = DefaultPolicy::Fixed, fixed = d.at("reply").get<std::string>();
      else if (name != "none") throw ParseError("unknown default policy '" + name + "'");
    }
    auto p = std::make_unique<ScriptedProvider>(std::move(rules), policy, std::move(fixed));
    if (j.contains("vision_models"))
      p->set_vision_models(j["vision_models"].get<std::set<std::string>>());
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scripted provider fixture: ") + e.what());
  }
}

std::unique_ptr<ScriptedProvider> ScriptedProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scripted fixture " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("scripted fixture " + path.string() + ": " + e.what());
  }
}

void ScriptedProvider::set_responder(Responder r) {
  std::lock_guard lock(mu_);
  responder_ = std::move(r);
}

void ScriptedProvider::set_vision_models(std::set<std::string> models) {
  std::lock_guard lock(mu_);
  vision_models_ = std::move(models);
}

ChatResponse ScriptedProvider::chat(const ChatRequest& req) {
  req.validate();
  std::lock_guard lock(mu_);
  check_vision(req, vision_models_, /*empty_means_all=*/true);
  const std::string joined = req.joined_text();

  std::optional<std::string> reply;
  for (std::size_t i = 0; i < rules_.size() && !reply; ++i) {
    if (consumed_[i] || !rules_[i].matches(req, joined)) continue;
    reply = rules_[i].reply;
    if (!rules_[i].repeat) consumed_[i] = true;
  }
  if (!reply && responder_) reply = responder_(req);
  if (!reply) {
    switch (policy_) {
      case DefaultPolicy::RepeatLast:
        reply = last_reply_;
        break;
      case DefaultPolicy::Fixed:
        reply = fixed_default_;
        break;
      case DefaultPolicy::None:
        break;
    }
  }
  if (!reply)
    throw ScriptExhausted("no scripted reply for request #" + std::to_string(log_.size() + 1) +
                          " (model " + req.model_id + ", tag '" + req.tag + "')");
  if (reply->empty()) throw ContentError("scripted reply is empty");

  last_reply_ = reply;
  log_.push_back({req, *reply});
  ChatResponse out;
  out.text = *reply;
  out.prompt_tokens = static_cast<std::int64_t>(text::split_whitespace(joined).size());
  out.completion_tokens = static_cast<std::int64_t>(text::split_whitespace(*reply).size());
  return out;
}

std::vector<LoggedRequest> ScriptedProvider::log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t ScriptedProvider::call_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

std::size_t ScriptedProvider::count_tag(std::string_view tag) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(
      log_.begin(), log_.end(), [&](const LoggedRequest& r) { return r.request.tag == tag; }));
}

void ScriptedProvider::clear_log() {
  std::lock_guard lock(mu_);
  log_.clear();
}

}  // namespace interact::provider
