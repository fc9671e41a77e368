#include "interact/text.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace interact::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Non-ASCII bytes count as word characters so UTF-8 words survive stripping.
bool is_word_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

}  // namespace

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::string strip_punct(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !is_word_char(token[b])) ++b;
  while (e > b && !is_word_char(token[e - 1])) --e;
  return std::string(token.substr(b, e - b));
}

std::vector<std::string> raw_words(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& tok : split_whitespace(s)) {
    auto w = strip_punct(tok);
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  auto out = raw_words(s);
  for (auto& w : out) w = to_lower(w);
  return out;
}

std::vector<std::vector<std::string>> sentences(std::string_view s) {
  std::vector<std::vector<std::string>> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    bool end = i == s.size() || s[i] == '.' || s[i] == '!' || s[i] == '?';
    if (!end) continue;
    auto ws = words(s.substr(start, i - start));
    if (!ws.empty()) out.push_back(std::move(ws));
    while (i + 1 < s.size() && (s[i + 1] == '.' || s[i + 1] == '!' || s[i + 1] == '?')) ++i;
    start = i + 1;
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (prefix.size() > s.size()) return false;
  return to_lower(s.substr(0, prefix.size())) == to_lower(prefix);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string fixed(double value, int digits) {
  double scale = std::pow(10.0, digits);
  double rounded = std::round(value * scale) / scale;
  if (rounded == 0.0) rounded = 0.0;  // drop the sign of -0.0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, rounded);
  return buf;
}

std::string sanitize_id(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '.' || c == '_' || c == '-')) c = '_';
  }
  return out;
}

}  // namespace interact::text
