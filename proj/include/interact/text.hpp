#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by every module. All of them are ASCII-aware and
// treat other bytes as opaque word characters.
namespace interact::text {

// Splits on runs of ASCII whitespace. No empty tokens are returned.
std::vector<std::string> split_whitespace(std::string_view s);

// Whitespace tokens with leading/trailing non-alphanumeric ASCII characters
// removed, lowercased. Tokens that become empty are dropped.
std::vector<std::string> words(std::string_view s);

// Same as words() but keeps the original case.
std::vector<std::string> raw_words(std::string_view s);

// Sentences split on runs of '.', '!' or '?'. Each sentence is returned as its
// words() list; sentences without words are dropped.
std::vector<std::vector<std::string>> sentences(std::string_view s);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::string strip_punct(std::string_view token);
bool contains_ci(std::string_view haystack, std::string_view needle);
bool starts_with_ci(std::string_view s, std::string_view prefix);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// printf-style "%.{digits}f"; collapses negative zero to zero.
std::string fixed(double value, int digits);

// Replaces every character outside [A-Za-z0-9._-] with '_'.
std::string sanitize_id(std::string_view s);

}  // namespace interact::text
