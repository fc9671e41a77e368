#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace interact::corpus {

enum class Domain { SongLyrics, NewsArticles, MoviePlots, AcademicPapers, Images };

inline constexpr Domain kAllDomains[] = {Domain::SongLyrics, Domain::NewsArticles,
                                         Domain::MoviePlots, Domain::AcademicPapers,
                                         Domain::Images};

// Wire names: "song_lyrics", "news_articles", ...
std::string_view to_string(Domain d);
Domain domain_from_string(std::string_view s);  // throws ParseError
bool is_text_domain(Domain d);

using Date = std::chrono::year_month_day;

Date parse_date(std::string_view iso);  // "YYYY-MM-DD", throws ParseError
std::string format_date(const Date& d);

inline constexpr Date kDefaultCutoff{std::chrono::year{2023}, std::chrono::month{12},
                                     std::chrono::day{31}};
inline constexpr std::size_t kAcademicMaxWords = 1500;

struct ContextDocument {
  std::string id;
  Domain domain = Domain::SongLyrics;
  std::optional<std::string> subdomain;
  std::string title;
  std::string source_url;
  Date published_at{};
  std::string body;                       // empty for Images
  std::optional<std::string> image_path;  // Images only
  std::optional<std::string> caption;     // Images only
  std::size_t word_count = 0;

  bool operator==(const ContextDocument&) const = default;
};

struct CorpusManifest {
  std::vector<ContextDocument> contexts;
  Date cutoff_date = kDefaultCutoff;
  std::optional<std::string> created_at;

  const ContextDocument* find(std::string_view id) const;
  bool operator==(const CorpusManifest&) const = default;
};

struct Finding {
  std::string id;
  std::string message;
};

struct LoadOptions {
  // Overrides the manifest's own cutoff_date when set.
  std::optional<Date> cutoff;
  // Academic papers are cut to their first N words on load; nullopt disables.
  std::optional<std::size_t> academic_max_words = kAcademicMaxWords;
};

// Parses without enforcing invariants (used by validate to collect findings).
CorpusManifest parse_manifest(const nlohmann::json& j, const LoadOptions& opts = {});
std::vector<Finding> validate_manifest(const CorpusManifest& m);

CorpusManifest load_manifest(const std::filesystem::path& path, const LoadOptions& opts = {});
nlohmann::ordered_json to_json(const CorpusManifest& m);
void write_manifest(const CorpusManifest& m, const std::filesystem::path& path);

std::size_t count_words(std::string_view body);

// Keeps the first max_words whitespace tokens joined by single spaces.
ContextDocument truncate_document(const ContextDocument& doc, std::size_t max_words);

struct StatsRow {
  Domain domain;
  std::optional<std::string> subdomain;
  std::size_t count = 0;
  double mean_word_count = 0.0;

  std::string display_mean() const;  // one decimal
};

// One row per (domain, subdomain), ordered by domain then subdomain.
std::vector<StatsRow> corpus_stats(const CorpusManifest& m);

// Count per domain; every domain is present, possibly with 0.
std::map<Domain, std::size_t> domain_counts(const CorpusManifest& m);

}  // namespace interact::corpus
