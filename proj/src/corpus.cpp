#include "interact/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "interact/errors.hpp"
#include "interact/text.hpp"

namespace interact::corpus {

namespace {

struct DomainName {
  Domain domain;
  std::string_view name;
};

constexpr DomainName kDomainNames[] = {
    {Domain::SongLyrics, "song_lyrics"},
    {Domain::NewsArticles, "news_articles"},
    {Domain::MoviePlots, "movie_plots"},
    {Domain::AcademicPapers, "academic_papers"},
    {Domain::Images, "images"},
};

std::string required_string(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ParseError(where + ": missing string field '" + key + "'");
  return j.at(key).get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key,
                                           const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace

std::string_view to_string(Domain d) {
  for (const auto& dn : kDomainNames)
    if (dn.domain == d) return dn.name;
  return "unknown";
}

Domain domain_from_string(std::string_view s) {
  for (const auto& dn : kDomainNames)
    if (dn.name == s) return dn.domain;
  throw ParseError("unknown domain '" + std::string(s) + "'");
}

bool is_text_domain(Domain d) { return d != Domain::Images; }

Date parse_date(std::string_view iso) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  std::string s(iso);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
      std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3)
    throw ParseError("bad date '" + s + "', expected YYYY-MM-DD");
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw ParseError("invalid calendar date '" + s + "'");
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

const ContextDocument* CorpusManifest::find(std::string_view id) const {
  auto it = std::find_if(contexts.begin(), contexts.end(),
                         [&](const ContextDocument& c) { return c.id == id; });
  return it == contexts.end() ? nullptr : &*it;
}

std::size_t count_words(std::string_view body) { return text::split_whitespace(body).size(); }

ContextDocument truncate_document(const ContextDocument& doc, std::size_t max_words) {
  if (!is_text_domain(doc.domain))
    throw DomainError("cannot truncate image document '" + doc.id + "'");
  auto tokens = text::split_whitespace(doc.body);
  if (tokens.size() > max_words) tokens.resize(max_words);
  ContextDocument out = doc;
  out.body = text::join(tokens, " ");
  out.word_count = tokens.size();
  return out;
}

CorpusManifest parse_manifest(const nlohmann::json& j, const LoadOptions& opts) {
  if (!j.is_object()) throw ParseError("manifest must be a JSON object");
  CorpusManifest m;
  if (auto cutoff = optional_string(j, "cutoff_date", "manifest")) m.cutoff_date = parse_date(*cutoff);
  if (opts.cutoff) m.cutoff_date = *opts.cutoff;
  m.created_at = optional_string(j, "created_at", "manifest");
  if (!j.contains("contexts") || !j.at("contexts").is_array())
    throw ParseError("manifest: missing 'contexts' array");

  std::size_t index = 0;
  for (const auto& c : j.at("contexts")) {
    std::string where = "contexts[" + std::to_string(index++) + "]";
    if (!c.is_object()) throw ParseError(where + ": must be an object");
    ContextDocument doc;
    doc.id = required_string(c, "id", where);
    where += " (" + doc.id + ")";
    doc.domain = domain_from_string(required_string(c, "domain", where));
    doc.subdomain = optional_string(c, "subdomain", where);
    doc.title = optional_string(c, "title", where).value_or("");
    doc.source_url = optional_string(c, "source_url", where).value_or("");
    doc.published_at = parse_date(required_string(c, "published_at", where));
    doc.body = optional_string(c, "body", where).value_or("");
    doc.image_path = optional_string(c, "image_path", where);
    doc.caption = optional_string(c, "caption", where);
    doc.word_count = count_words(doc.body);
    if (doc.domain == Domain::AcademicPapers && opts.academic_max_words)
      doc = truncate_document(doc, *opts.academic_max_words);
    m.contexts.push_back(std::move(doc));
  }
  return m;
}

std::vector<Finding> validate_manifest(const CorpusManifest& m) {
  std::vector<Finding> out;
  std::set<std::string> seen;
  for (const auto& doc : m.contexts) {
    if (doc.id.empty()) out.push_back({doc.id, "empty id"});
    if (!seen.insert(doc.id).second) out.push_back({doc.id, "duplicate id"});
    if (is_text_domain(doc.domain)) {
      if (doc.body.empty()) out.push_back({doc.id, "text document has an empty body"});
      if (doc.image_path) out.push_back({doc.id, "text document carries an image_path"});
      if (doc.published_at <= m.cutoff_date)
        out.push_back({doc.id, "published " + format_date(doc.published_at) +
                                   " is not after cutoff " + format_date(m.cutoff_date)});
    } else {
      if (!doc.image_path || doc.image_path->empty())
        out.push_back({doc.id, "image document has no image_path"});
      if (!doc.body.empty()) out.push_back({doc.id, "image document has a text body"});
    }
    if (doc.word_count != count_words(doc.body))
      out.push_back({doc.id, "word_count does not match body"});
  }
  return out;
}

CorpusManifest load_manifest(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
  auto m = parse_manifest(j, opts);
  auto findings = validate_manifest(m);
  if (!findings.empty()) {
    std::ostringstream msg;
    msg << "manifest " << path.string() << " failed validation:";
    for (const auto& f : findings) msg << "\n  " << f.id << ": " << f.message;
    throw ValidationError(msg.str());
  }
  return m;
}

nlohmann::ordered_json to_json(const CorpusManifest& m) {
  nlohmann::ordered_json j;
  j["cutoff_date"] = format_date(m.cutoff_date);
  if (m.created_at) j["created_at"] = *m.created_at;
  j["contexts"] = nlohmann::ordered_json::array();
  for (const auto& doc : m.contexts) {
    nlohmann::ordered_json c;
    c["id"] = doc.id;
    c["domain"] = std::string(to_string(doc.domain));
    if (doc.subdomain) c["subdomain"] = *doc.subdomain;
    c["title"] = doc.title;
    c["source_url"] = doc.source_url;
    c["published_at"] = format_date(doc.published_at);
    if (!doc.body.empty()) c["body"] = doc.body;
    if (doc.image_path) c["image_path"] = *doc.image_path;
    if (doc.caption) c["caption"] = *doc.caption;
    j["contexts"].push_back(std::move(c));
  }
  return j;
}

void write_manifest(const CorpusManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write manifest " + path.string());
  out << to_json(m).dump(2) << '\n';
}

std::string StatsRow::display_mean() const { return text::fixed(mean_word_count, 1); }

std::vector<StatsRow> corpus_stats(const CorpusManifest& m) {
  using Key = std::pair<Domain, std::optional<std::string>>;
  std::map<Key, std::pair<std::size_t, double>> acc;
  for (const auto& doc : m.contexts) {
    auto& [n, sum] = acc[{doc.domain, doc.subdomain}];
    ++n;
    sum += static_cast<double>(doc.word_count);
  }
  std::vector<StatsRow> rows;
  for (const auto& [key, v] : acc)
    rows.push_back({key.first, key.second, v.first, v.second / static_cast<double>(v.first)});
  return rows;
}

std::map<Domain, std::size_t> domain_counts(const CorpusManifest& m) {
  std::map<Domain, std::size_t> out;
  for (auto d : kAllDomains) out[d] = 0;
  for (const auto& doc : m.contexts) ++out[doc.domain];
  return out;
}

}  // namespace interact::corpus
