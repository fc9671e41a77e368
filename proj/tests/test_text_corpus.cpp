#include <string>

#include "doctest.h"
#include "interact/corpus.hpp"
#include "interact/csv.hpp"
#include "interact/errors.hpp"
#include "interact/text.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace interact;
using namespace interact::corpus;

namespace {

std::string n_words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

nlohmann::json doc_json(const std::string& id, const std::string& domain, const std::string& date,
                        const std::string& body) {
  return {{"id", id}, {"domain", domain}, {"title", id}, {"source_url", "https://example.org/" + id},
          {"published_at", date}, {"body", body}};
}

nlohmann::json image_json(const std::string& id, const std::string& date) {
  return {{"id", id}, {"domain", "images"}, {"title", id}, {"source_url", "https://example.org/" + id},
          {"published_at", date}, {"image_path", id + ".png"}, {"caption", "a photo"}};
}

}  // namespace

TEST_CASE("text helpers") {
  CHECK(text::split_whitespace("  a \t b\nc ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(text::words("Hello, World!") == std::vector<std::string>{"hello", "world"});
  CHECK(text::raw_words("\"Hold On\"") == std::vector<std::string>{"Hold", "On"});
  CHECK(text::sentences("One two. Three!? ...").size() == 2);
  CHECK(text::fixed(-0.0001, 2) == "0.00");
  CHECK(text::fixed(25.7749, 2) == "25.77");
  CHECK(text::sanitize_id("a/b c:d") == "a_b_c_d");
  CHECK(text::contains_ci("Material", "MAT"));
}

TEST_CASE("csv round trip with quoting") {
  std::ostringstream out;
  csv::write_row(out, {"plain", "with,comma", "with \"quote\"", "multi\nline"});
  std::istringstream in(out.str());
  auto rows = csv::read(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == csv::Row{"plain", "with,comma", "with \"quote\"", "multi\nline"});
  std::istringstream bad("\"open");
  CHECK_THROWS_AS(csv::read(bad), ParseError);
  CHECK(std::stod(csv::format_double(0.1)) == 0.1);
}

TEST_CASE("empty manifest") {
  auto m = parse_manifest(nlohmann::json{{"contexts", nlohmann::json::array()}});
  CHECK(m.contexts.empty());
  CHECK(validate_manifest(m).empty());
  for (auto [d, n] : domain_counts(m)) CHECK(n == 0);
  CHECK(domain_counts(m).size() == 5);
}

TEST_CASE("domain counts at corpus scale") {
  nlohmann::json contexts = nlohmann::json::array();
  std::pair<const char*, int> plan[] = {{"song_lyrics", 467}, {"news_articles", 346}, {"movie_plots", 214},
                                        {"academic_papers", 170}, {"images", 150}};
  int k = 0;
  for (auto [domain, n] : plan)
    for (int i = 0; i < n; ++i, ++k) {
      std::string id = "d" + std::to_string(k);
      contexts.push_back(std::string(domain) == "images" ? image_json(id, "2024-01-02")
                                                          : doc_json(id, domain, "2024-01-02", "some words here"));
    }
  auto m = parse_manifest(nlohmann::json{{"contexts", contexts}});
  CHECK(validate_manifest(m).empty());
  auto counts = domain_counts(m);
  CHECK(counts[Domain::SongLyrics] == 467);
  CHECK(counts[Domain::NewsArticles] == 346);
  CHECK(counts[Domain::MoviePlots] == 214);
  CHECK(counts[Domain::AcademicPapers] == 170);
  CHECK(counts[Domain::Images] == 150);
  CHECK(m.contexts.size() == 1347);
}

TEST_CASE("cutoff rule") {
  TempDir tmp;
  nlohmann::json j{{"cutoff_date", "2023-12-31"},
                   {"contexts", {doc_json("old", "news_articles", "2023-11-01", "text"),
                                 doc_json("edge", "news_articles", "2023-12-31", "text"),
                                 doc_json("new", "news_articles", "2024-01-01", "text"),
                                 image_json("img", "2001-01-01")}}};
  std::ofstream(tmp.path / "m.json") << j.dump();
  CHECK_THROWS_AS(load_manifest(tmp.path / "m.json"), ValidationError);
  auto findings = validate_manifest(parse_manifest(j));
  REQUIRE(findings.size() == 2);
  CHECK(findings[0].id == "old");
  CHECK(findings[1].id == "edge");
}

TEST_CASE("duplicate ids are rejected") {
  nlohmann::json j{{"contexts", {doc_json("x", "song_lyrics", "2024-02-01", "a"),
                                 doc_json("x", "song_lyrics", "2024-02-01", "b")}}};
  auto findings = validate_manifest(parse_manifest(j));
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].message == "duplicate id");
}

TEST_CASE("truncation") {
  ContextDocument d;
  d.id = "p";
  d.domain = Domain::AcademicPapers;
  d.body = n_words(2000);
  d.word_count = 2000;
  auto t = truncate_document(d, 1500);
  CHECK(t.word_count == 1500);
  CHECK(count_words(t.body) == 1500);
  CHECK(truncate_document(t, 1500) == t);

  d.body = n_words(100);
  d.word_count = 100;
  CHECK(truncate_document(d, 1500).body == d.body);

  d.body = "a  b\tc";
  d.word_count = 3;
  auto small = truncate_document(d, 2);
  CHECK(small.body == "a b");
  CHECK(small.word_count == 2);

  auto loaded = parse_manifest(nlohmann::json{{"contexts", {doc_json("p", "academic_papers", "2024-01-05", n_words(2000))}}});
  CHECK(loaded.contexts[0].word_count == 1500);
}

TEST_CASE("corpus stats") {
  nlohmann::json j{{"contexts", {doc_json("s", "song_lyrics", "2024-02-01", n_words(300))}}};
  auto rows = corpus_stats(parse_manifest(j));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].domain == Domain::SongLyrics);
  CHECK(!rows[0].subdomain);
  CHECK(rows[0].count == 1);
  CHECK(rows[0].display_mean() == "300.0");

  auto news = doc_json("n1", "news_articles", "2024-02-01", n_words(1000));
  auto news2 = doc_json("n2", "news_articles", "2024-02-01", n_words(1200));
  auto rows2 = corpus_stats(parse_manifest(nlohmann::json{{"contexts", {news, news2}}}));
  REQUIRE(rows2.size() == 1);
  CHECK(rows2[0].mean_word_count == 1100.0);
}

TEST_CASE("manifest round trip") {
  TempDir tmp;
  auto m = load_manifest(fixtures() / "e2e" / "manifest.json");
  write_manifest(m, tmp.path / "a.json");
  auto back = load_manifest(tmp.path / "a.json");
  CHECK(back == m);
  write_manifest(back, tmp.path / "b.json");
  CHECK(slurp(tmp.path / "a.json") == slurp(tmp.path / "b.json"));
}

TEST_CASE("images are exempt from the cutoff; text documents are not") {
  for (int year = 2020; year <= 2025; ++year) {
    std::string date = std::to_string(year) + "-06-15";
    auto m = parse_manifest(nlohmann::json{{"contexts", {doc_json("t", "movie_plots", date, "x"), image_json("i", date)}}});
    auto findings = validate_manifest(m);
    bool text_flagged = !findings.empty() && findings[0].id == "t";
    CHECK(text_flagged == (year <= 2023));
    for (const auto& f : findings) CHECK(f.id != "i");
  }
}

TEST_CASE("bad inputs raise parse errors") {
  CHECK_THROWS_AS(parse_date("2024-13-01"), ParseError);
  CHECK_THROWS_AS(domain_from_string("poetry"), ParseError);
  CHECK_THROWS_AS(parse_manifest(nlohmann::json::array()), ParseError);
}
