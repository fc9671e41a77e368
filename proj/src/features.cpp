#include "interact/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "interact/csv.hpp"
#include "interact/errors.hpp"
#include "interact/lexicon.hpp"
#include "interact/text.hpp"

namespace interact::features {

using dialogue::EventType;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

bool ends_sentence(std::string_view token) {
  return !token.empty() && (token.back() == '.' || token.back() == '!' || token.back() == '?');
}

bool has_trailing_punct(std::string_view token) {
  return !token.empty() && !std::isalnum(static_cast<unsigned char>(token.back())) &&
         !(static_cast<unsigned char>(token.back()) & 0x80);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::size_t count_in(const std::vector<std::string>& words, const lexicon::WordSet& set) {
  return static_cast<std::size_t>(
      std::count_if(words.begin(), words.end(), [&](const auto& w) { return set.count(w) > 0; }));
}

bool contains_any(std::string_view text, const std::vector<std::string>& phrases) {
  return std::any_of(phrases.begin(), phrases.end(),
                     [&](const auto& p) { return text::contains_ci(text, p); });
}

std::set<std::string> unique_words(std::string_view s) {
  auto w = text::words(s);
  return {w.begin(), w.end()};
}

double mean_word_length(const std::vector<std::string>& words) {
  if (words.empty()) return 0.0;
  double total = 0;
  for (const auto& w : words) total += static_cast<double>(w.size());
  return total / static_cast<double>(words.size());
}

double population_sd(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

std::string doc_text(const corpus::ContextDocument& doc) {
  if (!doc.body.empty()) return doc.body;
  return doc.caption.value_or("");
}

// Doc sentence with the best overlap F1 against the question; first wins ties.
std::string best_sentence(const std::string& doc, std::string_view question) {
  std::string best;
  double best_f1 = -1.0;
  std::string current;
  auto consider = [&] {
    if (text::words(current).empty()) return;
    double f1 = overlap_f1(current, question);
    if (f1 > best_f1) {
      best_f1 = f1;
      best = current;
    }
  };
  for (char c : doc) {
    if (c == '.' || c == '!' || c == '?') {
      consider();
      current.clear();
    } else {
      current += c;
    }
  }
  consider();
  return best;
}

bool temporal_token(const std::string& w) {
  if (lexicon::temporal_words().count(w)) return true;
  return w.size() == 4 && (w.rfind("19", 0) == 0 || w.rfind("20", 0) == 0) &&
         std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::size_t feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (kFeatureNames[i] == name) return i;
  throw std::out_of_range("unknown feature '" + std::string(name) + "'");
}

QuestionType question_type(std::string_view question) {
  auto w = text::words(question);
  if (w.empty()) return QuestionType::Other;
  const auto& first = w.front();
  if (first == "what") return QuestionType::What;
  if (first == "who" || first == "whom" || first == "whose") return QuestionType::Who;
  if (first == "where") return QuestionType::Where;
  if (first == "when") return QuestionType::When;
  if (first == "why") return QuestionType::Why;
  if (first == "how") return QuestionType::How;
  if (first == "which") return QuestionType::Which;
  static const lexicon::WordSet kAux = {"is",    "are",    "was",   "were",   "am",   "do",
                                        "does",  "did",    "can",   "could",  "will", "would",
                                        "shall", "should", "may",   "might",  "must", "has",
                                        "have",  "had",    "isn't", "aren't", "don't", "doesn't",
                                        "didn't"};
  if (kAux.count(first)) return QuestionType::YesNo;
  return QuestionType::Other;
}

std::string_view to_string(QuestionType t) {
  static constexpr std::string_view kNames[] = {"other", "what", "who",   "where", "when",
                                                "why",   "how",  "which", "yes_no"};
  return kNames[static_cast<int>(t)];
}

std::array<double, kQuestionTypeIndicators> FeatureVector::question_type_indicators() const {
  std::array<double, kQuestionTypeIndicators> out{};
  int t = static_cast<int>((*this)["question_type"]);
  if (t >= 1 && t <= static_cast<int>(kQuestionTypeIndicators)) out[t - 1] = 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Embeddings

bool Embedding::is_zero() const {
  return std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; });
}

std::vector<double> Embedding::unit() const {
  double norm = 0;
  for (auto c : counts) norm += static_cast<double>(c) * static_cast<double>(c);
  std::vector<double> out(counts.size(), 0.0);
  if (norm == 0) return out;
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / norm;
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Embedding hash_embed(std::string_view text_in, std::size_t dim, bool bigrams) {
  Embedding e;
  e.counts.assign(dim, 0);
  auto words = text::words(text_in);
  auto add = [&](const std::string& token) {
    std::uint64_t h = fnv1a64(token);
    e.counts[h % dim] += (splitmix64(h) & 1) ? -1 : 1;
  };
  for (const auto& w : words) add(w);
  if (bigrams)
    for (std::size_t i = 1; i < words.size(); ++i) add(words[i - 1] + " " + words[i]);
  return e;
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.counts.size() != b.counts.size()) throw ShapeMismatch("embedding dimensions differ");
  std::int64_t dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    dot += a.counts[i] * b.counts[i];
    na += a.counts[i] * a.counts[i];
    nb += b.counts[i] * b.counts[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  double c = static_cast<double>(dot) / std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
  return std::clamp(c, -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Heuristics

int syllables(std::string_view word) {
  std::string w;
  for (char c : word)
    if (std::isalpha(static_cast<unsigned char>(c))) w += static_cast<char>(std::tolower(c));
  auto vowel = [](char c) { return std::string_view("aeiouy").find(c) != std::string_view::npos; };
  int count = 0;
  bool prev = false;
  for (char c : w) {
    bool v = vowel(c);
    if (v && !prev) ++count;
    prev = v;
  }
  if (ends_with(w, "e") && !ends_with(w, "le")) --count;
  return std::max(count, 1);
}

double readability(std::string_view text, const Annotator& annotator) {
  auto words = text::words(text);
  if (words.empty()) return 0.0;
  auto sents = text::sentences(text);
  double n_words = static_cast<double>(words.size());
  double n_sents = static_cast<double>(std::max<std::size_t>(sents.size(), 1));
  double n_syll = 0;
  for (const auto& w : words) n_syll += annotator.syllables(w);
  return 206.835 - 1.015 * (n_words / n_sents) - 84.6 * (n_syll / n_words);
}

double readability(std::string_view text) { return readability(text, HeuristicAnnotator{}); }

double type_token_ratio(std::string_view text) {
  auto words = text::words(text);
  if (words.empty()) return 0.0;
  std::set<std::string> distinct(words.begin(), words.end());
  return static_cast<double>(distinct.size()) / static_cast<double>(words.size());
}

double depth_proxy(std::string_view text) {
  auto sents = text::sentences(text);
  if (sents.empty()) return 0.0;
  double total = 0;
  for (const auto& s : sents) total += 1.0 + static_cast<double>(count_in(s, lexicon::subordinators()));
  return total / static_cast<double>(sents.size());
}

std::vector<EntitySpan> entity_spans(std::string_view text) {
  auto tokens = text::split_whitespace(text);
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> open;
  auto close = [&] {
    if (open) spans.push_back(std::move(*open));
    open.reset();
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& raw = tokens[i];
    auto word = text::strip_punct(raw);
    bool initial = i == 0 || ends_sentence(tokens[i - 1]);
    bool cap = !word.empty() && is_upper(word.front()) && word != "I";
    if (!cap || initial) {
      close();
      continue;
    }
    if (!open) open = EntitySpan{i, i, ""};
    open->end = i + 1;
    open->text += (open->text.empty() ? "" : " ") + word;
    if (has_trailing_punct(raw)) close();
  }
  close();
  return spans;
}

int passive_count(std::string_view text) {
  auto words = text::words(text);
  int count = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!lexicon::be_forms().count(words[i])) continue;
    for (std::size_t j = i + 1; j <= i + 2 && j < words.size(); ++j) {
      const auto& w = words[j];
      bool participle = lexicon::irregular_participles().count(w) ||
                        ((ends_with(w, "ed") || ends_with(w, "en")) && w.size() > 3 &&
                         !lexicon::participle_exceptions().count(w));
      if (participle) {
        ++count;
        break;
      }
    }
  }
  return count;
}

int coreference_count(std::string_view text) {
  auto spans = entity_spans(text);
  if (spans.empty()) return 0;
  const std::size_t first_end = spans.front().end;
  auto tokens = text::split_whitespace(text);
  int count = 0;
  for (std::size_t i = first_end; i < tokens.size(); ++i)
    if (lexicon::third_person_pronouns().count(text::to_lower(text::strip_punct(tokens[i])))) ++count;
  return count;
}

double overlap_f1(std::string_view a, std::string_view b) {
  auto wa = text::words(a);
  auto wb = text::words(b);
  if (wa.empty() || wb.empty()) return 0.0;
  std::unordered_map<std::string, int> counts;
  for (const auto& w : wb) ++counts[w];
  int common = 0;
  for (const auto& w : wa) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  double p = static_cast<double>(common) / static_cast<double>(wa.size());
  double r = static_cast<double>(common) / static_cast<double>(wb.size());
  return 2 * p * r / (p + r);
}

std::vector<std::string> key_terms(std::string_view text, std::size_t n) {
  std::map<std::string, int> freq;
  for (const auto& w : text::words(text))
    if (w.size() >= 3 && !lexicon::stopwords().count(w)) ++freq[w];
  std::vector<std::pair<std::string, int>> items(freq.begin(), freq.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < items.size() && i < n; ++i) out.push_back(items[i].first);
  return out;
}

std::vector<EntitySpan> HeuristicAnnotator::entities(std::string_view text) const {
  return entity_spans(text);
}
double HeuristicAnnotator::depth(std::string_view text) const { return depth_proxy(text); }
int HeuristicAnnotator::passive_count(std::string_view text) const {
  return features::passive_count(text);
}
int HeuristicAnnotator::syllables(std::string_view word) const { return features::syllables(word); }
Embedding HeuristicAnnotator::embed(std::string_view text) const { return hash_embed(text); }
int HeuristicAnnotator::coreference_count(std::string_view text) const {
  return features::coreference_count(text);
}

// ---------------------------------------------------------------------------
// Keywords

std::filesystem::path default_keywords_dir() {
  return std::filesystem::path(INTERACT_DATA_DIR) / "keywords";
}

KeywordSet load_keywords(const std::filesystem::path& dir, corpus::Domain domain) {
  KeywordSet out;
  std::ifstream in(dir / (std::string(corpus::to_string(domain)) + ".txt"));
  std::string line;
  while (std::getline(in, line)) {
    auto w = text::to_lower(text::trim(line));
    if (w.empty() || w.front() == '#') continue;
    out.insert(std::move(w));
  }
  return out;
}

std::map<corpus::Domain, KeywordSet> load_all_keywords(const std::filesystem::path& dir) {
  std::map<corpus::Domain, KeywordSet> out;
  for (auto d : corpus::kAllDomains) out[d] = load_keywords(dir, d);
  return out;
}

// ---------------------------------------------------------------------------
// Extraction

FeatureVector extract_round_features(const dialogue::Transcript& t, int round,
                                     const corpus::ContextDocument& doc,
                                     const Annotator& ann, const KeywordSet& keywords) {
  if (round < 1) throw MissingRound("feature rows start at round 1");
  std::map<int, std::string> qs, as;
  std::map<int, double> acc;
  std::optional<std::string> lesson;
  for (const auto& e : t.events) {
    if (e.type == EventType::StudentQuestion) qs[e.round] = e.content;
    if (e.type == EventType::TeacherAnswer) as[e.round] = e.content;
    if (e.type == EventType::QuizEval && e.accuracy) acc[e.round] = *e.accuracy;
    if (e.type == EventType::LessonShown) lesson = e.content;
  }
  for (int j = 1; j <= round; ++j)
    if (!qs.count(j) || !as.count(j))
      throw MissingRound(t.run_id + ": round " + std::to_string(j) + " lacks a question or answer");
  for (int j : {0, round - 1, round})
    if (!acc.count(j))
      throw MissingRound(t.run_id + ": no quiz evaluation at round " + std::to_string(j));

  const std::string& q = qs[round];
  const std::string& a = as[round];
  const auto qw = text::words(q);
  const auto aw = text::words(a);
  std::map<int, Embedding> qe, ae;
  for (int j = 1; j <= round; ++j) {
    qe[j] = ann.embed(qs[j]);
    ae[j] = ann.embed(as[j]);
  }
  auto max_prior_cos = [&](std::map<int, Embedding>& emb) {
    double best = 0.0;
    for (int j = 1; j < round; ++j) best = std::max(best, cosine(emb[round], emb[j]));
    return best;
  };

  FeatureVector f;
  // question
  const auto q_entities = ann.entities(q);
  f["question_length"] = static_cast<double>(qw.size());
  f["question_complexity"] = ann.depth(q);
  f["lexical_sophistication"] = mean_word_length(qw);
  f["named_entity_count"] = static_cast<double>(q_entities.size());
  {
    std::size_t n = 0;
    for (const auto& w : unique_words(q)) n += keywords.count(w);
    f["question_informativeness"] = static_cast<double>(n);
  }
  f["question_directness"] = q.find('?') != std::string::npos ? 1.0 : 0.0;
  f["politeness_hedging"] = static_cast<double>(count_in(qw, lexicon::hedges()));
  f["question_type"] = static_cast<double>(static_cast<int>(question_type(q)));
  f["question_novelty"] = round == 1 ? 1.0 : 1.0 - max_prior_cos(qe);
  f["question_specificity"] = q_entities.empty() ? 0.0 : 1.0;

  // teacher response
  const std::string context = doc_text(doc);
  f["response_length"] = static_cast<double>(aw.size());
  f["info_density"] =
      aw.empty() ? 0.0
                 : static_cast<double>(aw.size() - count_in(aw, lexicon::stopwords())) /
                       static_cast<double>(aw.size());
  f["response_novelty"] = round == 1 ? 1.0 : 1.0 - max_prior_cos(ae);
  const double correctness = overlap_f1(a, best_sentence(context, q));
  f["response_correctness"] = correctness;
  f["response_completeness"] = correctness > 0.5 ? 1.0 : 0.0;
  f["response_complexity"] = ann.depth(a);
  {
    std::set<std::string> distinct;
    for (const auto& s : ann.entities(a)) distinct.insert(text::to_lower(s.text));
    f["entity_diversity"] = static_cast<double>(distinct.size());
  }
  f["temporal_positioning"] =
      static_cast<double>(std::count_if(aw.begin(), aw.end(), temporal_token));
  f["use_of_examples"] = contains_any(a, lexicon::example_phrases()) ? 1.0 : 0.0;

  // interaction dynamics
  std::set<std::string> exposure;
  for (int j = 1; j <= round; ++j)
    for (const auto& w : text::words(as[j])) exposure.insert(w);
  f["turn_index"] = round;
  f["cumulative_exposure"] = static_cast<double>(exposure.size());
  f["student_adaptation"] = round == 1 ? 0.0 : ann.depth(q) - ann.depth(qs[round - 1]);
  f["teacher_adaptation"] = round == 1 ? 0.0 : ann.depth(a) - ann.depth(as[round - 1]);
  f["information_gain"] = round == 1 ? 1.0 : 1.0 - cosine(ae[round], ae[round - 1]);
  {
    int shifts = 0;
    for (int j = 2; j <= round; ++j)
      if (cosine(qe[j], qe[j - 1]) < 0.5) ++shifts;
    f["topic_shifts"] = shifts;
    int unanswered = 0;
    for (int j = 1; j < round; ++j)
      if (overlap_f1(qs[j], as[j]) < 0.1) ++unanswered;
    f["unanswered_queries"] = unanswered;
  }
  f["progressive_elaboration"] =
      round == 1 ? 0.0
                 : static_cast<double>(aw.size()) - static_cast<double>(text::words(as[round - 1]).size());

  // linguistic / style
  f["lexical_diversity_student"] = type_token_ratio(q);
  f["lexical_diversity_teacher"] = type_token_ratio(a);
  f["domain_specific_terms"] = static_cast<double>(
      std::count_if(aw.begin(), aw.end(), [&](const auto& w) { return keywords.count(w) > 0; }));
  {
    std::vector<double> lengths;
    for (const auto& s : text::sentences(a)) lengths.push_back(static_cast<double>(s.size()));
    f["sentence_length_variability"] = population_sd(lengths);
  }
  f["readability_score"] = readability(a, ann);
  f["passive_voice_count"] = ann.passive_count(a);
  f["modal_language_count"] = static_cast<double>(count_in(aw, lexicon::modals()));

  // semantic
  f["semantic_similarity_to_summary"] = cosine(ae[round], ann.embed(lesson ? *lesson : context));
  f["coreference_complexity"] = ann.coreference_count(a);
  {
    double total = 0;
    for (int j = 1; j < round; ++j) total += cosine(ae[round], ae[j]);
    f["semantic_cohesion"] = round == 1 ? 0.0 : total / (round - 1);
    auto terms = key_terms(context);
    std::size_t covered = 0;
    for (const auto& k : terms) covered += exposure.count(k);
    f["coverage_of_key_plots"] =
        terms.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(terms.size());
  }

  // performance / contextual
  f["prior_knowledge_estimate"] = acc[0];
  f["student_confidence"] = acc[round - 1];
  f["improvement_in_questions"] = ann.depth(q) - ann.depth(qs[1]);
  {
    std::set<std::string> previous;
    for (int j = 1; j < round; ++j)
      for (const auto& w : text::words(as[j])) previous.insert(w);
    auto current = unique_words(a);
    std::size_t repeated = 0;
    for (const auto& w : current) repeated += previous.count(w);
    f["redundancy_in_answers"] = round == 1 || current.empty()
                                     ? 0.0
                                     : static_cast<double>(repeated) / static_cast<double>(current.size());
  }
  f["politeness_social_cues"] =
      static_cast<double>(count_in(qw, lexicon::polite_words()) + count_in(aw, lexicon::polite_words()));
  f["meta_linguistic_feedback"] = contains_any(a, lexicon::meta_phrases()) ? 1.0 : 0.0;
  f["learning_gain"] = acc[round] - acc[round - 1];

  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (!std::isfinite(f.values[i]))
      throw NonFinite(std::string("feature ") + std::string(kFeatureNames[i]) + " is not finite");
  return f;
}

std::vector<FeatureRow> build_feature_matrix(
    const std::vector<dialogue::Transcript>& transcripts,
    const std::map<std::string, corpus::ContextDocument>& docs, const Annotator& annotator,
    const std::map<corpus::Domain, KeywordSet>& keywords) {
  std::vector<const dialogue::Transcript*> order;
  for (const auto& t : transcripts) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->run_id < b->run_id; });

  static const KeywordSet kNone;
  std::vector<FeatureRow> rows;
  for (const auto* t : order) {
    auto doc = docs.find(t->concept_id);
    if (doc == docs.end()) continue;
    auto kw = keywords.find(doc->second.domain);
    std::set<int> evals;
    for (const auto& e : t->events)
      if (e.type == EventType::QuizEval && e.accuracy) evals.insert(e.round);
    for (int r = 1; r <= t->completed_rounds(); ++r) {
      if (!evals.count(r) || !evals.count(r - 1) || !evals.count(0)) continue;
      rows.push_back({t->run_id, t->concept_id, t->domain, r,
                      extract_round_features(*t, r, doc->second, annotator,
                                             kw == keywords.end() ? kNone : kw->second)});
    }
  }
  return rows;
}

Design design_matrix(const std::vector<FeatureRow>& rows) {
  static const std::size_t kType = feature_index("question_type");
  static const std::size_t kLabel = feature_index("learning_gain");
  Design d;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (i == kLabel) continue;
    if (i == kType) {
      for (int t = 1; t <= static_cast<int>(kQuestionTypeIndicators); ++t)
        d.columns.push_back("question_type_" + std::string(to_string(static_cast<QuestionType>(t))));
      continue;
    }
    d.columns.emplace_back(kFeatureNames[i]);
  }
  for (const auto& r : rows) {
    std::vector<double> x;
    x.reserve(d.columns.size());
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (i == kLabel) continue;
      if (i == kType) {
        for (double v : r.features.question_type_indicators()) x.push_back(v);
        continue;
      }
      x.push_back(r.features.values[i]);
    }
    d.x.push_back(std::move(x));
    d.y.push_back(r.features.values[kLabel]);
  }
  return d;
}

void write_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
  csv::Row header = {"run_id", "concept_id", "domain", "round"};
  for (auto n : kFeatureNames) header.emplace_back(n);
  csv::write_row(out, header);
  for (const auto& r : rows) {
    csv::Row row = {r.run_id, r.concept_id, r.domain, std::to_string(r.round)};
    for (double v : r.features.values) row.push_back(csv::format_double(v));
    csv::write_row(out, row);
  }
}

std::vector<FeatureRow> read_csv(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) return {};
  if (rows.front().size() != 4 + kFeatureCount) throw ParseError("feature file has the wrong header");
  std::vector<FeatureRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 4 + kFeatureCount)
      throw ParseError("feature file row " + std::to_string(i) + " has the wrong width");
    FeatureRow r;
    r.run_id = row[0];
    r.concept_id = row[1];
    r.domain = row[2];
    try {
      r.round = std::stoi(row[3]);
      for (std::size_t k = 0; k < kFeatureCount; ++k) r.features.values[k] = std::stod(row[4 + k]);
    } catch (const std::exception&) {
      throw ParseError("feature file row " + std::to_string(i) + " has a non-numeric value");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace interact::features
