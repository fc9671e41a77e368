#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "interact/corpus.hpp"
#include "interact/dialogue.hpp"

namespace interact::features {

inline constexpr std::size_t kFeatureCount = 45;
inline constexpr std::size_t kEmbeddingDim = 256;

// Column order of the feature file; the last entry is the label.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    // question
    "question_length", "question_complexity", "lexical_sophistication", "named_entity_count",
    "question_informativeness", "question_directness", "politeness_hedging", "question_type",
    "question_novelty", "question_specificity",
    // teacher response
    "response_length", "info_density", "response_novelty", "response_correctness",
    "response_completeness", "response_complexity", "entity_diversity", "temporal_positioning",
    "use_of_examples",
    // interaction dynamics
    "turn_index", "cumulative_exposure", "student_adaptation", "teacher_adaptation",
    "information_gain", "topic_shifts", "unanswered_queries", "progressive_elaboration",
    // linguistic / style
    "lexical_diversity_student", "lexical_diversity_teacher", "domain_specific_terms",
    "sentence_length_variability", "readability_score", "passive_voice_count",
    "modal_language_count",
    // semantic
    "semantic_similarity_to_summary", "coreference_complexity", "semantic_cohesion",
    "coverage_of_key_plots",
    // performance / contextual
    "prior_knowledge_estimate", "student_confidence", "improvement_in_questions",
    "redundancy_in_answers", "politeness_social_cues", "meta_linguistic_feedback",
    "learning_gain"};

// Index of a feature name; throws std::out_of_range for unknown names.
std::size_t feature_index(std::string_view name);

// Question starters; the stored question_type value is the enum's integer.
enum class QuestionType { Other = 0, What, Who, Where, When, Why, How, Which, YesNo };
inline constexpr std::size_t kQuestionTypeIndicators = 8;
QuestionType question_type(std::string_view question);
std::string_view to_string(QuestionType t);

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double& operator[](std::string_view name) { return values[feature_index(name)]; }
  double operator[](std::string_view name) const { return values[feature_index(name)]; }
  // One-vs-rest indicators for What..YesNo (Other is all zeros).
  std::array<double, kQuestionTypeIndicators> question_type_indicators() const;
  bool operator==(const FeatureVector&) const = default;
};

// Signed feature-hashing vector. Raw integer counts are kept so cosine of a
// text with itself is exactly 1.
struct Embedding {
  std::vector<std::int64_t> counts;
  bool is_zero() const;
  std::vector<double> unit() const;  // L2-normalized; zeros for a zero vector
};

std::uint64_t fnv1a64(std::string_view s);
Embedding hash_embed(std::string_view text, std::size_t dim = kEmbeddingDim, bool bigrams = true);
// In [-1, 1]; 0 when either vector is zero.
double cosine(const Embedding& a, const Embedding& b);

struct EntitySpan {
  std::size_t begin = 0;  // whitespace-token indices, end exclusive
  std::size_t end = 0;
  std::string text;
};

// Capability boundary for the linguistic signals the features depend on.
class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual std::string id() const = 0;
  virtual std::vector<EntitySpan> entities(std::string_view text) const = 0;
  virtual double depth(std::string_view text) const = 0;
  virtual int passive_count(std::string_view text) const = 0;
  virtual int syllables(std::string_view word) const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
  virtual int coreference_count(std::string_view text) const = 0;
};

// Deterministic rule-based implementation of every capability.
class HeuristicAnnotator final : public Annotator {
 public:
  std::string id() const override { return "heuristic-v1"; }
  std::vector<EntitySpan> entities(std::string_view text) const override;
  double depth(std::string_view text) const override;
  int passive_count(std::string_view text) const override;
  int syllables(std::string_view word) const override;
  Embedding embed(std::string_view text) const override;
  int coreference_count(std::string_view text) const override;
};

// Free-standing heuristics (the annotator delegates to these).
int syllables(std::string_view word);
double readability(std::string_view text);
double readability(std::string_view text, const Annotator& annotator);
double type_token_ratio(std::string_view text);
double depth_proxy(std::string_view text);
std::vector<EntitySpan> entity_spans(std::string_view text);
int passive_count(std::string_view text);
int coreference_count(std::string_view text);
// Token-overlap F1 over lowercased word multisets; 0 when either is empty.
double overlap_f1(std::string_view a, std::string_view b);
// Most frequent non-stopword words (length >= 3), ties alphabetical.
std::vector<std::string> key_terms(std::string_view text, std::size_t n = 20);

using KeywordSet = std::unordered_set<std::string>;
std::filesystem::path default_keywords_dir();
// One word per line; blank lines and '#' comments skipped. Missing file -> empty.
KeywordSet load_keywords(const std::filesystem::path& dir, corpus::Domain domain);
std::map<corpus::Domain, KeywordSet> load_all_keywords(const std::filesystem::path& dir);

// Features for dialogue round `round` (>= 1). Throws MissingRound when the
// round lacks its question, answer, or the QuizEvals at round and round-1.
FeatureVector extract_round_features(const dialogue::Transcript& transcript, int round,
                                     const corpus::ContextDocument& doc,
                                     const Annotator& annotator, const KeywordSet& keywords);

struct FeatureRow {
  std::string run_id;
  std::string concept_id;
  std::string domain;
  int round = 0;
  FeatureVector features;
  bool operator==(const FeatureRow&) const = default;
};

// One row per (run, round >= 1) that has QuizEvals at round and round-1; rows
// are ordered by run_id then round. Runs whose concept is missing from `docs`
// are skipped.
std::vector<FeatureRow> build_feature_matrix(
    const std::vector<dialogue::Transcript>& transcripts,
    const std::map<std::string, corpus::ContextDocument>& docs, const Annotator& annotator,
    const std::map<corpus::Domain, KeywordSet>& keywords);

// Regression design: question_type expanded to its indicators, label dropped.
struct Design {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> x;
  std::vector<double> y;
};
Design design_matrix(const std::vector<FeatureRow>& rows);

// CSV: run_id,concept_id,domain,round, then the 45 feature columns.
void write_csv(std::ostream& out, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_csv(std::istream& in);

}  // namespace interact::features
