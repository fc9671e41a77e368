#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interact/clock.hpp"
#include "interact/corpus.hpp"
#include "interact/prompts.hpp"
#include "interact/provider.hpp"

namespace interact::authoring {

// A context document together with its decoded image payload, if any. The
// image is only ever shown to the lesson author, quiz author and teacher.
struct ConceptMaterial {
  corpus::ContextDocument doc;
  std::optional<provider::ImagePart> image;
};

// Reads the image of an Images document relative to media_root.
ConceptMaterial load_material(const corpus::ContextDocument& doc,
                              const std::filesystem::path& media_root);

// Human-readable noun for prompts ("song", "news article", ...).
std::string_view domain_noun(corpus::Domain d);

// Value of the {{ context }} slot: the body for text documents, a pointer to
// the attached image (plus caption) for Images.
std::string context_text(const ConceptMaterial& m);

// A user message holding the rendered prompt, followed by the image part when
// the material has one.
provider::ChatMessage material_message(const ConceptMaterial& m, std::string rendered);

enum class Difficulty { MiddleSchool, College, Graduate, Untiered };
std::string_view to_string(Difficulty d);
std::string_view display_name(Difficulty d);  // "Middle-School"
Difficulty difficulty_from_string(std::string_view s);

struct Lesson {
  std::string concept_id;
  std::string provider_model;
  std::string text;
  std::string created_at;

  bool operator==(const Lesson&) const = default;
};

struct QuizQuestion {
  std::string id;
  Difficulty difficulty = Difficulty::Untiered;
  std::string stem;
  std::vector<std::string> options;  // A-D
  char answer_key = 'A';
  int filter_attempts = 1;
  bool survived_filter = true;

  bool operator==(const QuizQuestion&) const = default;
};

struct Quiz {
  std::string concept_id;
  std::vector<QuizQuestion> questions;

  bool operator==(const Quiz&) const = default;
};

// Number of questions and their tiers for a domain: 3x MiddleSchool,
// 3x College, 3x Graduate for text; 5x Untiered for Images.
std::vector<Difficulty> expected_tiers(corpus::Domain d);

// "Question: ...\nA) ...\n...\nAnswer:" as shown to the answering model.
std::string format_question(const QuizQuestion& q);

struct AuthoringSettings {
  double lesson_temperature = 0.7;
  int lesson_max_tokens = 1024;
  double quiz_temperature = 0.7;
  int quiz_max_tokens = 2048;
  double probe_temperature = 0.0;
  int probe_max_tokens = 10;
  int max_attempts = 5;
  std::optional<std::int64_t> seed;
};

struct AuthoringContext {
  provider::ChatProvider& provider;
  const prompts::PromptSet& prompts;
  AuthoringSettings settings{};
  Clock clock = system_clock();
};

// Throws EmptyLesson when the completion is blank.
Lesson generate_lesson(const AuthoringContext& ctx, const ConceptMaterial& m,
                       const std::string& lesson_model);

// Parsed form of one question block. Returns nullopt for malformed blocks.
std::optional<QuizQuestion> parse_question_block(std::string_view block);
// Splits a completion into blocks on lines consisting of '-' only (3+).
std::vector<std::string> split_blocks(std::string_view completion);

// Draft quiz with tiers assigned by position. A wrong block count triggers one
// whole-quiz re-ask; each malformed block triggers one single-question re-ask.
// Throws QuizParseError if a re-ask does not fix the problem.
Quiz generate_quiz(const AuthoringContext& ctx, const ConceptMaterial& m,
                   const std::string& strong_model);

struct FilterEvent {
  std::string concept_id;
  std::string question_id;
  int attempt = 1;
  std::string weak_answer;
  bool correct = false;

  bool operator==(const FilterEvent&) const = default;
};

struct FilterResult {
  Quiz quiz;
  std::vector<FilterEvent> audit;
};

// Probes every question against weak_model without context; a correctly
// answered question is regenerated (same tier) by strong_model, up to
// max_attempts versions in total. The last version is kept either way.
FilterResult adversarial_filter(const AuthoringContext& ctx, const ConceptMaterial& m,
                                const Quiz& quiz, const std::string& weak_model,
                                const std::string& strong_model);

enum class LintKind { DuplicateStem, AnswerLeakage, UnequalOptions, Ungrounded, Structure };
std::string_view to_string(LintKind k);

struct LintFinding {
  std::string question_id;
  LintKind kind;
  std::string message;
};

// Automatable quality checks. Structure findings cover the count/tier and
// option invariants.
std::vector<LintFinding> lint_quiz(const Quiz& quiz, const corpus::ContextDocument& doc);

// Lowercased words of at least three letters that are not stopwords.
std::vector<std::string> content_words(std::string_view s);

// Persistence
nlohmann::ordered_json to_json(const Quiz& q);
Quiz quiz_from_json(const nlohmann::json& j);
void write_quiz(const Quiz& q, const std::filesystem::path& path);
Quiz read_quiz(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const Lesson& l);
Lesson lesson_from_json(const nlohmann::json& j);
void write_lesson(const Lesson& l, const std::filesystem::path& path);
Lesson read_lesson(const std::filesystem::path& path);

void append_audit(const std::vector<FilterEvent>& events, const std::filesystem::path& path);
std::vector<FilterEvent> read_audit(const std::filesystem::path& path);

}  // namespace interact::authoring
