#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interact/authoring.hpp"
#include "interact/clock.hpp"
#include "interact/prompts.hpp"
#include "interact/provider.hpp"
#include "interact/scoring.hpp"

namespace interact::dialogue {

enum class Scenario {
  StaticWithLesson,
  DynamicNoLesson,
  DynamicWithLesson,
  BorrowedTranscript,
  // Teacher answers the quiz with the ground-truth context; reference point
  // for recovery percentages.
  TeacherStatic,
};

std::string_view to_string(Scenario s);  // "static-lesson", ...
Scenario scenario_from_string(std::string_view s);
bool requires_lesson(Scenario s);
bool is_dynamic(Scenario s);

enum class SummaryMode { Concat, Summarize };
std::string_view to_string(SummaryMode m);
SummaryMode summary_mode_from_string(std::string_view s);

struct Sampling {
  double temperature = 0.0;
  int max_tokens = 1;
  bool operator==(const Sampling&) const = default;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::DynamicWithLesson;
  int rounds = 5;
  std::string student_model;
  std::string teacher_model;
  std::string lesson_provider;
  SummaryMode summary_mode = SummaryMode::Concat;
  std::int64_t seed = 0;
  // Send the seed on the wire with every dialogue and evaluation request.
  bool forward_seed = true;
  // false: QuizEval only at round 0 and the final round.
  bool evaluate_every_round = true;

  Sampling question{1.0, 256};
  Sampling quiz{0.0, 10};
  Sampling summary{0.7, 256};
  Sampling answer{0.7, 512};

  // BorrowedTranscript only.
  std::optional<std::string> source_run_id;

  // Throws ConfigError.
  void validate() const;
  // Rounds actually played: 0 for the static and borrowed scenarios.
  int effective_rounds() const;
  bool operator==(const ScenarioConfig&) const = default;
};

nlohmann::ordered_json to_json(const ScenarioConfig& c);
ScenarioConfig config_from_json(const nlohmann::json& j);

enum class EventType { LessonShown, StudentQuestion, TeacherAnswer, Summary, QuizEval };
std::string_view to_string(EventType t);
EventType event_type_from_string(std::string_view s);

struct Event {
  EventType type = EventType::QuizEval;
  int round = 0;
  std::string role;
  std::string content;
  std::optional<double> accuracy;
  std::vector<scoring::QuestionResult> per_question;
  std::string ts;

  bool operator==(const Event&) const = default;
};

struct Transcript {
  std::string run_id;
  std::string concept_id;
  std::string domain;
  ScenarioConfig config;
  std::vector<Event> events;
  bool complete = false;

  const Event* last_eval() const;
  // Highest round with a teacher answer; 0 when none.
  int completed_rounds() const;
};

std::string make_run_id(const ScenarioConfig& cfg, std::string_view concept_id);

// Event-order invariant violations; empty when the transcript is well formed.
std::vector<std::string> check_event_order(const Transcript& t);

// The student's context after the given events: the lesson (if shown) and the
// question/answer pairs verbatim (concat), or the latest rolling summary plus
// any pairs after it (summarize). Empty events and no lesson give "".
std::string build_student_context(const std::vector<Event>& events, SummaryMode mode);

struct RunOptions {
  const prompts::PromptSet* prompts = nullptr;  // defaults when null
  Clock clock = system_clock();
  // When set, events are appended to <run_dir>/transcript.jsonl as they
  // happen and an existing partial run there is resumed.
  std::optional<std::filesystem::path> run_dir;
  // Defaults to make_run_id(cfg, concept).
  std::string run_id;
};

// Executes one static or dynamic scenario. Provider errors propagate; events
// persisted before the failure stay on disk and are reused on the next call.
Transcript run_scenario(const ScenarioConfig& cfg, const authoring::ConceptMaterial& material,
                        const authoring::Quiz& quiz, const std::optional<authoring::Lesson>& lesson,
                        provider::ChatProvider& provider, const RunOptions& opts = {});

// Evaluates cfg.student_model on another run's dialogue. No dialogue is
// generated; one QuizEval at the source's final round. Throws SourceMismatch
// when the source belongs to another concept.
Transcript run_borrowed(const ScenarioConfig& cfg, const authoring::ConceptMaterial& material,
                        const authoring::Quiz& quiz, const Transcript& source,
                        provider::ChatProvider& provider, const RunOptions& opts = {});

struct EvalRequest {
  std::string model;
  std::string context;  // may be empty
  std::optional<provider::ImagePart> image;
  Sampling sampling{0.0, 10};
  std::optional<std::int64_t> seed;
  std::string tag = "student.quiz";
};

// One fresh request per question; each question is asked exactly once.
std::vector<scoring::QuestionResult> evaluate_quiz(provider::ChatProvider& provider,
                                                   const EvalRequest& req,
                                                   const authoring::Quiz& quiz,
                                                   const prompts::PromptSet& prompts);

// Persistence
nlohmann::ordered_json event_json(const Transcript& t, const Event& e);
Event event_from_json(const nlohmann::json& j);
void write_transcript(const Transcript& t, const std::filesystem::path& run_dir);
Transcript read_transcript(const std::filesystem::path& run_dir);
bool is_complete_run(const std::filesystem::path& run_dir);

std::vector<scoring::EvaluationRecord> records_of(const Transcript& t);

}  // namespace interact::dialogue
