#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace interact::scoring {

// First whitespace token that, once surrounding punctuation is stripped, is a
// single letter A-D (either case). "The answer is C" -> 'C'.
std::optional<char> parse_answer(std::string_view raw);

struct QuestionResult {
  std::string question_id;
  std::string raw_answer;
  std::optional<char> parsed_letter;
  bool correct = false;

  bool operator==(const QuestionResult&) const = default;
};

// correct / n. Unparsed answers count as incorrect. Throws EmptyQuiz.
double score_quiz(std::span<const QuestionResult> results);

struct BootstrapResult {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

// Percentile bootstrap of the mean. Throws EmptyInput.
BootstrapResult bootstrap_ci(std::span<const double> values, double level = 0.95,
                             int resamples = 1000, std::uint64_t seed = 0);

// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

// Scenario labels as they appear in records.
inline constexpr std::string_view kStaticLesson = "static-lesson";
inline constexpr std::string_view kDynamicNoLesson = "dynamic-no-lesson";
inline constexpr std::string_view kDynamicLesson = "dynamic-lesson";
inline constexpr std::string_view kBorrowed = "borrowed";
inline constexpr std::string_view kTeacherStatic = "teacher-static";

struct EvaluationRecord {
  std::string run_id;
  std::string concept_id;
  std::string domain;
  std::string scenario;
  std::int64_t seed = 0;
  int round = 0;
  double accuracy = 0.0;
  int n_questions = 1;
  // Evaluated model. Written as a trailing column; files without it read as "".
  std::string model;

  bool operator==(const EvaluationRecord&) const = default;
};

void write_records(const std::filesystem::path& path, std::span<const EvaluationRecord> records);
std::vector<EvaluationRecord> read_records(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Aggregation

// Percent-scale values for one domain.
struct DomainPerformance {
  std::string domain;
  double start_wo = 0.0;  // dynamic without lesson, round 0
  double end_wo = 0.0;    // dynamic without lesson, final round
  double start_w = 0.0;   // dynamic with lesson, round 0
  double end_w = 0.0;     // dynamic with lesson, final round
  double teacher = 0.0;   // teacher static accuracy
};

struct RecoveryRow {
  std::string model;
  // Averages over domains.
  double start_wo = 0.0;
  double end_wo = 0.0;
  double start_w = 0.0;
  double end_w = 0.0;
  double teacher = 0.0;
  // Mean over domains of 100 * end_wo / reference.
  double rec_vs_lesson_start = 0.0;
  double rec_vs_teacher = 0.0;
  // 100 * mean(end_wo) / mean(reference).
  double agg_rec_vs_lesson_start = 0.0;
  double agg_rec_vs_teacher = 0.0;
  std::size_t n_domains = 0;
};

// Throws EmptyInput when domains is empty.
RecoveryRow compute_recovery(std::string model, std::span<const DomainPerformance> domains);

struct RecoveryOptions {
  // Restrict to text domains, as the aggregate table does.
  bool text_domains_only = true;
};

// One row per model. Throws MissingScenario when a model lacks any of the
// dynamic-no-lesson, dynamic-lesson or teacher-static records for a domain.
std::vector<RecoveryRow> recovery_percentages(std::span<const EvaluationRecord> records,
                                              const RecoveryOptions& opts = {});

// Per-domain performance for one model after seeds-then-concepts averaging.
// Throws MissingScenario.
std::vector<DomainPerformance> domain_performance(std::span<const EvaluationRecord> records,
                                                  std::string_view model,
                                                  const RecoveryOptions& opts = {});

struct DeltaRow {
  std::string model;
  std::string domain;  // "all" for the cross-domain average
  std::string scenario;
  double start = 0.0;  // percent
  double end = 0.0;    // percent
  double delta = 0.0;  // end - start

  std::string rendered_delta() const;  // "+25.77"
};

// Two decimals with an explicit sign; a delta that rounds to zero is "0.00".
std::string format_delta(double delta);

// Start (round 0) and end (final round) per (model, domain, scenario), plus
// an "all" row averaging the domains.
std::vector<DeltaRow> delta_table(std::span<const EvaluationRecord> records);

struct AggregateCell {
  std::string model;
  std::string domain;
  std::string scenario;
  int round = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};

// Per-round curves: one cell per (model, domain, scenario, round); the
// bootstrap runs over concept-level values averaged across seeds.
std::vector<AggregateCell> aggregate_curves(std::span<const EvaluationRecord> records,
                                            int resamples = 1000, std::uint64_t seed = 0);

}  // namespace interact::scoring
