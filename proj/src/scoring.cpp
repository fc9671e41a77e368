#include "interact/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "interact/csv.hpp"
#include "interact/errors.hpp"
#include "interact/text.hpp"

namespace interact::scoring {

std::optional<char> parse_answer(std::string_view raw) {
  for (const auto& token : text::split_whitespace(raw)) {
    auto core = text::strip_punct(token);
    if (core.size() != 1) continue;
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(core[0])));
    if (c >= 'A' && c <= 'D') return c;
  }
  return std::nullopt;
}

double score_quiz(std::span<const QuestionResult> results) {
  if (results.empty()) throw EmptyQuiz("cannot score a quiz with no questions");
  auto correct = std::count_if(results.begin(), results.end(),
                               [](const QuestionResult& r) { return r.correct; });
  return static_cast<double>(correct) / static_cast<double>(results.size());
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw EmptyInput("quantile of empty data");
  double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

BootstrapResult bootstrap_ci(std::span<const double> values, double level, int resamples,
                             std::uint64_t seed) {
  if (values.empty()) throw EmptyInput("bootstrap of empty data");
  if (resamples < 1) throw ConfigError("bootstrap needs at least one resample");
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); }))
    return {values.front(), values.front(), values.front()};

  const auto n = values.size();
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[pick(rng)];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double alpha = 1.0 - level;
  BootstrapResult out{mean, quantile_sorted(means, alpha / 2.0), quantile_sorted(means, 1.0 - alpha / 2.0)};
  // Percentile intervals of heavily skewed samples can exclude the point
  // estimate; widen to keep low <= mean <= high.
  out.low = std::min(out.low, mean);
  out.high = std::max(out.high, mean);
  return out;
}

// ---------------------------------------------------------------------------
// Records file

namespace {

const csv::Row kHeader = {"run_id", "concept_id", "domain",      "scenario", "seed",
                          "round",  "accuracy",   "n_questions", "model"};

template <typename T>
T parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_same_v<T, double>) v = std::stod(s, &used);
    else v = static_cast<T>(std::stoll(s, &used));
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("records: bad ") + what + " '" + s + "'");
  }
}

}  // namespace

void write_records(const std::filesystem::path& path, std::span<const EvaluationRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  csv::write_row(out, kHeader);
  for (const auto& r : records)
    csv::write_row(out, {r.run_id, r.concept_id, r.domain, r.scenario, std::to_string(r.seed),
                         std::to_string(r.round), csv::format_double(r.accuracy),
                         std::to_string(r.n_questions), r.model});
}

std::vector<EvaluationRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  auto rows = csv::read(in);
  std::vector<EvaluationRecord> out;
  if (rows.empty()) return out;
  if (rows.front().size() < 8 || rows.front()[0] != "run_id")
    throw ParseError(path.string() + ": missing records header");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 8 && row.size() != 9)
      throw ParseError(path.string() + ": row " + std::to_string(i) + " has " +
                       std::to_string(row.size()) + " fields");
    EvaluationRecord r;
    r.run_id = row[0];
    r.concept_id = row[1];
    r.domain = row[2];
    r.scenario = row[3];
    r.seed = parse_number<std::int64_t>(row[4], "seed");
    r.round = parse_number<int>(row[5], "round");
    r.accuracy = parse_number<double>(row[6], "accuracy");
    r.n_questions = parse_number<int>(row[7], "n_questions");
    if (row.size() == 9) r.model = row[8];
    if (r.n_questions < 1 || !(r.accuracy >= 0.0 && r.accuracy <= 1.0))
      throw ParseError(path.string() + ": row " + std::to_string(i) + " out of range");
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

bool is_text_domain_name(std::string_view d) { return d != "images"; }

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Per (model, domain, scenario): concept -> seed -> (start accuracy, final
// round accuracy). Final round is the largest round seen for the run.
struct RunPoints {
  std::optional<double> start;
  int final_round = -1;
  double final_acc = 0.0;
};

using GroupKey = std::tuple<std::string, std::string, std::string>;
using ConceptRuns = std::map<std::string, std::map<std::int64_t, RunPoints>>;

std::map<GroupKey, ConceptRuns> index_records(std::span<const EvaluationRecord> records) {
  std::map<GroupKey, ConceptRuns> idx;
  for (const auto& r : records) {
    auto& run = idx[{r.model, r.domain, r.scenario}][r.concept_id][r.seed];
    if (r.round == 0) run.start = r.accuracy;
    if (r.round > run.final_round) {
      run.final_round = r.round;
      run.final_acc = r.accuracy;
    }
  }
  return idx;
}

// Seeds first, then concepts. Returns percent.
std::optional<double> group_value(const ConceptRuns& runs, bool final) {
  std::vector<double> per_concept;
  for (const auto& [concept_id, seeds] : runs) {
    std::vector<double> per_seed;
    for (const auto& [seed, pts] : seeds) {
      if (final) per_seed.push_back(pts.final_acc);
      else if (pts.start) per_seed.push_back(*pts.start);
    }
    if (!per_seed.empty()) per_concept.push_back(mean_of(per_seed));
  }
  if (per_concept.empty()) return std::nullopt;
  return 100.0 * mean_of(per_concept);
}

}  // namespace

RecoveryRow compute_recovery(std::string model, std::span<const DomainPerformance> domains) {
  if (domains.empty()) throw EmptyInput("recovery needs at least one domain");
  RecoveryRow row;
  row.model = std::move(model);
  row.n_domains = domains.size();
  std::vector<double> vs_lesson;
  std::vector<double> vs_teacher;
  for (const auto& d : domains) {
    row.start_wo += d.start_wo;
    row.end_wo += d.end_wo;
    row.start_w += d.start_w;
    row.end_w += d.end_w;
    row.teacher += d.teacher;
    if (d.start_w > 0.0) vs_lesson.push_back(100.0 * d.end_wo / d.start_w);
    if (d.teacher > 0.0) vs_teacher.push_back(100.0 * d.end_wo / d.teacher);
  }
  const auto n = static_cast<double>(domains.size());
  row.start_wo /= n;
  row.end_wo /= n;
  row.start_w /= n;
  row.end_w /= n;
  row.teacher /= n;
  row.rec_vs_lesson_start = vs_lesson.empty() ? 0.0 : mean_of(vs_lesson);
  row.rec_vs_teacher = vs_teacher.empty() ? 0.0 : mean_of(vs_teacher);
  row.agg_rec_vs_lesson_start = row.start_w > 0.0 ? 100.0 * row.end_wo / row.start_w : 0.0;
  row.agg_rec_vs_teacher = row.teacher > 0.0 ? 100.0 * row.end_wo / row.teacher : 0.0;
  return row;
}

std::vector<DomainPerformance> domain_performance(std::span<const EvaluationRecord> records,
                                                  std::string_view model,
                                                  const RecoveryOptions& opts) {
  auto idx = index_records(records);
  // The teacher reference is whichever model ran teacher-static in the domain.
  std::vector<EvaluationRecord> teacher_records;
  for (const auto& r : records)
    if (r.scenario == kTeacherStatic) {
      teacher_records.push_back(r);
      teacher_records.back().model = model;
    }
  auto teacher_idx = index_records(teacher_records);
  std::set<std::string> domains;
  for (const auto& r : records)
    if (r.model == model && r.scenario != kTeacherStatic &&
        (!opts.text_domains_only || is_text_domain_name(r.domain)))
      domains.insert(r.domain);

  std::vector<DomainPerformance> out;
  for (const auto& domain : domains) {
    auto lookup = [&](std::string_view scenario) -> const ConceptRuns& {
      const auto& source = scenario == kTeacherStatic ? teacher_idx : idx;
      auto it = source.find({std::string(model), domain, std::string(scenario)});
      if (it == source.end())
        throw MissingScenario("model '" + std::string(model) + "', domain '" + domain +
                              "': no " + std::string(scenario) + " records");
      return it->second;
    };
    auto value = [&](std::string_view scenario, bool final) {
      auto v = group_value(lookup(scenario), final);
      if (!v)
        throw MissingScenario("model '" + std::string(model) + "', domain '" + domain +
                              "': no round-0 " + std::string(scenario) + " records");
      return *v;
    };
    DomainPerformance d;
    d.domain = domain;
    d.start_wo = value(kDynamicNoLesson, false);
    d.end_wo = value(kDynamicNoLesson, true);
    d.start_w = value(kDynamicLesson, false);
    d.end_w = value(kDynamicLesson, true);
    d.teacher = value(kTeacherStatic, true);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<RecoveryRow> recovery_percentages(std::span<const EvaluationRecord> records,
                                              const RecoveryOptions& opts) {
  std::set<std::string> models;
  for (const auto& r : records)
    if (r.scenario != kTeacherStatic && (!opts.text_domains_only || is_text_domain_name(r.domain)))
      models.insert(r.model);
  std::vector<RecoveryRow> out;
  for (const auto& model : models) {
    auto domains = domain_performance(records, model, opts);
    out.push_back(compute_recovery(model, domains));
  }
  return out;
}

std::string format_delta(double delta) {
  auto s = text::fixed(delta, 2);
  if (s.front() == '-' || s.find_first_not_of("0.") == std::string::npos) return s;
  return "+" + s;
}

std::string DeltaRow::rendered_delta() const { return format_delta(delta); }

std::vector<DeltaRow> delta_table(std::span<const EvaluationRecord> records) {
  auto idx = index_records(records);
  std::vector<DeltaRow> out;
  // (model, scenario) -> per-domain rows for the "all" average.
  std::map<std::pair<std::string, std::string>, std::vector<DeltaRow>> by_model;
  for (const auto& [key, runs] : idx) {
    const auto& [model, domain, scenario] = key;
    auto start = group_value(runs, false);
    if (!start) continue;  // borrowed runs have no baseline
    auto end = *group_value(runs, true);
    DeltaRow row{model, domain, scenario, *start, end, end - *start};
    by_model[{model, scenario}].push_back(row);
    out.push_back(std::move(row));
  }
  for (const auto& [key, rows] : by_model) {
    DeltaRow all{key.first, "all", key.second, 0.0, 0.0, 0.0};
    for (const auto& r : rows) {
      all.start += r.start;
      all.end += r.end;
    }
    all.start /= static_cast<double>(rows.size());
    all.end /= static_cast<double>(rows.size());
    all.delta = all.end - all.start;
    out.push_back(std::move(all));
  }
  return out;
}

std::vector<AggregateCell> aggregate_curves(std::span<const EvaluationRecord> records,
                                            int resamples, std::uint64_t seed) {
  using CellKey = std::tuple<std::string, std::string, std::string, int>;
  std::map<CellKey, std::map<std::string, std::vector<double>>> cells;
  for (const auto& r : records)
    cells[{r.model, r.domain, r.scenario, r.round}][r.concept_id].push_back(r.accuracy);

  std::vector<AggregateCell> out;
  for (const auto& [key, concepts] : cells) {
    std::vector<double> values;
    for (const auto& [concept_id, seeds] : concepts) values.push_back(mean_of(seeds));
    auto ci = bootstrap_ci(values, 0.95, resamples, seed);
    const auto& [model, domain, scenario, round] = key;
    out.push_back({model, domain, scenario, round, ci.mean, ci.low, ci.high, values.size()});
  }
  return out;
}

}  // namespace interact::scoring
