// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "interact/authoring.hpp"
#include "interact/corpus.hpp"
#include "interact/dialogue.hpp"
#include "interact/features.hpp"
#include "interact/gainmodel.hpp"
#include "interact/pipeline.hpp"
#include "interact/scoring.hpp"
#include "interact/text.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace interact;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Check = std::function<Outcome()>;

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

std::unique_ptr<provider::ScriptedProvider> e2e_provider() {
  return provider::ScriptedProvider::from_file(fixtures() / "e2e" / "script.json");
}

pipeline::Options e2e_options(const fs::path& out) {
  pipeline::Options o;
  o.manifest = fixtures() / "e2e" / "manifest.json";
  o.out = out;
  o.scripted = fixtures() / "e2e" / "script.json";
  o.scenarios = {"static-lesson", "dynamic-no-lesson", "dynamic-lesson"};
  o.seeds = {0, 1, 2};
  o.rounds = 5;
  return o;
}

// Authors and runs the e2e matrix under `out`; returns the provider log.
std::vector<provider::LoggedRequest> run_e2e(const fs::path& out, double* seconds = nullptr) {
  auto o = e2e_options(out);
  auto p = e2e_provider();
  std::ostringstream log;
  auto start = std::chrono::steady_clock::now();
  pipeline::cmd_author(o, *p, log);
  pipeline::cmd_run(o, *p, log);
  if (seconds)
    *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return p->log();
}

// A concept's material, quiz and lesson authored with the e2e script.
struct Concept {
  std::unique_ptr<provider::ScriptedProvider> provider = e2e_provider();
  prompts::PromptSet prompts = prompts::PromptSet::defaults();
  authoring::ConceptMaterial material;
  authoring::Quiz quiz;
  authoring::Lesson lesson;

  Concept() {
    auto manifest = corpus::load_manifest(fixtures() / "e2e" / "manifest.json");
    material.doc = manifest.contexts.front();
    authoring::AuthoringContext ctx{*provider, prompts, {}, fixed_clock()};
    lesson = authoring::generate_lesson(ctx, material, "teacher");
    quiz = authoring::generate_quiz(ctx, material, "teacher");
    provider->clear_log();
  }

  dialogue::RunOptions options() const {
    dialogue::RunOptions o;
    o.prompts = &prompts;
    o.clock = fixed_clock();
    return o;
  }

  dialogue::ScenarioConfig config(dialogue::Scenario s, int rounds) const {
    dialogue::ScenarioConfig c;
    c.scenario = s;
    c.rounds = rounds;
    c.student_model = "student";
    c.teacher_model = "teacher";
    c.lesson_provider = "teacher";
    return c;
  }
};

Outcome end_to_end() {
  TempDir tmp;
  double seconds = 0;
  run_e2e(tmp.path / "a", &seconds);
  run_e2e(tmp.path / "b");
  auto root_a = tmp.path / "a" / "default";
  auto transcripts = pipeline::load_transcripts(root_a);
  std::size_t violations = 0;
  for (const auto& t : transcripts) violations += dialogue::check_event_order(t).empty() ? 0 : 1;
  bool identical = tree_bytes(root_a) == tree_bytes(tmp.path / "b" / "default");
  std::ostringstream d;
  d << transcripts.size() << " transcripts, " << violations << " order violations, " << seconds
    << " s, identical=" << (identical ? "yes" : "no");
  return {transcripts.size() == 27 && violations == 0 && seconds < 10.0 && identical, d.str()};
}

Outcome information_asymmetry() {
  TempDir tmp;
  auto log = run_e2e(tmp.path);
  auto manifest = corpus::load_manifest(fixtures() / "e2e" / "manifest.json");
  std::size_t student = 0, student_leaks = 0, teacher = 0, teacher_with_body = 0;
  for (const auto& entry : log) {
    const auto text = entry.request.joined_text();
    bool has_body = false;
    for (const auto& doc : manifest.contexts) has_body = has_body || text.find(doc.body) != std::string::npos;
    if (entry.request.tag.rfind("student.", 0) == 0) {
      ++student;
      student_leaks += has_body;
    } else if (entry.request.tag == "teacher.answer") {
      ++teacher;
      teacher_with_body += has_body;
    }
  }
  std::ostringstream d;
  d << student_leaks << "/" << student << " student requests carry a body; " << teacher_with_body << "/"
    << teacher << " teacher answers do";
  return {student > 0 && teacher > 0 && student_leaks == 0 && teacher_with_body == teacher, d.str()};
}

Outcome filter_bound() {
  auto run = [](const char* weak_reply) {
    Concept c;
    c.provider = std::make_unique<provider::ScriptedProvider>();
    int regen = 0;
    c.provider->set_responder([&](const provider::ChatRequest& r) -> std::optional<std::string> {
      if (r.tag == "author.probe") return std::string(weak_reply);
      ++regen;
      return "DIFFICULTY: College\nQUESTION: Which detail of verse " + std::to_string(regen) +
             " is accurate?\nA) one\nB) two\nC) three\nD) four\nANSWER: A";
    });
    // Key every question A so a weak reply of "A" is always right.
    auto quiz = c.quiz;
    for (auto& q : quiz.questions) q.answer_key = 'A';
    authoring::AuthoringContext ctx{*c.provider, c.prompts, {}, fixed_clock()};
    return authoring::adversarial_filter(ctx, c.material, quiz, "weak", "teacher").quiz;
  };
  auto right = run("A");
  auto wrong = run("B");
  bool ok = !right.questions.empty() && !wrong.questions.empty();
  for (const auto& q : right.questions) ok = ok && q.filter_attempts == 5 && !q.survived_filter;
  for (const auto& q : wrong.questions) ok = ok && q.filter_attempts == 1 && q.survived_filter;
  std::ostringstream d;
  d << "always-right: attempts=" << right.questions.front().filter_attempts
    << " survived=" << right.questions.front().survived_filter
    << "; always-wrong: attempts=" << wrong.questions.front().filter_attempts
    << " survived=" << wrong.questions.front().survived_filter;
  return {ok, d.str()};
}

scoring::EvaluationRecord rec(const std::string& model, const std::string& scenario, int round, double pct) {
  scoring::EvaluationRecord r;
  r.run_id = scenario + "__" + model;
  r.concept_id = "c";
  r.domain = "song_lyrics";
  r.scenario = scenario;
  r.round = round;
  r.accuracy = pct / 100.0;
  r.n_questions = 9;
  r.model = model;
  return r;
}

Outcome scoring_arithmetic() {
  std::vector<scoring::EvaluationRecord> records{
      rec("gpt-4o-mini", "dynamic-no-lesson", 0, 47.91), rec("gpt-4o-mini", "dynamic-no-lesson", 5, 73.68),
      rec("gpt-4o-mini", "dynamic-lesson", 0, 78.83),    rec("gpt-4o-mini", "dynamic-lesson", 5, 81.23),
      rec("llama-8b", "dynamic-no-lesson", 0, 38.12),    rec("llama-8b", "dynamic-no-lesson", 5, 60.13),
      rec("teacher", "teacher-static", 0, 90.05)};
  std::string mini, llama;
  for (const auto& row : scoring::delta_table(records)) {
    if (row.domain != "all" || row.scenario != "dynamic-no-lesson") continue;
    if (row.model == "gpt-4o-mini") mini = row.rendered_delta();
    if (row.model == "llama-8b") llama = row.rendered_delta();
  }
  std::vector<scoring::EvaluationRecord> mini_only(records.begin(), records.begin() + 4);
  mini_only.push_back(records.back());
  auto rows = scoring::recovery_percentages(mini_only);
  double recovery = rows.empty() ? NAN : rows.front().agg_rec_vs_teacher;
  std::ostringstream d;
  d << "deltas " << mini << " / " << llama << ", recovery " << text::fixed(recovery, 4);
  return {mini == "+25.77" && llama == "+22.01" && std::fabs(recovery - 81.82) <= 0.01, d.str()};
}

Outcome bootstrap_coverage() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  int covered = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(30);
    for (auto& x : v) x = normal(rng);
    auto ci = scoring::bootstrap_ci(v, 0.95, 1000, static_cast<std::uint64_t>(trial));
    if (ci.low <= 0.0 && 0.0 <= ci.high) ++covered;
  }
  std::vector<double> constant(30, 0.42);
  auto flat = scoring::bootstrap_ci(constant);
  double width = flat.high - flat.low;
  std::ostringstream d;
  d << "coverage " << covered / 10.0 << "%, constant-data width " << width;
  return {covered >= 920 && covered <= 980 && width == 0.0, d.str()};
}

Outcome feature_oracle() {
  auto dir = fixtures() / "features";
  auto manifest = corpus::load_manifest(dir / "manifest.json");
  auto transcript = dialogue::read_transcript(dir / "run");
  auto keywords = features::load_keywords(dir / "keywords", corpus::Domain::SongLyrics);
  std::ifstream in(dir / "expected.json");
  auto expected = nlohmann::json::parse(in);
  features::HeuristicAnnotator ann;
  double worst = 0.0;
  std::size_t compared = 0;
  for (const auto& row : expected["rows"]) {
    auto f = features::extract_round_features(transcript, row["round"].get<int>(), manifest.contexts.front(), ann,
                                              keywords);
    for (auto name : features::kFeatureNames) {
      worst = std::max(worst, std::fabs(f[name] - row["features"][std::string(name)].get<double>()));
      ++compared;
    }
  }
  double flesch = features::readability("The cat sat.");
  double ttr = features::type_token_ratio("the the the");
  auto e = features::hash_embed("Hold on to now, the chorus says");
  double self = features::cosine(e, e);
  std::ostringstream d;
  d << compared << " values, max |diff| " << worst << "; flesch " << text::fixed(flesch, 4) << ", ttr "
    << ttr << ", self-cosine " << self;
  return {compared == 20 * features::kFeatureCount && worst <= 1e-9 && std::fabs(flesch - 119.19) <= 0.01 &&
              ttr == 1.0 / 3.0 && self == 1.0,
          d.str()};
}

Outcome regressor() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  gainmodel::Matrix x;
  std::vector<double> y;
  for (int i = 0; i < 50; ++i) {
    x.push_back({i + u(rng), u(rng)});
    y.push_back(u(rng));
  }
  gainmodel::ForestParams single;
  single.n_trees = 1;
  single.bootstrap = false;
  single.min_samples_leaf = 1;
  single.features_per_split = 2;
  double train_r2 = gainmodel::r2_score(y, gainmodel::predict(gainmodel::fit(x, y, single), x));

  auto start = std::chrono::steady_clock::now();
  auto data = gainmodel::synthetic_benchmark(500, 0.1, 5, 42);
  auto split = gainmodel::train_test_split(500, 0.2, 7);
  auto model = gainmodel::fit(gainmodel::take_rows(data.x, split.train), gainmodel::take(data.y, split.train),
                              gainmodel::ForestParams{});
  double held_out = gainmodel::r2_score(gainmodel::take(data.y, split.test),
                                        gainmodel::predict(model, gainmodel::take_rows(data.x, split.test)));
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double r2_example = gainmodel::r2_score({1, 2, 3}, {1, 2, 4});
  std::ostringstream d;
  d << "train R2 " << train_r2 << ", held-out R2 " << text::fixed(held_out, 4) << " in " << text::fixed(seconds, 2)
    << " s, r2([1,2,3],[1,2,4]) " << r2_example;
  return {train_r2 == 1.0 && held_out >= 0.8 && seconds < 30.0 && r2_example == 0.5, d.str()};
}

Outcome borrowed_mode() {
  Concept c;
  auto source = dialogue::run_scenario(c.config(dialogue::Scenario::DynamicWithLesson, 5), c.material, c.quiz,
                                       c.lesson, *c.provider, c.options());
  c.provider->clear_log();
  auto cfg = c.config(dialogue::Scenario::BorrowedTranscript, 5);
  cfg.source_run_id = source.run_id;
  dialogue::run_borrowed(cfg, c.material, c.quiz, source, *c.provider, c.options());
  std::size_t dialogue_calls = 0, eval_calls = 0;
  for (const auto& e : c.provider->log()) {
    const auto& tag = e.request.tag;
    if (tag == "student.question" || tag == "teacher.answer" || tag == "student.summary") ++dialogue_calls;
    if (tag == "student.quiz") ++eval_calls;
  }
  std::ostringstream d;
  d << dialogue_calls << " dialogue calls, " << eval_calls << " evaluation calls for " << c.quiz.questions.size()
    << " questions (" << c.provider->call_count() << " total)";
  return {dialogue_calls == 0 && eval_calls == c.quiz.questions.size() &&
              c.provider->call_count() == c.quiz.questions.size(),
          d.str()};
}

Outcome round_zero_equivalence() {
  Concept a, b;
  auto dynamic = dialogue::run_scenario(a.config(dialogue::Scenario::DynamicWithLesson, 0), a.material, a.quiz,
                                        a.lesson, *a.provider, a.options());
  auto fixed = dialogue::run_scenario(b.config(dialogue::Scenario::StaticWithLesson, 5), b.material, b.quiz,
                                      b.lesson, *b.provider, b.options());
  auto* x = dynamic.last_eval();
  auto* y = fixed.last_eval();
  bool ok = x && y && x->round == 0 && y->round == 0 && x->accuracy == y->accuracy;
  std::ostringstream d;
  if (x && y) d << "dynamic-lesson@0 " << *x->accuracy << ", static-lesson " << *y->accuracy;
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, Check> checks[] = {
      {"end-to-end scripted run", end_to_end},
      {"information asymmetry", information_asymmetry},
      {"adversarial filter bound", filter_bound},
      {"scoring arithmetic", scoring_arithmetic},
      {"bootstrap coverage", bootstrap_coverage},
      {"feature oracle equivalence", feature_oracle},
      {"regressor sanity", regressor},
      {"borrowed-interaction mode", borrowed_mode},
      {"round-0 equivalence", round_zero_equivalence},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
