#include "interact/dialogue.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "interact/errors.hpp"
#include "interact/text.hpp"

namespace interact::dialogue {

using authoring::ConceptMaterial;
using authoring::Quiz;
using provider::ChatMessage;
using provider::ChatRequest;
using provider::Role;

namespace {

struct ScenarioName {
  Scenario s;
  std::string_view name;
};

constexpr ScenarioName kScenarios[] = {
    {Scenario::StaticWithLesson, "static-lesson"},
    {Scenario::DynamicNoLesson, "dynamic-no-lesson"},
    {Scenario::DynamicWithLesson, "dynamic-lesson"},
    {Scenario::BorrowedTranscript, "borrowed"},
    {Scenario::TeacherStatic, "teacher-static"},
};

struct EventName {
  EventType t;
  std::string_view name;
};

constexpr EventName kEvents[] = {
    {EventType::LessonShown, "lesson_shown"},   {EventType::StudentQuestion, "student_question"},
    {EventType::TeacherAnswer, "teacher_answer"}, {EventType::Summary, "summary"},
    {EventType::QuizEval, "quiz_eval"},
};

const prompts::PromptSet& default_prompts() {
  static const prompts::PromptSet kDefaults = prompts::PromptSet::defaults();
  return kDefaults;
}

std::string qa_pair(const std::string& q, const std::string& a) { return "Q: " + q + "\nA: " + a; }

// Question/answer pairs in round order, from `after_round` (exclusive).
std::vector<std::string> qa_pairs(const std::vector<Event>& events, int after_round = 0) {
  std::map<int, std::pair<std::string, std::string>> by_round;
  std::map<int, bool> answered;
  for (const auto& e : events) {
    if (e.round <= after_round) continue;
    if (e.type == EventType::StudentQuestion) by_round[e.round].first = e.content;
    if (e.type == EventType::TeacherAnswer) {
      by_round[e.round].second = e.content;
      answered[e.round] = true;
    }
  }
  std::vector<std::string> out;
  for (const auto& [round, qa] : by_round)
    if (answered[round]) out.push_back(qa_pair(qa.first, qa.second));
  return out;
}

std::string with_blank_line(const std::string& s) { return s.empty() ? s : s + "\n\n"; }

// Appends events to the run directory and replays them on resume.
class RunLog {
 public:
  RunLog(Transcript& t, const RunOptions& opts) : t_(t), clock_(opts.clock) {
    if (!opts.run_dir) return;
    dir_ = *opts.run_dir;
    std::filesystem::create_directories(*dir_);
    auto meta_path = *dir_ / "run.json";
    if (std::filesystem::exists(meta_path)) {
      auto existing = read_transcript(*dir_);
      if (existing.run_id != t.run_id || existing.concept_id != t.concept_id ||
          !(existing.config == t.config))
        throw ConfigError("run directory " + dir_->string() + " holds a different run");
      existing_ = std::move(existing.events);
      complete_ = existing.complete;
      // Drop lines written after the last event the state file vouches for.
      rewrite_events(existing_);
    } else {
      nlohmann::ordered_json meta;
      meta["run_id"] = t.run_id;
      meta["concept_id"] = t.concept_id;
      meta["domain"] = t.domain;
      meta["config"] = to_json(t.config);
      write_atomic(meta_path, meta.dump(2) + "\n");
      std::ofstream(*dir_ / "transcript.jsonl", std::ios::binary | std::ios::trunc);
      write_state(-1, "", false);
    }
    if (complete_) {
      t_.events = existing_;
      t_.complete = true;
    }
  }

  bool already_complete() const { return complete_; }

  template <typename Produce>
  const Event& step(EventType type, int round, Produce&& produce) {
    const std::size_t idx = t_.events.size();
    if (idx < existing_.size()) {
      const auto& e = existing_[idx];
      if (e.type != type || e.round != round)
        throw ConfigError("resumed transcript diverges at event " + std::to_string(idx));
      t_.events.push_back(e);
      return t_.events.back();
    }
    Event e = produce();
    e.type = type;
    e.round = round;
    e.ts = clock_();
    t_.events.push_back(std::move(e));
    if (dir_) {
      std::ofstream out(*dir_ / "transcript.jsonl", std::ios::binary | std::ios::app);
      out << event_json(t_, t_.events.back()).dump() << '\n';
      out.flush();
      write_state(static_cast<long>(idx), std::string(to_string(type)), false);
    }
    return t_.events.back();
  }

  void finish() {
    t_.complete = true;
    if (dir_) {
      long last = static_cast<long>(t_.events.size()) - 1;
      write_state(last, last >= 0 ? std::string(to_string(t_.events.back().type)) : "", true);
    }
  }

 private:
  static void write_atomic(const std::filesystem::path& path, const std::string& body) {
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << body;
    }
    std::filesystem::rename(tmp, path);
  }

  void write_state(long last_event, const std::string& type, bool complete) {
    nlohmann::ordered_json s;
    s["last_event"] = last_event;
    s["event_type"] = type;
    s["complete"] = complete;
    write_atomic(*dir_ / "state", s.dump() + "\n");
  }

  void rewrite_events(const std::vector<Event>& events) {
    std::string body;
    for (const auto& e : events) body += event_json(t_, e).dump() + "\n";
    write_atomic(*dir_ / "transcript.jsonl", body);
  }

  Transcript& t_;
  Clock clock_;
  std::optional<std::filesystem::path> dir_;
  std::vector<Event> existing_;
  bool complete_ = false;
};

std::string ask(provider::ChatProvider& provider, const std::string& model, ChatMessage msg,
                const Sampling& sampling, std::optional<std::int64_t> seed, std::string tag) {
  ChatRequest req;
  req.model_id = model;
  req.messages.push_back(std::move(msg));
  req.temperature = sampling.temperature;
  req.max_tokens = sampling.max_tokens;
  req.seed = seed;
  req.tag = std::move(tag);
  return req.model_id.empty() ? throw ConfigError("request without a model id")
                              : provider.chat(req).text;
}

Event eval_event(std::vector<scoring::QuestionResult> results, std::string role) {
  Event e;
  e.role = std::move(role);
  e.accuracy = scoring::score_quiz(results);
  e.per_question = std::move(results);
  return e;
}

}  // namespace

std::string_view to_string(Scenario s) {
  for (const auto& n : kScenarios)
    if (n.s == s) return n.name;
  return "unknown";
}

Scenario scenario_from_string(std::string_view s) {
  for (const auto& n : kScenarios)
    if (n.name == s) return n.s;
  throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

bool requires_lesson(Scenario s) {
  return s == Scenario::StaticWithLesson || s == Scenario::DynamicWithLesson;
}

bool is_dynamic(Scenario s) {
  return s == Scenario::DynamicNoLesson || s == Scenario::DynamicWithLesson;
}

std::string_view to_string(SummaryMode m) { return m == SummaryMode::Concat ? "concat" : "summarize"; }

SummaryMode summary_mode_from_string(std::string_view s) {
  if (s == "concat") return SummaryMode::Concat;
  if (s == "summarize") return SummaryMode::Summarize;
  throw ConfigError("unknown summary mode '" + std::string(s) + "'");
}

std::string_view to_string(EventType t) {
  for (const auto& n : kEvents)
    if (n.t == t) return n.name;
  return "unknown";
}

EventType event_type_from_string(std::string_view s) {
  for (const auto& n : kEvents)
    if (n.name == s) return n.t;
  throw ParseError("unknown event type '" + std::string(s) + "'");
}

void ScenarioConfig::validate() const {
  if (rounds < 0) throw ConfigError("rounds must be >= 0");
  if (student_model.empty() && scenario != Scenario::TeacherStatic)
    throw ConfigError("student model is required");
  if (teacher_model.empty() && scenario != Scenario::BorrowedTranscript &&
      scenario != Scenario::StaticWithLesson)
    throw ConfigError("teacher model is required");
  if (scenario == Scenario::BorrowedTranscript && !source_run_id)
    throw ConfigError("borrowed scenario needs a source transcript");
  for (const auto* s : {&question, &quiz, &summary, &answer})
    if (s->temperature < 0.0 || s->temperature > 2.0 || s->max_tokens < 1)
      throw ConfigError("sampling settings out of range");
}

int ScenarioConfig::effective_rounds() const { return is_dynamic(scenario) ? rounds : 0; }

nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  auto sampling = [](const Sampling& s) {
    nlohmann::ordered_json j;
    j["temperature"] = s.temperature;
    j["max_tokens"] = s.max_tokens;
    return j;
  };
  nlohmann::ordered_json j;
  j["scenario"] = std::string(to_string(c.scenario));
  j["rounds"] = c.rounds;
  j["student_model"] = c.student_model;
  j["teacher_model"] = c.teacher_model;
  j["lesson_provider"] = c.lesson_provider;
  j["summary_mode"] = std::string(to_string(c.summary_mode));
  j["seed"] = c.seed;
  j["forward_seed"] = c.forward_seed;
  j["evaluate_every_round"] = c.evaluate_every_round;
  j["question"] = sampling(c.question);
  j["quiz"] = sampling(c.quiz);
  j["summary"] = sampling(c.summary);
  j["answer"] = sampling(c.answer);
  if (c.source_run_id) j["source_run_id"] = *c.source_run_id;
  return j;
}

ScenarioConfig config_from_json(const nlohmann::json& j) {
  try {
    auto sampling = [](const nlohmann::json& s) {
      return Sampling{s.at("temperature").get<double>(), s.at("max_tokens").get<int>()};
    };
    ScenarioConfig c;
    c.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    c.rounds = j.at("rounds").get<int>();
    c.student_model = j.at("student_model").get<std::string>();
    c.teacher_model = j.at("teacher_model").get<std::string>();
    c.lesson_provider = j.value("lesson_provider", std::string());
    c.summary_mode = summary_mode_from_string(j.at("summary_mode").get<std::string>());
    c.seed = j.at("seed").get<std::int64_t>();
    c.forward_seed = j.value("forward_seed", true);
    c.evaluate_every_round = j.value("evaluate_every_round", true);
    c.question = sampling(j.at("question"));
    c.quiz = sampling(j.at("quiz"));
    c.summary = sampling(j.at("summary"));
    c.answer = sampling(j.at("answer"));
    if (j.contains("source_run_id")) c.source_run_id = j["source_run_id"].get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario config: ") + e.what());
  }
}

const Event* Transcript::last_eval() const {
  for (auto it = events.rbegin(); it != events.rend(); ++it)
    if (it->type == EventType::QuizEval) return &*it;
  return nullptr;
}

int Transcript::completed_rounds() const {
  int r = 0;
  for (const auto& e : events)
    if (e.type == EventType::TeacherAnswer) r = std::max(r, e.round);
  return r;
}

std::string make_run_id(const ScenarioConfig& cfg, std::string_view concept_id) {
  std::string model = cfg.scenario == Scenario::TeacherStatic ? cfg.teacher_model : cfg.student_model;
  std::string id = std::string(to_string(cfg.scenario)) + "__" + model;
  if (is_dynamic(cfg.scenario)) id += "__" + cfg.teacher_model;
  if (cfg.scenario == Scenario::BorrowedTranscript && cfg.source_run_id) id += "__from_" + *cfg.source_run_id;
  id += "__" + std::string(concept_id) + "__s" + std::to_string(cfg.seed);
  return text::sanitize_id(id);
}

std::vector<std::string> check_event_order(const Transcript& t) {
  std::vector<std::string> bad;
  const auto& cfg = t.config;
  auto count = [&](EventType type, int round) {
    return std::count_if(t.events.begin(), t.events.end(),
                         [&](const Event& e) { return e.type == type && e.round == round; });
  };

  for (std::size_t i = 1; i < t.events.size(); ++i)
    if (t.events[i].round < t.events[i - 1].round)
      bad.push_back("round decreases at event " + std::to_string(i));

  if (cfg.scenario == Scenario::BorrowedTranscript) {
    if (t.events.size() != 1 || t.events.front().type != EventType::QuizEval)
      bad.push_back("borrowed transcript must hold exactly one QuizEval");
    return bad;
  }

  for (std::size_t i = 0; i < t.events.size(); ++i)
    if (t.events[i].type == EventType::LessonShown && (i != 0 || t.events[i].round != 0))
      bad.push_back("LessonShown must be the first event");
  if (requires_lesson(cfg.scenario) && (t.events.empty() || t.events.front().type != EventType::LessonShown))
    bad.push_back("scenario requires a LessonShown event");
  if (t.complete && count(EventType::QuizEval, 0) != 1) bad.push_back("QuizEval(0) must appear exactly once");

  const int rounds = t.complete ? cfg.effective_rounds() : t.completed_rounds();
  for (int r = 1; r <= std::max(rounds, t.completed_rounds()); ++r) {
    std::vector<EventType> expected = {EventType::StudentQuestion, EventType::TeacherAnswer};
    if (cfg.summary_mode == SummaryMode::Summarize) expected.push_back(EventType::Summary);
    if (cfg.evaluate_every_round || r == cfg.effective_rounds()) expected.push_back(EventType::QuizEval);
    std::vector<EventType> actual;
    for (const auto& e : t.events)
      if (e.round == r) actual.push_back(e.type);
    bool ok = t.complete || r < rounds
                  ? actual == expected
                  : actual.size() <= expected.size() &&
                        std::equal(actual.begin(), actual.end(), expected.begin());
    if (r > cfg.effective_rounds()) ok = false;
    if (!ok) bad.push_back("round " + std::to_string(r) + " events out of order");
  }
  for (const auto& e : t.events)
    if (e.round > cfg.effective_rounds()) {
      bad.push_back("event beyond the configured rounds");
      break;
    }
  return bad;
}

std::string build_student_context(const std::vector<Event>& events, SummaryMode mode) {
  std::vector<std::string> sections;
  for (const auto& e : events)
    if (e.type == EventType::LessonShown) sections.push_back("Lesson:\n" + e.content);

  int summarized_through = 0;
  if (mode == SummaryMode::Summarize) {
    const Event* latest = nullptr;
    for (const auto& e : events)
      if (e.type == EventType::Summary) latest = &e;
    if (latest) {
      sections.push_back("Notes from the conversation so far:\n" + latest->content);
      summarized_through = latest->round;
    }
  }
  auto pairs = qa_pairs(events, summarized_through);
  if (!pairs.empty()) sections.push_back("Conversation so far:\n" + text::join(pairs, "\n\n"));
  return text::join(sections, "\n\n");
}

std::vector<scoring::QuestionResult> evaluate_quiz(provider::ChatProvider& provider,
                                                   const EvalRequest& req, const Quiz& quiz,
                                                   const prompts::PromptSet& prompts) {
  std::vector<scoring::QuestionResult> out;
  for (const auto& q : quiz.questions) {
    auto prompt = prompts.render(prompts::kQuizAnswer, {{"context", with_blank_line(req.context)},
                                                        {"question", authoring::format_question(q)}});
    auto msg = ChatMessage::text(Role::User, std::move(prompt));
    if (req.image) msg.content.emplace_back(*req.image);
    auto raw = ask(provider, req.model, std::move(msg), req.sampling, req.seed, req.tag);
    auto letter = scoring::parse_answer(raw);
    out.push_back({q.id, raw, letter, letter == q.answer_key});
  }
  return out;
}

Transcript run_scenario(const ScenarioConfig& cfg, const ConceptMaterial& material, const Quiz& quiz,
                        const std::optional<authoring::Lesson>& lesson,
                        provider::ChatProvider& provider, const RunOptions& opts) {
  cfg.validate();
  if (cfg.scenario == Scenario::BorrowedTranscript)
    throw ConfigError("borrowed transcripts are evaluated with run_borrowed");
  if (requires_lesson(cfg.scenario) != lesson.has_value())
    throw ConfigError(std::string("scenario ") + std::string(to_string(cfg.scenario)) +
                      (lesson ? " takes no lesson" : " requires a lesson"));
  if (quiz.questions.empty()) throw EmptyQuiz("quiz for '" + material.doc.id + "' has no questions");

  const auto& prompts = opts.prompts ? *opts.prompts : default_prompts();
  const auto& doc = material.doc;
  const std::optional<std::int64_t> seed =
      cfg.forward_seed ? std::optional<std::int64_t>(cfg.seed) : std::nullopt;
  const prompts::Slots concept_slots = {{"kind", std::string(authoring::domain_noun(doc.domain))},
                                        {"title", doc.title}};

  Transcript t;
  t.run_id = opts.run_id.empty() ? make_run_id(cfg, doc.id) : opts.run_id;
  t.concept_id = doc.id;
  t.domain = std::string(corpus::to_string(doc.domain));
  t.config = cfg;

  RunLog log(t, opts);
  if (log.already_complete()) return t;

  if (lesson)
    log.step(EventType::LessonShown, 0, [&] {
      Event e;
      e.role = "lesson";
      e.content = lesson->text;
      return e;
    });

  auto evaluate = [&](int round) {
    log.step(EventType::QuizEval, round, [&] {
      EvalRequest req;
      req.sampling = cfg.quiz;
      req.seed = seed;
      if (cfg.scenario == Scenario::TeacherStatic) {
        req.model = cfg.teacher_model;
        req.context = "Material:\n" + authoring::context_text(material);
        req.image = material.image;
        req.tag = "teacher.quiz";
        return eval_event(evaluate_quiz(provider, req, quiz, prompts), "teacher");
      }
      req.model = cfg.student_model;
      req.context = build_student_context(t.events, cfg.summary_mode);
      req.tag = "student.quiz";
      return eval_event(evaluate_quiz(provider, req, quiz, prompts), "student");
    });
  };

  evaluate(0);

  const int rounds = cfg.effective_rounds();
  for (int r = 1; r <= rounds; ++r) {
    const auto& question = log.step(EventType::StudentQuestion, r, [&] {
      std::vector<std::string> asked;
      for (const auto& e : t.events)
        if (e.type == EventType::StudentQuestion) asked.push_back("- " + e.content);
      auto slots = concept_slots;
      slots["context"] = with_blank_line(build_student_context(t.events, cfg.summary_mode));
      slots["asked"] = asked.empty() ? "(none)" : text::join(asked, "\n");
      Event e;
      e.role = "student";
      e.content = ask(provider, cfg.student_model,
                      ChatMessage::text(Role::User, prompts.render(prompts::kStudentQuestion, slots)),
                      cfg.question, seed, "student.question");
      return e;
    });
    const std::string question_text = question.content;

    const auto& answer = log.step(EventType::TeacherAnswer, r, [&] {
      auto pairs = qa_pairs(t.events);
      auto slots = concept_slots;
      slots["context"] = authoring::context_text(material);
      slots["history"] = pairs.empty() ? "(none)" : text::join(pairs, "\n\n");
      slots["question"] = question_text;
      Event e;
      e.role = "teacher";
      e.content = ask(provider, cfg.teacher_model,
                      authoring::material_message(material, prompts.render(prompts::kTeacherAnswer, slots)),
                      cfg.answer, seed, "teacher.answer");
      return e;
    });
    const std::string answer_text = answer.content;

    if (cfg.summary_mode == SummaryMode::Summarize)
      log.step(EventType::Summary, r, [&] {
        std::string previous = "(none yet)";
        for (const auto& e : t.events)
          if (e.type == EventType::Summary) previous = e.content;
        auto slots = concept_slots;
        slots["summary"] = previous;
        slots["exchange"] = qa_pair(question_text, answer_text);
        Event e;
        e.role = "student";
        e.content = ask(provider, cfg.student_model,
                        ChatMessage::text(Role::User, prompts.render(prompts::kStudentSummarize, slots)),
                        cfg.summary, seed, "student.summary");
        return e;
      });

    if (cfg.evaluate_every_round || r == rounds) evaluate(r);
  }

  log.finish();
  return t;
}

Transcript run_borrowed(const ScenarioConfig& cfg, const ConceptMaterial& material, const Quiz& quiz,
                        const Transcript& source, provider::ChatProvider& provider,
                        const RunOptions& opts) {
  if (cfg.scenario != Scenario::BorrowedTranscript)
    throw ConfigError("run_borrowed needs the borrowed scenario");
  if (source.concept_id != material.doc.id)
    throw SourceMismatch("source transcript covers '" + source.concept_id + "', not '" +
                         material.doc.id + "'");
  if (!source.complete) throw ConfigError("source transcript " + source.run_id + " is incomplete");
  ScenarioConfig c = cfg;
  c.source_run_id = source.run_id;
  c.validate();
  if (quiz.questions.empty()) throw EmptyQuiz("quiz for '" + material.doc.id + "' has no questions");

  const auto& prompts = opts.prompts ? *opts.prompts : default_prompts();

  std::vector<Event> dialogue;
  for (const auto& e : source.events)
    if (e.type == EventType::LessonShown || e.type == EventType::StudentQuestion ||
        e.type == EventType::TeacherAnswer)
      dialogue.push_back(e);

  Transcript t;
  t.run_id = opts.run_id.empty() ? make_run_id(c, material.doc.id) : opts.run_id;
  t.concept_id = material.doc.id;
  t.domain = std::string(corpus::to_string(material.doc.domain));
  t.config = c;

  RunLog log(t, opts);
  if (log.already_complete()) return t;

  log.step(EventType::QuizEval, source.completed_rounds(), [&] {
    EvalRequest req;
    req.model = c.student_model;
    req.context = build_student_context(dialogue, SummaryMode::Concat);
    req.sampling = c.quiz;
    if (c.forward_seed) req.seed = c.seed;
    return eval_event(evaluate_quiz(provider, req, quiz, prompts), "student");
  });
  log.finish();
  return t;
}

// ---------------------------------------------------------------------------
// Persistence

nlohmann::ordered_json event_json(const Transcript& t, const Event& e) {
  nlohmann::ordered_json j;
  j["run_id"] = t.run_id;
  j["concept_id"] = t.concept_id;
  j["scenario"] = std::string(to_string(t.config.scenario));
  j["seed"] = t.config.seed;
  j["round"] = e.round;
  j["event_type"] = std::string(to_string(e.type));
  if (!e.role.empty()) j["role"] = e.role;
  if (e.type != EventType::QuizEval) j["content"] = e.content;
  if (e.accuracy) j["accuracy"] = *e.accuracy;
  if (e.type == EventType::QuizEval) {
    auto pq = nlohmann::ordered_json::array();
    for (const auto& r : e.per_question) {
      nlohmann::ordered_json x;
      x["question_id"] = r.question_id;
      x["raw_answer"] = r.raw_answer;
      x["parsed_letter"] = r.parsed_letter ? nlohmann::ordered_json(std::string(1, *r.parsed_letter))
                                           : nlohmann::ordered_json(nullptr);
      x["correct"] = r.correct;
      pq.push_back(std::move(x));
    }
    j["per_question"] = std::move(pq);
  }
  j["ts"] = e.ts;
  return j;
}

Event event_from_json(const nlohmann::json& j) {
  try {
    Event e;
    e.type = event_type_from_string(j.at("event_type").get<std::string>());
    e.round = j.at("round").get<int>();
    e.role = j.value("role", std::string());
    e.content = j.value("content", std::string());
    if (j.contains("accuracy")) e.accuracy = j["accuracy"].get<double>();
    if (j.contains("per_question"))
      for (const auto& x : j["per_question"]) {
        scoring::QuestionResult r;
        r.question_id = x.at("question_id").get<std::string>();
        r.raw_answer = x.at("raw_answer").get<std::string>();
        if (!x.at("parsed_letter").is_null()) r.parsed_letter = x["parsed_letter"].get<std::string>().at(0);
        r.correct = x.at("correct").get<bool>();
        e.per_question.push_back(std::move(r));
      }
    e.ts = j.value("ts", std::string());
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("transcript event: ") + ex.what());
  }
}

void write_transcript(const Transcript& t, const std::filesystem::path& run_dir) {
  std::filesystem::create_directories(run_dir);
  nlohmann::ordered_json meta;
  meta["run_id"] = t.run_id;
  meta["concept_id"] = t.concept_id;
  meta["domain"] = t.domain;
  meta["config"] = to_json(t.config);
  std::ofstream(run_dir / "run.json", std::ios::binary | std::ios::trunc) << meta.dump(2) << '\n';
  {
    std::ofstream out(run_dir / "transcript.jsonl", std::ios::binary | std::ios::trunc);
    for (const auto& e : t.events) out << event_json(t, e).dump() << '\n';
  }
  nlohmann::ordered_json s;
  s["last_event"] = static_cast<long>(t.events.size()) - 1;
  s["event_type"] = t.events.empty() ? "" : std::string(to_string(t.events.back().type));
  s["complete"] = t.complete;
  std::ofstream(run_dir / "state", std::ios::binary | std::ios::trunc) << s.dump() << '\n';
}

Transcript read_transcript(const std::filesystem::path& run_dir) {
  auto read_json = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ParseError("cannot open " + p.string());
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(p.string() + ": " + e.what());
    }
  };
  auto meta = read_json(run_dir / "run.json");
  Transcript t;
  try {
    t.run_id = meta.at("run_id").get<std::string>();
    t.concept_id = meta.at("concept_id").get<std::string>();
    t.domain = meta.value("domain", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError((run_dir / "run.json").string() + ": " + e.what());
  }
  t.config = config_from_json(meta.at("config"));

  long last_event = -1;
  if (std::filesystem::exists(run_dir / "state")) {
    auto state = read_json(run_dir / "state");
    last_event = state.value("last_event", -1L);
    t.complete = state.value("complete", false);
  }
  std::ifstream in(run_dir / "transcript.jsonl");
  std::string line;
  while (static_cast<long>(t.events.size()) <= last_event && std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    try {
      t.events.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error&) {
      break;  // torn final line from an interrupted write
    }
  }
  if (static_cast<long>(t.events.size()) <= last_event) t.complete = false;
  return t;
}

bool is_complete_run(const std::filesystem::path& run_dir) {
  std::ifstream in(run_dir / "state");
  if (!in) return false;
  try {
    return nlohmann::json::parse(in).value("complete", false);
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

std::vector<scoring::EvaluationRecord> records_of(const Transcript& t) {
  std::vector<scoring::EvaluationRecord> out;
  const auto& cfg = t.config;
  const auto& model = cfg.scenario == Scenario::TeacherStatic ? cfg.teacher_model : cfg.student_model;
  for (const auto& e : t.events) {
    if (e.type != EventType::QuizEval || !e.accuracy) continue;
    out.push_back({t.run_id, t.concept_id, t.domain, std::string(to_string(cfg.scenario)), cfg.seed,
                   e.round, *e.accuracy, static_cast<int>(e.per_question.size()), model});
  }
  return out;
}

}  // namespace interact::dialogue
