#include "interact/authoring.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "interact/errors.hpp"
#include "interact/lexicon.hpp"
#include "interact/scoring.hpp"
#include "interact/text.hpp"

namespace interact::authoring {

using provider::ChatMessage;
using provider::ChatRequest;
using provider::Role;

ConceptMaterial load_material(const corpus::ContextDocument& doc,
                              const std::filesystem::path& media_root) {
  ConceptMaterial m{doc, std::nullopt};
  if (doc.domain == corpus::Domain::Images && doc.image_path) {
    std::filesystem::path p(*doc.image_path);
    if (p.is_relative()) p = media_root / p;
    m.image = provider::load_image_file(p);
  }
  return m;
}

std::string_view domain_noun(corpus::Domain d) {
  switch (d) {
    case corpus::Domain::SongLyrics:
      return "song";
    case corpus::Domain::NewsArticles:
      return "news article";
    case corpus::Domain::MoviePlots:
      return "movie";
    case corpus::Domain::AcademicPapers:
      return "academic paper";
    case corpus::Domain::Images:
      return "image";
  }
  return "concept";
}

std::string context_text(const ConceptMaterial& m) {
  if (corpus::is_text_domain(m.doc.domain)) return m.doc.body;
  std::string out = "(The image is attached.)";
  if (m.doc.caption && !m.doc.caption->empty()) out += "\nCaption: " + *m.doc.caption;
  return out;
}

ChatMessage material_message(const ConceptMaterial& m, std::string rendered) {
  ChatMessage msg = ChatMessage::text(Role::User, std::move(rendered));
  if (m.image) msg.content.emplace_back(*m.image);
  return msg;
}

namespace {

struct DifficultyName {
  Difficulty d;
  std::string_view wire;
  std::string_view display;
};

constexpr DifficultyName kDifficulties[] = {
    {Difficulty::MiddleSchool, "middle_school", "Middle-School"},
    {Difficulty::College, "college", "College"},
    {Difficulty::Graduate, "graduate", "Graduate"},
    {Difficulty::Untiered, "untiered", "Untiered"},
};

prompts::Slots base_slots(const ConceptMaterial& m) {
  return {{"kind", std::string(domain_noun(m.doc.domain))},
          {"title", m.doc.title},
          {"context", context_text(m)}};
}

std::string ask(const AuthoringContext& ctx, const std::string& model, ChatMessage msg,
                double temperature, int max_tokens, std::string tag) {
  ChatRequest req;
  req.model_id = model;
  req.messages.push_back(std::move(msg));
  req.temperature = temperature;
  req.max_tokens = max_tokens;
  req.seed = ctx.settings.seed;
  req.tag = std::move(tag);
  return ctx.provider.chat(req).text;
}

std::string normalize_stem(std::string_view s) { return text::join(text::words(s), " "); }

// One replacement question of the given tier; `tries` requests at most.
QuizQuestion regenerate_question(const AuthoringContext& ctx, const ConceptMaterial& m,
                                 const std::string& strong_model, Difficulty tier,
                                 const std::vector<std::string>& rejected, const char* tag,
                                 int tries) {
  auto slots = base_slots(m);
  slots["difficulty"] = std::string(display_name(tier));
  std::string listed;
  for (const auto& r : rejected) listed += "- " + r + "\n";
  slots["rejected"] = listed.empty() ? "(none)" : listed;
  auto prompt = ctx.prompts.render(prompts::kQuizRegenerate, slots);

  for (int attempt = 0; attempt < tries; ++attempt) {
    auto reply = ask(ctx, strong_model, material_message(m, prompt), ctx.settings.quiz_temperature,
                     ctx.settings.quiz_max_tokens, attempt == 0 ? tag : std::string(tag) + ".reask");
    auto blocks = split_blocks(reply);
    if (!blocks.empty())
      if (auto q = parse_question_block(blocks.front())) {
        q->difficulty = tier;
        return *q;
      }
  }
  throw QuizParseError("concept '" + m.doc.id + "': " + std::string(display_name(tier)) +
                       " question is still malformed after a re-ask");
}

bool is_dash_line(std::string_view line) {
  auto t = text::trim(line);
  return t.size() >= 3 && std::all_of(t.begin(), t.end(), [](char c) { return c == '-'; });
}

}  // namespace

std::string_view to_string(Difficulty d) {
  for (const auto& n : kDifficulties)
    if (n.d == d) return n.wire;
  return "untiered";
}

std::string_view display_name(Difficulty d) {
  for (const auto& n : kDifficulties)
    if (n.d == d) return n.display;
  return "Untiered";
}

Difficulty difficulty_from_string(std::string_view s) {
  for (const auto& n : kDifficulties)
    if (n.wire == s) return n.d;
  throw ParseError("unknown difficulty '" + std::string(s) + "'");
}

std::vector<Difficulty> expected_tiers(corpus::Domain d) {
  if (d == corpus::Domain::Images) return std::vector<Difficulty>(5, Difficulty::Untiered);
  return {Difficulty::MiddleSchool, Difficulty::MiddleSchool, Difficulty::MiddleSchool,
          Difficulty::College,      Difficulty::College,      Difficulty::College,
          Difficulty::Graduate,     Difficulty::Graduate,     Difficulty::Graduate};
}

std::string format_question(const QuizQuestion& q) {
  std::string out = "Question: " + q.stem + "\n";
  for (std::size_t i = 0; i < q.options.size(); ++i)
    out += std::string(1, static_cast<char>('A' + i)) + ") " + q.options[i] + "\n";
  out += "Answer:";
  return out;
}

Lesson generate_lesson(const AuthoringContext& ctx, const ConceptMaterial& m,
                       const std::string& lesson_model) {
  auto tmpl = ctx.prompts.lesson_template(corpus::to_string(m.doc.domain));
  auto prompt = prompts::render(tmpl, base_slots(m));
  auto reply = ask(ctx, lesson_model, material_message(m, prompt), ctx.settings.lesson_temperature,
                   ctx.settings.lesson_max_tokens, "author.lesson");
  if (text::trim(reply).empty()) throw EmptyLesson("blank lesson for concept '" + m.doc.id + "'");
  return Lesson{m.doc.id, lesson_model, reply, ctx.clock()};
}

std::vector<std::string> split_blocks(std::string_view completion) {
  std::vector<std::string> blocks;
  std::string current;
  auto flush = [&] {
    auto t = text::trim(current);
    if (!t.empty()) blocks.push_back(std::move(t));
    current.clear();
  };
  std::istringstream in{std::string(completion)};
  std::string line;
  while (std::getline(in, line)) {
    if (is_dash_line(line)) {
      flush();
      continue;
    }
    current += line;
    current += '\n';
  }
  flush();
  return blocks;
}

std::optional<QuizQuestion> parse_question_block(std::string_view block) {
  static const std::regex kOption(R"(^\(?([A-Da-d])[\)\.:]\s*(.*)$)");
  QuizQuestion q;
  std::vector<std::optional<std::string>> options(4);
  std::optional<char> answer;
  bool in_stem = false;
  bool seen_option = false;

  std::istringstream in{std::string(block)};
  std::string raw;
  while (std::getline(in, raw)) {
    auto line = text::trim(raw);
    if (line.empty()) continue;
    std::smatch m;
    if (text::starts_with_ci(line, "DIFFICULTY:")) continue;
    if (text::starts_with_ci(line, "QUESTION:")) {
      q.stem = text::trim(line.substr(9));
      in_stem = true;
      continue;
    }
    if (text::starts_with_ci(line, "ANSWER:")) {
      answer = scoring::parse_answer(line.substr(7));
      in_stem = false;
      continue;
    }
    if (std::regex_match(line, m, kOption)) {
      auto idx = static_cast<std::size_t>(std::toupper(static_cast<unsigned char>(m[1].str()[0])) - 'A');
      if (options[idx]) return std::nullopt;  // repeated label
      options[idx] = text::trim(m[2].str());
      in_stem = false;
      seen_option = true;
      continue;
    }
    if (in_stem) q.stem += " " + line;
    else if (q.stem.empty() && !seen_option) {
      q.stem = line;
      in_stem = true;
    }
  }

  if (q.stem.empty() || !answer) return std::nullopt;
  std::set<std::string> distinct;
  for (auto& opt : options) {
    if (!opt || opt->empty()) return std::nullopt;
    if (!distinct.insert(text::to_lower(*opt)).second) return std::nullopt;
    q.options.push_back(*opt);
  }
  q.answer_key = *answer;
  return q;
}

Quiz generate_quiz(const AuthoringContext& ctx, const ConceptMaterial& m,
                   const std::string& strong_model) {
  const auto tiers = expected_tiers(m.doc.domain);
  const auto name = m.doc.domain == corpus::Domain::Images ? prompts::kQuizGenerateImage
                                                           : prompts::kQuizGenerate;
  const auto prompt = ctx.prompts.render(name, base_slots(m));

  auto blocks = split_blocks(ask(ctx, strong_model, material_message(m, prompt),
                                 ctx.settings.quiz_temperature, ctx.settings.quiz_max_tokens,
                                 "author.quiz"));
  if (blocks.size() != tiers.size()) {
    auto reask = prompt + "\n\nYour previous reply contained " + std::to_string(blocks.size()) +
                 " questions. Reply with exactly " + std::to_string(tiers.size()) +
                 " questions in the required format.";
    blocks = split_blocks(ask(ctx, strong_model, material_message(m, reask),
                              ctx.settings.quiz_temperature, ctx.settings.quiz_max_tokens,
                              "author.quiz.reask"));
    if (blocks.size() != tiers.size())
      throw QuizParseError("concept '" + m.doc.id + "': expected " + std::to_string(tiers.size()) +
                           " questions, got " + std::to_string(blocks.size()) + " after a re-ask");
  }

  Quiz quiz{m.doc.id, {}};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto parsed = parse_question_block(blocks[i]);
    QuizQuestion q = parsed ? *parsed
                            : regenerate_question(ctx, m, strong_model, tiers[i], {},
                                                                "author.quiz.item", 1);
    q.id = m.doc.id + "-q" + std::to_string(i + 1);
    q.difficulty = tiers[i];
    q.filter_attempts = 1;
    q.survived_filter = true;
    quiz.questions.push_back(std::move(q));
  }
  return quiz;
}

FilterResult adversarial_filter(const AuthoringContext& ctx, const ConceptMaterial& m,
                                const Quiz& quiz, const std::string& weak_model,
                                const std::string& strong_model) {
  const int max_attempts = ctx.settings.max_attempts;
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");

  FilterResult out{Quiz{quiz.concept_id, {}}, {}};
  for (const auto& original : quiz.questions) {
    QuizQuestion current = original;
    std::vector<std::string> rejected;
    int attempt = 1;
    bool survived = false;
    for (;;) {
      // The weak model sees the question only, never the material.
      auto probe = ctx.prompts.render(prompts::kQuizAnswer,
                                      {{"context", ""}, {"question", format_question(current)}});
      auto reply = ask(ctx, weak_model, ChatMessage::text(Role::User, probe),
                       ctx.settings.probe_temperature, ctx.settings.probe_max_tokens, "author.probe");
      bool correct = scoring::parse_answer(reply) == current.answer_key;
      out.audit.push_back({quiz.concept_id, current.id, attempt, reply, correct});
      if (!correct) {
        survived = true;
        break;
      }
      if (attempt >= max_attempts) break;
      rejected.push_back(current.stem);
      auto fresh = regenerate_question(ctx, m, strong_model, current.difficulty, rejected,
                                       "author.regen", 2);
      fresh.id = current.id;
      current = std::move(fresh);
      ++attempt;
    }
    current.filter_attempts = attempt;
    current.survived_filter = survived;
    out.quiz.questions.push_back(std::move(current));
  }
  return out;
}

std::string_view to_string(LintKind k) {
  switch (k) {
    case LintKind::DuplicateStem:
      return "duplicate_stem";
    case LintKind::AnswerLeakage:
      return "answer_leakage";
    case LintKind::UnequalOptions:
      return "unequal_options";
    case LintKind::Ungrounded:
      return "ungrounded";
    case LintKind::Structure:
      return "structure";
  }
  return "structure";
}

std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  const auto& stop = lexicon::stopwords();
  for (auto& w : text::words(s))
    if (w.size() >= 3 && !stop.count(w)) out.push_back(std::move(w));
  return out;
}

std::vector<LintFinding> lint_quiz(const Quiz& quiz, const corpus::ContextDocument& doc) {
  std::vector<LintFinding> out;
  const auto tiers = expected_tiers(doc.domain);
  if (quiz.questions.size() != tiers.size())
    out.push_back({"", LintKind::Structure,
                   "expected " + std::to_string(tiers.size()) + " questions, found " +
                       std::to_string(quiz.questions.size())});

  std::string grounding = doc.body;
  if (grounding.empty() && doc.caption) grounding = *doc.caption;
  std::set<std::string> doc_words;
  for (auto& w : content_words(grounding)) doc_words.insert(std::move(w));

  std::set<std::string> stems;
  for (std::size_t i = 0; i < quiz.questions.size(); ++i) {
    const auto& q = quiz.questions[i];
    if (i < tiers.size() && q.difficulty != tiers[i])
      out.push_back({q.id, LintKind::Structure,
                     "tier " + std::string(to_string(q.difficulty)) + " where " +
                         std::string(to_string(tiers[i])) + " is expected"});
    if (q.options.size() != 4) {
      out.push_back({q.id, LintKind::Structure, "question does not have four options"});
      continue;
    }
    std::set<std::string> distinct;
    for (const auto& o : q.options) distinct.insert(text::to_lower(text::trim(o)));
    if (distinct.size() != 4) out.push_back({q.id, LintKind::Structure, "options are not distinct"});
    if (q.answer_key < 'A' || q.answer_key > 'D')
      out.push_back({q.id, LintKind::Structure, "answer key is not a letter A-D"});
    if (q.filter_attempts < 1 || q.filter_attempts > 5)
      out.push_back({q.id, LintKind::Structure, "filter_attempts outside [1, 5]"});

    if (!stems.insert(normalize_stem(q.stem)).second)
      out.push_back({q.id, LintKind::DuplicateStem, "stem repeats an earlier question"});

    if (q.answer_key >= 'A' && q.answer_key <= 'D') {
      auto answer = text::trim(q.options[static_cast<std::size_t>(q.answer_key - 'A')]);
      if (answer.size() >= 2 && text::contains_ci(q.stem, answer))
        out.push_back({q.id, LintKind::AnswerLeakage, "stem contains the answer \"" + answer + "\""});
    }

    std::size_t shortest = std::string::npos;
    std::size_t longest = 0;
    for (const auto& o : q.options) {
      auto len = text::trim(o).size();
      shortest = std::min(shortest, len);
      longest = std::max(longest, len);
    }
    if (longest > 5 * shortest)
      out.push_back({q.id, LintKind::UnequalOptions,
                     "option lengths range from " + std::to_string(shortest) + " to " +
                         std::to_string(longest) + " characters"});

    if (!doc_words.empty()) {
      auto stem_words = content_words(q.stem);
      bool grounded = std::any_of(stem_words.begin(), stem_words.end(),
                                  [&](const std::string& w) { return doc_words.count(w) > 0; });
      if (!grounded)
        out.push_back({q.id, LintKind::Ungrounded, "stem shares no content words with the context"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

nlohmann::ordered_json to_json(const Quiz& q) {
  nlohmann::ordered_json j;
  j["concept_id"] = q.concept_id;
  j["questions"] = nlohmann::ordered_json::array();
  for (const auto& x : q.questions) {
    nlohmann::ordered_json e;
    e["id"] = x.id;
    e["difficulty"] = std::string(to_string(x.difficulty));
    e["stem"] = x.stem;
    e["options"] = x.options;
    e["answer_key"] = std::string(1, x.answer_key);
    e["filter_attempts"] = x.filter_attempts;
    e["survived_filter"] = x.survived_filter;
    j["questions"].push_back(std::move(e));
  }
  return j;
}

Quiz quiz_from_json(const nlohmann::json& j) {
  try {
    Quiz q;
    q.concept_id = j.at("concept_id").get<std::string>();
    for (const auto& e : j.at("questions")) {
      QuizQuestion x;
      x.id = e.at("id").get<std::string>();
      x.difficulty = difficulty_from_string(e.at("difficulty").get<std::string>());
      x.stem = e.at("stem").get<std::string>();
      x.options = e.at("options").get<std::vector<std::string>>();
      auto key = e.at("answer_key").get<std::string>();
      if (key.size() != 1 || key[0] < 'A' || key[0] > 'D') throw ParseError("bad answer_key '" + key + "'");
      x.answer_key = key[0];
      x.filter_attempts = e.at("filter_attempts").get<int>();
      x.survived_filter = e.at("survived_filter").get<bool>();
      q.questions.push_back(std::move(x));
    }
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("quiz: ") + e.what());
  }
}

namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_quiz(const Quiz& q, const std::filesystem::path& path) { write_json_file(to_json(q), path); }
Quiz read_quiz(const std::filesystem::path& path) { return quiz_from_json(read_json_file(path)); }

nlohmann::ordered_json to_json(const Lesson& l) {
  nlohmann::ordered_json j;
  j["concept_id"] = l.concept_id;
  j["provider_model"] = l.provider_model;
  j["text"] = l.text;
  j["created_at"] = l.created_at;
  return j;
}

Lesson lesson_from_json(const nlohmann::json& j) {
  try {
    return Lesson{j.at("concept_id").get<std::string>(), j.at("provider_model").get<std::string>(),
                  j.at("text").get<std::string>(), j.value("created_at", std::string())};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("lesson: ") + e.what());
  }
}

void write_lesson(const Lesson& l, const std::filesystem::path& path) { write_json_file(to_json(l), path); }
Lesson read_lesson(const std::filesystem::path& path) { return lesson_from_json(read_json_file(path)); }

void append_audit(const std::vector<FilterEvent>& events, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw ConfigError("cannot append to " + path.string());
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["concept_id"] = e.concept_id;
    j["question_id"] = e.question_id;
    j["attempt"] = e.attempt;
    j["weak_answer"] = e.weak_answer;
    j["correct"] = e.correct;
    out << j.dump() << '\n';
  }
}

std::vector<FilterEvent> read_audit(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<FilterEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      out.push_back({j.at("concept_id").get<std::string>(), j.at("question_id").get<std::string>(),
                     j.at("attempt").get<int>(), j.at("weak_answer").get<std::string>(),
                     j.at("correct").get<bool>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace interact::authoring
