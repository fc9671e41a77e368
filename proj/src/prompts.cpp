#include "interact/prompts.hpp"

#include <fstream>
#include <iterator>

#include "interact/errors.hpp"
#include "interact/text.hpp"

namespace interact::prompts {

namespace {

constexpr const char kLessonDefault[] =
    R"(You are an experienced teacher preparing a lesson about {{ kind }} titled "{{ title }}".
Read the material below carefully and write a self-contained lesson for a student who has never seen it.
Explain the key facts, names, events and ideas in the order a learner would need them, and keep every statement faithful to the material.

Material:
{{ context }})";

constexpr const char kQuizGenerateDefault[] =
    R"(You are writing a quiz that tests whether a student has learned the content of the {{ kind }} titled "{{ title }}".
Write exactly nine multiple-choice questions: three Middle-School questions, then three College questions, then three Graduate questions.
Every question must be answerable from the material alone and must not be answerable from general knowledge.
Each question has exactly four distinct options labelled A) to D) and one correct answer.

Use exactly this format for every question and put a line containing only --- between questions:
DIFFICULTY: <Middle-School|College|Graduate>
QUESTION: <question text>
A) <option>
B) <option>
C) <option>
D) <option>
ANSWER: <letter>

Material:
{{ context }})";

constexpr const char kQuizGenerateImageDefault[] =
    R"(You are writing a quiz that tests whether a student has understood the attached image titled "{{ title }}".
Write exactly five multiple-choice questions about details that can only be known by looking at this image.
Each question has exactly four distinct options labelled A) to D) and one correct answer.

Use exactly this format for every question and put a line containing only --- between questions:
QUESTION: <question text>
A) <option>
B) <option>
C) <option>
D) <option>
ANSWER: <letter>

{{ context }})";

constexpr const char kQuizRegenerateDefault[] =
    R"(A quiz question about the {{ kind }} titled "{{ title }}" turned out to be answerable without reading the material.
Write one replacement multiple-choice question at the {{ difficulty }} level that can only be answered from the material.
Do not reuse or paraphrase any of these rejected questions:
{{ rejected }}

Use exactly this format:
QUESTION: <question text>
A) <option>
B) <option>
C) <option>
D) <option>
ANSWER: <letter>

Material:
{{ context }})";

constexpr const char kQuizAnswerDefault[] =
    R"({{ context }}Answer the following multiple-choice question. Reply with the letter of the correct option only.

{{ question }})";

constexpr const char kStudentQuestionDefault[] =
    R"(You are a student learning about the {{ kind }} titled "{{ title }}". You have not seen the original material, but you can ask a teacher who has.
{{ context }}Questions you have already asked:
{{ asked }}

Ask the teacher one new, specific question that will help you understand this {{ kind }} better. Reply with the question only.)";

constexpr const char kTeacherAnswerDefault[] =
    R"(You are a teacher helping a student understand the {{ kind }} titled "{{ title }}". You have direct access to the original material below; the student does not.
Answer the student's question accurately and concisely using the material.

Material:
{{ context }}

Conversation so far:
{{ history }}

Student question: {{ question }})";

constexpr const char kStudentSummarizeDefault[] =
    R"(You are a student keeping notes while learning about the {{ kind }} titled "{{ title }}".
Update your notes so they keep every fact you have learned so far, including the newest exchange.

Current notes:
{{ summary }}

Newest exchange:
{{ exchange }}

Reply with the updated notes only.)";

}  // namespace

std::string render(std::string_view tmpl, const Slots& slots) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw ConfigError("unterminated placeholder in prompt template");
    auto name = text::trim(tmpl.substr(open + 2, close - open - 2));
    auto it = slots.find(name);
    if (it == slots.end()) throw ConfigError("prompt template slot '" + name + "' has no value");
    out += it->second;
    pos = close + 2;
  }
  return out;
}

PromptSet PromptSet::defaults() {
  PromptSet p;
  p.templates_.emplace(kLesson, kLessonDefault);
  p.templates_.emplace(kQuizGenerate, kQuizGenerateDefault);
  p.templates_.emplace(kQuizGenerateImage, kQuizGenerateImageDefault);
  p.templates_.emplace(kQuizRegenerate, kQuizRegenerateDefault);
  p.templates_.emplace(kQuizAnswer, kQuizAnswerDefault);
  p.templates_.emplace(kStudentQuestion, kStudentQuestionDefault);
  p.templates_.emplace(kTeacherAnswer, kTeacherAnswerDefault);
  p.templates_.emplace(kStudentSummarize, kStudentSummarizeDefault);
  return p;
}

void PromptSet::load_overrides(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("prompt directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    templates_[entry.path().stem().string()] = std::move(body);
  }
}

const std::string& PromptSet::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw ConfigError("no prompt template named '" + std::string(name) + "'");
  return it->second;
}

std::string PromptSet::lesson_template(std::string_view domain) const {
  std::string specific = std::string(kLesson) + "." + std::string(domain);
  if (auto it = templates_.find(specific); it != templates_.end()) return it->second;
  return get(kLesson);
}

void PromptSet::set(std::string name, std::string tmpl) { templates_[std::move(name)] = std::move(tmpl); }

std::string PromptSet::render(std::string_view name, const Slots& slots) const {
  return prompts::render(get(name), slots);
}

}  // namespace interact::prompts
