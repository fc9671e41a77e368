#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace interact::prompts {

// Template names. Lesson templates may be specialised per domain as
// "lesson.<domain wire name>", falling back to "lesson".
inline constexpr std::string_view kLesson = "lesson";
inline constexpr std::string_view kQuizGenerate = "quiz_generation";
inline constexpr std::string_view kQuizGenerateImage = "quiz_generation_image";
inline constexpr std::string_view kQuizRegenerate = "quiz_regenerate";
inline constexpr std::string_view kQuizAnswer = "quiz_answer";
inline constexpr std::string_view kStudentQuestion = "student_question";
inline constexpr std::string_view kTeacherAnswer = "teacher_answer";
inline constexpr std::string_view kStudentSummarize = "student_summarize";

using Slots = std::map<std::string, std::string, std::less<>>;

// Substitutes {{ name }} placeholders. Throws ConfigError for a placeholder
// that has no slot value or is left unterminated.
std::string render(std::string_view tmpl, const Slots& slots);

class PromptSet {
 public:
  // The bundled templates.
  static PromptSet defaults();

  // Every <name>.txt file in dir replaces (or adds) the template <name>.
  void load_overrides(const std::filesystem::path& dir);

  const std::string& get(std::string_view name) const;  // throws ConfigError
  std::string lesson_template(std::string_view domain) const;
  void set(std::string name, std::string tmpl);

  std::string render(std::string_view name, const Slots& slots) const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace interact::prompts
