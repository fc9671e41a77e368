#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "interact/dialogue.hpp"
#include "interact/provider.hpp"

// Stage orchestration behind the `interact` command line. Every stage reads
// and writes under <out>/<run_set>/ so stages compose and can be rerun.
namespace interact::pipeline {

enum ExitCode : int { kOk = 0, kValidation = 1, kProvider = 2, kConfig = 3 };

struct Options {
  std::filesystem::path manifest;
  std::filesystem::path out = "out";
  std::string run_set = "default";
  int parallel = 1;
  std::vector<std::int64_t> seeds = {0, 1, 2};
  int rounds = 5;
  std::vector<std::string> scenarios = {"static-lesson", "dynamic-no-lesson", "dynamic-lesson"};
  std::string student_model = "student";
  std::string teacher_model = "teacher";
  std::string lesson_model = "teacher";
  std::string weak_model = "weak";
  std::string strong_model = "teacher";
  dialogue::SummaryMode summary_mode = dialogue::SummaryMode::Concat;
  bool final_round_only = false;
  bool forward_seed = true;
  // Borrowed runs replay the dynamic-lesson transcripts of this student model.
  std::string borrow_from;
  std::optional<std::filesystem::path> scripted;
  bool force = false;
  std::optional<std::filesystem::path> keywords_dir;
  std::optional<std::filesystem::path> prompts_dir;
  std::optional<std::filesystem::path> media_root;  // defaults to the manifest's directory
  std::optional<std::filesystem::path> features_file;  // gainfit input override
  std::string base_url;
  std::vector<std::string> vision_models;
  int max_concurrent = 8;
  std::uint64_t gain_seed = 0;
  int cv_folds = 5;

  std::filesystem::path run_root() const { return out / run_set; }
  // Throws ConfigError.
  void validate() const;
};

// Scripted provider when opts.scripted is set, otherwise HTTP.
std::unique_ptr<provider::ChatProvider> make_provider(const Options& opts);

// Each command prints a short summary to `log` and returns an exit code;
// errors propagate as exceptions (see exit_code_for).
int cmd_validate(const Options& opts, std::ostream& log);
int cmd_author(const Options& opts, provider::ChatProvider& provider, std::ostream& log);
int cmd_run(const Options& opts, provider::ChatProvider& provider, std::ostream& log);
int cmd_report(const Options& opts, std::ostream& log);
int cmd_features(const Options& opts, std::ostream& log);
int cmd_gainfit(const Options& opts, std::ostream& log);

// Maps an in-flight exception to the documented exit code.
int exit_code_for(std::exception_ptr e);

// The run cells cmd_run would execute, in execution order.
std::vector<dialogue::ScenarioConfig> plan_cells(const Options& opts);

// Complete transcripts under <run_root>/transcripts, sorted by run_id.
std::vector<dialogue::Transcript> load_transcripts(const std::filesystem::path& run_root);

}  // namespace interact::pipeline
