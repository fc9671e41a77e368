#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "interact/errors.hpp"
#include "interact/pipeline.hpp"
#include "json.hpp"

namespace {

using interact::pipeline::Options;

// Reads a JSON object of flag names to values as a CLI11 config file.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::ordered_json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const auto& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        auto results = opt->results();
        if (opt->get_expected_max() > 1) j[name] = results;
        else if (opt->get_type_size() == 0) j[name] = true;
        else j[name] = results.empty() ? "" : results.front();
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    auto scalar = [](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      return v.dump();
    };
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      items.push_back(std::move(item));
    }
    return items;
  }
};

bool wants_json_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    if (!path.empty()) return std::filesystem::path(path).extension() == ".json";
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Student-teacher dialogue evaluation harness", "interact"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML or JSON file mirroring the command-line flags");
  if (wants_json_config(argc, argv)) app.config_formatter(std::make_shared<JsonConfig>());

  Options o;
  std::string manifest, out = o.out.string(), scripted, keywords_dir, prompts_dir, media_root, features_file;
  std::string summary_mode = "concat";
  std::string seed_list;
  std::vector<std::string> scenarios;

  app.add_option("--manifest", manifest, "Corpus manifest (JSON)");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--run-set", o.run_set, "Run-set name under the output directory")->capture_default_str();
  app.add_option("--parallel", o.parallel, "Concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed-list", seed_list, "Comma-separated seeds (default 0,1,2)");
  app.add_option("--rounds", o.rounds, "Dialogue rounds")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--scenario", scenarios,
                 "static-lesson|dynamic-no-lesson|dynamic-lesson|borrowed|teacher-static (repeatable)")
      ->delimiter(',');
  app.add_option("--student-model", o.student_model)->capture_default_str();
  app.add_option("--teacher-model", o.teacher_model)->capture_default_str();
  app.add_option("--lesson-model", o.lesson_model)->capture_default_str();
  app.add_option("--weak-model", o.weak_model, "Model used by the adversarial filter")->capture_default_str();
  app.add_option("--strong-model", o.strong_model, "Model that writes quizzes")->capture_default_str();
  app.add_option("--summary-mode", summary_mode)->check(CLI::IsMember({"concat", "summarize"}))->capture_default_str();
  app.add_flag("--final-round-only", o.final_round_only, "Evaluate the quiz only at rounds 0 and last");
  app.add_option("--borrow-from", o.borrow_from, "Student model whose dynamic-lesson dialogues are borrowed");
  app.add_option("--scripted", scripted, "Scripted provider fixture (JSON) instead of HTTP");
  app.add_flag("--force", o.force, "Regenerate existing artifacts");
  app.add_option("--keywords-dir", keywords_dir, "Directory of <domain>.txt keyword lists");
  app.add_option("--prompts-dir", prompts_dir, "Directory of <template>.txt prompt overrides");
  app.add_option("--media-root", media_root, "Base directory for image paths");
  app.add_option("--features", features_file, "Feature CSV path (features output / gainfit input)");
  app.add_option("--base-url", o.base_url, "Chat-completions base URL (default: INTERACT_BASE_URL)");
  app.add_option("--vision-models", o.vision_models, "Models allowed to receive images")->delimiter(',');
  app.add_option("--max-concurrent", o.max_concurrent, "In-flight HTTP request bound")->capture_default_str();
  app.add_option("--gain-seed", o.gain_seed, "Seed for the held-out split, folds and forest")->capture_default_str();
  app.add_option("--cv-folds", o.cv_folds)->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Validate the corpus and lint authored quizzes");
  auto* author = app.add_subcommand("author", "Generate lessons and adversarially filtered quizzes");
  auto* run = app.add_subcommand("run", "Execute the scenario matrix");
  auto* report = app.add_subcommand("report", "Emit start/end, recovery and curve tables");
  auto* feats = app.add_subcommand("features", "Extract per-round interaction features");
  auto* gainfit = app.add_subcommand("gainfit", "Fit the learning-gain regressor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : interact::pipeline::kConfig;
  }

  try {
    o.manifest = manifest;
    o.out = out;
    if (!scripted.empty()) o.scripted = scripted;
    if (!keywords_dir.empty()) o.keywords_dir = keywords_dir;
    if (!prompts_dir.empty()) o.prompts_dir = prompts_dir;
    if (!media_root.empty()) o.media_root = media_root;
    if (!features_file.empty()) o.features_file = features_file;
    o.summary_mode = interact::dialogue::summary_mode_from_string(summary_mode);
    if (!scenarios.empty()) o.scenarios = scenarios;
    if (!seed_list.empty()) {
      o.seeds.clear();
      std::stringstream ss(seed_list);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          o.seeds.push_back(std::stoll(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
          throw interact::ConfigError("--seed-list: '" + item + "' is not an integer");
        }
      }
    }
    o.validate();

    if (*validate) return interact::pipeline::cmd_validate(o, std::cout);
    if (*report) return interact::pipeline::cmd_report(o, std::cout);
    if (*feats) return interact::pipeline::cmd_features(o, std::cout);
    if (*gainfit) return interact::pipeline::cmd_gainfit(o, std::cout);
    auto provider = interact::pipeline::make_provider(o);
    if (*author) return interact::pipeline::cmd_author(o, *provider, std::cout);
    if (*run) return interact::pipeline::cmd_run(o, *provider, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "interact: " << e.what() << "\n";
    return interact::pipeline::exit_code_for(std::current_exception());
  }
  return 0;
}
