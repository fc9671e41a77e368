#include <sstream>

#include "doctest.h"
#include "interact/errors.hpp"
#include "interact/features.hpp"
#include "interact/gainmodel.hpp"
#include "interact/pipeline.hpp"
#include "interact/provider.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace interact;
using namespace interact::pipeline;
namespace fs = std::filesystem;

namespace {

std::unique_ptr<provider::ScriptedProvider> e2e_provider() {
  return provider::ScriptedProvider::from_file(fixtures() / "e2e" / "script.json");
}

Options e2e_options(const fs::path& out) {
  Options o;
  o.manifest = fixtures() / "e2e" / "manifest.json";
  o.out = out;
  o.scripted = fixtures() / "e2e" / "script.json";
  return o;
}

// The e2e manifest restricted to its first n concepts, written under dir.
fs::path subset_manifest(const fs::path& dir, std::size_t n) {
  std::ifstream in(fixtures() / "e2e" / "manifest.json");
  auto j = nlohmann::json::parse(in);
  j["contexts"].erase(j["contexts"].begin() + static_cast<long>(n), j["contexts"].end());
  auto path = dir / "manifest.json";
  std::ofstream(path) << j.dump(2);
  return path;
}

// Fails with a transport error once `budget` calls have been served.
class FlakyProvider final : public provider::ChatProvider {
 public:
  FlakyProvider(provider::ChatProvider& inner, int budget) : inner_(inner), budget_(budget) {}
  provider::ChatResponse chat(const provider::ChatRequest& req) override {
    if (budget_-- <= 0) throw TransportError("connection reset");
    return inner_.chat(req);
  }

 private:
  provider::ChatProvider& inner_;
  int budget_;
};

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

int exit_for(std::function<void()> fn) {
  try {
    fn();
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
  return kOk;
}

}  // namespace

TEST_CASE("validate exit codes") {
  TempDir tmp;
  std::ostringstream log;
  auto o = e2e_options(tmp.path);
  CHECK(cmd_validate(o, log) == kOk);

  std::ifstream in(o.manifest);
  auto j = nlohmann::json::parse(in);
  j["contexts"][1]["published_at"] = "2023-06-01";
  std::ofstream(tmp.path / "old.json") << j.dump();
  o.manifest = tmp.path / "old.json";
  std::ostringstream log2;
  CHECK(cmd_validate(o, log2) == kValidation);
  CHECK(log2.str().find("c-news") != std::string::npos);

  j["contexts"][1]["published_at"] = "2024-06-01";
  j["contexts"][2]["id"] = "c-song";
  std::ofstream(tmp.path / "dup.json") << j.dump();
  o.manifest = tmp.path / "dup.json";
  std::ostringstream log3;
  CHECK(cmd_validate(o, log3) == kValidation);
  CHECK(log3.str().find("duplicate id") != std::string::npos);
}

TEST_CASE("author is idempotent and --force regenerates") {
  TempDir tmp;
  auto o = e2e_options(tmp.path);
  auto p = e2e_provider();
  std::ostringstream log;
  CHECK(cmd_author(o, *p, log) == kOk);
  for (auto id : {"c-song", "c-news", "c-movie"}) {
    CHECK(fs::exists(o.run_root() / "lessons" / (std::string(id) + ".json")));
    CHECK(fs::exists(o.run_root() / "quizzes" / (std::string(id) + ".json")));
  }
  CHECK(p->count_tag("author.lesson") == 3);
  CHECK(p->count_tag("author.quiz") == 3);

  p->clear_log();
  CHECK(cmd_author(o, *p, log) == kOk);
  CHECK(p->call_count() == 0);

  o.force = true;
  CHECK(cmd_author(o, *p, log) == kOk);
  CHECK(p->count_tag("author.lesson") == 3);
  CHECK(p->count_tag("author.quiz") == 3);

  o.force = false;
  o.lesson_model = "weak";
  p->clear_log();
  cmd_author(o, *p, log);
  CHECK(p->count_tag("author.lesson") == 3);
  CHECK(p->count_tag("author.quiz") == 0);
}

TEST_CASE("run plans concepts x scenarios x seeds") {
  TempDir tmp;
  auto o = e2e_options(tmp.path / "out");
  o.manifest = subset_manifest(tmp.path, 2);
  o.scenarios = {"dynamic-no-lesson", "dynamic-lesson"};
  auto p = e2e_provider();
  std::ostringstream log;
  cmd_author(o, *p, log);
  CHECK(cmd_run(o, *p, log) == kOk);
  CHECK(load_transcripts(o.run_root()).size() == 12);
  std::size_t dirs = 0;
  for (const auto& e : fs::directory_iterator(o.run_root() / "transcripts")) dirs += e.is_directory();
  CHECK(dirs == 12);

  p->clear_log();
  cmd_run(o, *p, log);
  CHECK(p->call_count() == 0);
}

TEST_CASE("run resumes to the same outputs after a failure") {
  TempDir tmp;
  auto clean = e2e_options(tmp.path / "clean");
  clean.scenarios = {"dynamic-lesson"};
  clean.seeds = {0, 1};
  std::ostringstream log;
  {
    auto p = e2e_provider();
    cmd_author(clean, *p, log);
    cmd_run(clean, *p, log);
  }
  auto resumed = clean;
  resumed.out = tmp.path / "resumed";
  {
    auto p = e2e_provider();
    cmd_author(resumed, *p, log);
    FlakyProvider flaky(*p, 170);
    CHECK(exit_for([&] { cmd_run(resumed, flaky, log); }) == kProvider);
    cmd_run(resumed, *p, log);
  }
  CHECK(tree_bytes(clean.run_root()) == tree_bytes(resumed.run_root()));
}

TEST_CASE("run without authored quizzes is a configuration error") {
  TempDir tmp;
  auto o = e2e_options(tmp.path);
  auto p = e2e_provider();
  std::ostringstream log;
  CHECK(exit_for([&] { cmd_run(o, *p, log); }) == kConfig);
}

TEST_CASE("report on an empty run set") {
  TempDir tmp;
  auto o = e2e_options(tmp.path);
  std::ostringstream log;
  CHECK(cmd_report(o, log) == kOk);
  auto start_end = slurp(o.run_root() / "reports" / "start_end.csv");
  CHECK(std::count(start_end.begin(), start_end.end(), '\n') == 1);
}

TEST_CASE("report, features and gainfit on the e2e run set") {
  TempDir tmp;
  auto o = e2e_options(tmp.path);
  o.scenarios = {"static-lesson", "dynamic-no-lesson", "dynamic-lesson", "teacher-static"};
  auto p = e2e_provider();
  std::ostringstream log;
  cmd_author(o, *p, log);
  cmd_run(o, *p, log);
  CHECK(cmd_report(o, log) == kOk);
  auto recovery = slurp(o.run_root() / "reports" / "recovery.csv");
  CHECK(recovery.find("student") != std::string::npos);

  CHECK(cmd_features(o, log) == kOk);
  std::ifstream in(o.run_root() / "features.csv");
  auto rows = features::read_csv(in);
  // 3 concepts x 3 seeds x 5 rounds for each dynamic scenario.
  CHECK(rows.size() == 2 * 45);

  std::string first = slurp(o.run_root() / "features.csv");
  cmd_features(o, log);
  CHECK(slurp(o.run_root() / "features.csv") == first);

  CHECK(cmd_gainfit(o, log) == kOk);
  auto model_bytes = slurp(o.run_root() / "reports" / "gain_model.json");
  cmd_gainfit(o, log);
  CHECK(slurp(o.run_root() / "reports" / "gain_model.json") == model_bytes);
}

TEST_CASE("fifteen rows give a 45-column feature file") {
  std::vector<features::FeatureRow> rows(15);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].run_id = "run" + std::to_string(i / 5);
    rows[i].round = static_cast<int>(i % 5) + 1;
  }
  std::ostringstream out;
  features::write_csv(out, rows);
  std::istringstream lines(out.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 4 + 45 - 1);
    ++n;
  }
  CHECK(n == 16);
}

TEST_CASE("gainfit recovers a synthetic gain signal") {
  TempDir tmp;
  auto data = gainmodel::synthetic_benchmark(300, 0.1, 5, 42);
  const char* columns[] = {"question_length", "response_length", "turn_index", "info_density", "readability_score"};
  std::vector<features::FeatureRow> rows;
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    features::FeatureRow r;
    r.run_id = "run" + std::to_string(i);
    r.concept_id = "c";
    r.domain = "movie_plots";
    r.round = 1;
    for (std::size_t j = 0; j < 5; ++j) r.features[columns[j]] = data.x[i][j];
    r.features["learning_gain"] = data.y[i];
    rows.push_back(r);
  }
  std::ofstream(tmp.path / "synthetic.csv") << [&] {
    std::ostringstream s;
    features::write_csv(s, rows);
    return s.str();
  }();
  auto o = e2e_options(tmp.path / "out");
  o.features_file = tmp.path / "synthetic.csv";
  std::ostringstream log;
  CHECK(cmd_gainfit(o, log) == kOk);
  std::ifstream in(o.run_root() / "reports" / "gain_r2.csv");
  std::string header, all;
  std::getline(in, header);
  std::getline(in, all);
  double r2 = std::stod(all.substr(all.rfind(',') + 1));
  MESSAGE(log.str());
  CHECK(r2 >= 0.8);
}

TEST_CASE("gainfit needs enough rows") {
  TempDir tmp;
  std::vector<features::FeatureRow> rows(4);
  std::ostringstream s;
  features::write_csv(s, rows);
  std::ofstream(tmp.path / "few.csv") << s.str();
  auto o = e2e_options(tmp.path);
  o.features_file = tmp.path / "few.csv";
  std::ostringstream log;
  CHECK(exit_for([&] { cmd_gainfit(o, log); }) == kValidation);
}

TEST_CASE("option validation and exit-code mapping") {
  Options o;
  o.parallel = 0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = Options{};
  o.scenarios = {"borrowed"};
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = Options{};
  o.seeds = {1, 1};
  CHECK_THROWS_AS(o.validate(), ConfigError);

  CHECK(exit_for([] { throw ApiError(500, "x"); }) == kProvider);
  CHECK(exit_for([] { throw ScriptExhausted("x"); }) == kProvider);
  CHECK(exit_for([] { throw ConfigError("x"); }) == kConfig);
  CHECK(exit_for([] { throw ValidationError("x"); }) == kValidation);
}
