#include "interact/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "interact/authoring.hpp"
#include "interact/corpus.hpp"
#include "interact/csv.hpp"
#include "interact/errors.hpp"
#include "interact/features.hpp"
#include "interact/gainmodel.hpp"
#include "interact/scoring.hpp"
#include "interact/text.hpp"

namespace interact::pipeline {

namespace fs = std::filesystem;
using dialogue::Scenario;
using dialogue::ScenarioConfig;

namespace {

// Runs fn(i) for i in [0, n) on up to `parallel` threads. Every item is
// attempted; the first failure is rethrown afterwards.
template <typename Fn>
void run_pool(std::size_t n, int parallel, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(parallel, 1)), 1,
                                                      std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first) std::rethrow_exception(first);
}

Clock clock_for(const Options& opts) { return opts.scripted ? fixed_clock() : system_clock(); }

prompts::PromptSet load_prompts(const Options& opts) {
  auto p = prompts::PromptSet::defaults();
  if (opts.prompts_dir) p.load_overrides(*opts.prompts_dir);
  return p;
}

fs::path media_root(const Options& opts) {
  if (opts.media_root) return *opts.media_root;
  auto parent = opts.manifest.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

corpus::CorpusManifest load_corpus(const Options& opts) {
  if (opts.manifest.empty()) throw ConfigError("--manifest is required");
  return corpus::load_manifest(opts.manifest);
}

fs::path lesson_path(const Options& o, const std::string& id) { return o.run_root() / "lessons" / (id + ".json"); }
fs::path quiz_path(const Options& o, const std::string& id) { return o.run_root() / "quizzes" / (id + ".json"); }
fs::path audit_path(const Options& o, const std::string& id) {
  return o.run_root() / "quizzes" / (id + ".audit.jsonl");
}

void write_text(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << body;
  }
  fs::rename(tmp, path);
}

std::string pct(double v) { return text::fixed(v, 2); }

void write_manifest_copy(const Options& o) {
  nlohmann::ordered_json j;
  j["run_set"] = o.run_set;
  j["manifest"] = o.manifest.string();
  j["seeds"] = o.seeds;
  j["rounds"] = o.rounds;
  j["scenarios"] = o.scenarios;
  j["student_model"] = o.student_model;
  j["teacher_model"] = o.teacher_model;
  j["lesson_model"] = o.lesson_model;
  j["weak_model"] = o.weak_model;
  j["strong_model"] = o.strong_model;
  j["summary_mode"] = std::string(dialogue::to_string(o.summary_mode));
  j["final_round_only"] = o.final_round_only;
  j["forward_seed"] = o.forward_seed;
  if (!o.borrow_from.empty()) j["borrow_from"] = o.borrow_from;
  j["scripted"] = o.scripted.has_value();
  j["gain_seed"] = o.gain_seed;
  j["cv_folds"] = o.cv_folds;
  write_text(o.run_root() / "run_manifest.json", j.dump(2) + "\n");
}

}  // namespace

void Options::validate() const {
  if (parallel < 1) throw ConfigError("--parallel must be >= 1");
  if (rounds < 0) throw ConfigError("--rounds must be >= 0");
  if (seeds.empty()) throw ConfigError("--seed-list must name at least one seed");
  if (max_concurrent < 1) throw ConfigError("--max-concurrent must be >= 1");
  if (cv_folds < 2) throw ConfigError("--cv-folds must be >= 2");
  if (run_set.empty() || text::sanitize_id(run_set) != run_set)
    throw ConfigError("--run-set may only contain letters, digits, '.', '_' and '-'");
  std::set<std::string> seen;
  for (const auto& s : scenarios) {
    auto sc = dialogue::scenario_from_string(s);
    if (!seen.insert(s).second) throw ConfigError("scenario '" + s + "' listed twice");
    if (sc == Scenario::BorrowedTranscript && borrow_from.empty())
      throw ConfigError("the borrowed scenario needs --borrow-from");
  }
  std::set<std::int64_t> unique_seeds(seeds.begin(), seeds.end());
  if (unique_seeds.size() != seeds.size()) throw ConfigError("--seed-list repeats a seed");
}

std::unique_ptr<provider::ChatProvider> make_provider(const Options& opts) {
  std::set<std::string> vision(opts.vision_models.begin(), opts.vision_models.end());
  if (opts.scripted) {
    std::unique_ptr<provider::ScriptedProvider> p;
    try {
      p = provider::ScriptedProvider::from_file(*opts.scripted);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("--scripted: ") + e.what());
    }
    if (!vision.empty()) p->set_vision_models(vision);
    return p;
  }
  auto cfg = provider::ProviderConfig::from_env();
  if (!opts.base_url.empty()) cfg.base_url = opts.base_url;
  cfg.max_concurrent = opts.max_concurrent;
  cfg.vision_models = std::move(vision);
  return std::make_unique<provider::HttpProvider>(std::move(cfg));
}

int exit_code_for(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError&) {
    return kConfig;
  } catch (const TransportError&) {
    return kProvider;
  } catch (const ApiError&) {
    return kProvider;
  } catch (const ContentError&) {
    return kProvider;
  } catch (const ScriptExhausted&) {
    return kProvider;
  } catch (const EmptyLesson&) {
    return kProvider;
  } catch (const QuizParseError&) {
    return kProvider;
  } catch (...) {
    return kValidation;
  }
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const Options& opts, std::ostream& log) {
  if (opts.manifest.empty()) throw ConfigError("--manifest is required");
  std::ifstream in(opts.manifest);
  if (!in) throw ConfigError("cannot open " + opts.manifest.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    log << "error: " << opts.manifest.string() << ": " << e.what() << "\n";
    return kValidation;
  }
  corpus::CorpusManifest m;
  try {
    m = corpus::parse_manifest(j);
  } catch (const ParseError& e) {
    log << "error: " << e.what() << "\n";
    return kValidation;
  }
  auto findings = corpus::validate_manifest(m);
  for (const auto& f : findings) log << "error: " << f.id << ": " << f.message << "\n";

  std::size_t warnings = 0;
  for (const auto& doc : m.contexts) {
    auto path = quiz_path(opts, doc.id);
    if (!fs::exists(path)) continue;
    for (const auto& f : authoring::lint_quiz(authoring::read_quiz(path), doc)) {
      log << "warning: " << doc.id << "/" << f.question_id << ": " << authoring::to_string(f.kind)
          << ": " << f.message << "\n";
      ++warnings;
    }
  }
  log << m.contexts.size() << " contexts, " << findings.size() << " errors, " << warnings
      << " quiz warnings\n";
  return findings.empty() ? kOk : kValidation;
}

// ---------------------------------------------------------------------------
// author

int cmd_author(const Options& opts, provider::ChatProvider& provider, std::ostream& log) {
  opts.validate();
  auto corpus = load_corpus(opts);
  auto prompts = load_prompts(opts);
  authoring::AuthoringContext ctx{provider, prompts, {}, clock_for(opts)};
  const auto root = media_root(opts);
  std::atomic<int> lessons{0}, quizzes{0};

  run_pool(corpus.contexts.size(), opts.parallel, [&](std::size_t i) {
    const auto& doc = corpus.contexts[i];
    std::optional<authoring::ConceptMaterial> material;
    auto get_material = [&]() -> const authoring::ConceptMaterial& {
      if (!material) material = authoring::load_material(doc, root);
      return *material;
    };
    auto lp = lesson_path(opts, doc.id);
    bool lesson_current = fs::exists(lp) && authoring::read_lesson(lp).provider_model == opts.lesson_model;
    if (opts.force || !lesson_current) {
      authoring::write_lesson(authoring::generate_lesson(ctx, get_material(), opts.lesson_model), lp);
      ++lessons;
    }
    auto qp = quiz_path(opts, doc.id);
    if (opts.force || !fs::exists(qp)) {
      auto draft = authoring::generate_quiz(ctx, get_material(), opts.strong_model);
      auto filtered = authoring::adversarial_filter(ctx, get_material(), draft, opts.weak_model, opts.strong_model);
      fs::remove(audit_path(opts, doc.id));
      authoring::append_audit(filtered.audit, audit_path(opts, doc.id));
      authoring::write_quiz(filtered.quiz, qp);
      ++quizzes;
    }
  });
  log << "authored " << lessons << " lessons and " << quizzes << " quizzes for "
      << corpus.contexts.size() << " concepts\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// run

std::vector<ScenarioConfig> plan_cells(const Options& opts) {
  std::vector<ScenarioConfig> cells;
  // Borrowed runs go last so their sources exist.
  std::vector<std::string> order = opts.scenarios;
  std::stable_partition(order.begin(), order.end(), [](const auto& s) {
    return dialogue::scenario_from_string(s) != Scenario::BorrowedTranscript;
  });
  for (const auto& name : order)
    for (auto seed : opts.seeds) {
      ScenarioConfig c;
      c.scenario = dialogue::scenario_from_string(name);
      c.rounds = dialogue::is_dynamic(c.scenario) ? opts.rounds : 0;
      c.student_model = opts.student_model;
      c.teacher_model = opts.teacher_model;
      c.lesson_provider = dialogue::requires_lesson(c.scenario) ? opts.lesson_model : "";
      c.summary_mode = opts.summary_mode;
      c.seed = seed;
      c.forward_seed = opts.forward_seed;
      c.evaluate_every_round = !opts.final_round_only;
      if (c.scenario == Scenario::BorrowedTranscript) {
        ScenarioConfig source = c;
        source.scenario = Scenario::DynamicWithLesson;
        source.rounds = opts.rounds;
        source.student_model = opts.borrow_from;
        source.lesson_provider = opts.lesson_model;
        c.source_run_id = dialogue::make_run_id(source, "{concept}");
      }
      cells.push_back(std::move(c));
    }
  return cells;
}

std::vector<dialogue::Transcript> load_transcripts(const fs::path& run_root) {
  std::vector<dialogue::Transcript> out;
  auto dir = run_root / "transcripts";
  if (!fs::exists(dir)) return out;
  std::vector<fs::path> runs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && dialogue::is_complete_run(entry.path())) runs.push_back(entry.path());
  std::sort(runs.begin(), runs.end());
  for (const auto& r : runs) out.push_back(dialogue::read_transcript(r));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.run_id < b.run_id; });
  return out;
}

int cmd_run(const Options& opts, provider::ChatProvider& provider, std::ostream& log) {
  opts.validate();
  auto corpus = load_corpus(opts);
  auto prompts = load_prompts(opts);
  const auto root = media_root(opts);
  const auto cells = plan_cells(opts);
  write_manifest_copy(opts);

  struct Job {
    const ScenarioConfig* cfg;
    const corpus::ContextDocument* doc;
  };
  std::vector<Job> direct, borrowed;
  for (const auto& c : cells)
    for (const auto& doc : corpus.contexts)
      (c.scenario == Scenario::BorrowedTranscript ? borrowed : direct).push_back({&c, &doc});

  std::map<std::string, authoring::Quiz> quizzes;
  std::map<std::string, authoring::Lesson> lessons;
  for (const auto& doc : corpus.contexts) {
    auto qp = quiz_path(opts, doc.id);
    if (!fs::exists(qp)) throw ConfigError("no quiz for '" + doc.id + "'; run `interact author` first");
    quizzes.emplace(doc.id, authoring::read_quiz(qp));
    auto lp = lesson_path(opts, doc.id);
    if (fs::exists(lp)) lessons.emplace(doc.id, authoring::read_lesson(lp));
  }

  std::atomic<int> executed{0}, skipped{0};
  auto run_dir_for = [&](const std::string& run_id) { return opts.run_root() / "transcripts" / run_id; };
  auto material_for = [&](const corpus::ContextDocument& doc) { return authoring::load_material(doc, root); };

  run_pool(direct.size(), opts.parallel, [&](std::size_t i) {
    const auto& [cfg, doc] = direct[i];
    dialogue::RunOptions ro{&prompts, clock_for(opts), std::nullopt, dialogue::make_run_id(*cfg, doc->id)};
    ro.run_dir = run_dir_for(ro.run_id);
    if (!opts.force && dialogue::is_complete_run(*ro.run_dir)) {
      ++skipped;
      return;
    }
    if (opts.force) fs::remove_all(*ro.run_dir);
    std::optional<authoring::Lesson> lesson;
    if (dialogue::requires_lesson(cfg->scenario)) {
      auto it = lessons.find(doc->id);
      if (it == lessons.end()) throw ConfigError("no lesson for '" + doc->id + "'; run `interact author` first");
      lesson = it->second;
    }
    dialogue::run_scenario(*cfg, material_for(*doc), quizzes.at(doc->id), lesson, provider, ro);
    ++executed;
  });

  run_pool(borrowed.size(), opts.parallel, [&](std::size_t i) {
    const auto& [cfg, doc] = borrowed[i];
    ScenarioConfig c = *cfg;
    std::string source_id = *c.source_run_id;
    source_id.replace(source_id.find("{concept}"), 9, doc->id);
    source_id = text::sanitize_id(source_id);
    auto source_dir = run_dir_for(source_id);
    if (!dialogue::is_complete_run(source_dir))
      throw ConfigError("borrowed run needs the complete source transcript " + source_id);
    auto source = dialogue::read_transcript(source_dir);
    c.source_run_id = source_id;
    dialogue::RunOptions ro{&prompts, clock_for(opts), std::nullopt, dialogue::make_run_id(c, doc->id)};
    ro.run_dir = run_dir_for(ro.run_id);
    if (!opts.force && dialogue::is_complete_run(*ro.run_dir)) {
      ++skipped;
      return;
    }
    if (opts.force) fs::remove_all(*ro.run_dir);
    dialogue::run_borrowed(c, material_for(*doc), quizzes.at(doc->id), source, provider, ro);
    ++executed;
  });

  // Records are rebuilt from every complete transcript in the run set.
  std::vector<scoring::EvaluationRecord> records;
  for (const auto& t : load_transcripts(opts.run_root())) {
    auto r = dialogue::records_of(t);
    records.insert(records.end(), r.begin(), r.end());
  }
  scoring::write_records(opts.run_root() / "records.csv", records);
  log << "executed " << executed << " runs, skipped " << skipped << " complete runs, "
      << records.size() << " evaluation records\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const Options& opts, std::ostream& log) {
  const auto reports = opts.run_root() / "reports";
  fs::create_directories(reports);
  std::vector<scoring::EvaluationRecord> records;
  auto records_path = opts.run_root() / "records.csv";
  if (fs::exists(records_path)) records = scoring::read_records(records_path);

  // Start/end table.
  auto deltas = scoring::delta_table(records);
  {
    std::ostringstream csv_out, md;
    csv::write_row(csv_out, {"model", "domain", "scenario", "start", "end", "delta"});
    md << "| Model | Domain | Scenario | Start | End (Δ) |\n|---|---|---|---:|---:|\n";
    for (const auto& d : deltas) {
      csv::write_row(csv_out, {d.model, d.domain, d.scenario, pct(d.start), pct(d.end), d.rendered_delta()});
      md << "| " << d.model << " | " << d.domain << " | " << d.scenario << " | " << pct(d.start) << " | "
         << pct(d.end) << " (" << d.rendered_delta() << ") |\n";
    }
    write_text(reports / "start_end.csv", csv_out.str());
    write_text(reports / "start_end.md", md.str());
  }

  // Recovery table; a model missing a scenario is noted, not fatal.
  std::set<std::string> models;
  for (const auto& r : records)
    if (r.scenario == scoring::kDynamicNoLesson || r.scenario == scoring::kDynamicLesson) models.insert(r.model);
  std::vector<scoring::RecoveryRow> rows;
  std::vector<std::string> notes;
  for (const auto& model : models) {
    try {
      auto domains = scoring::domain_performance(records, model);
      if (domains.empty()) {
        notes.push_back("model '" + model + "': no text-domain records");
        continue;
      }
      rows.push_back(scoring::compute_recovery(model, domains));
    } catch (const MissingScenario& e) {
      notes.push_back(e.what());
    }
  }
  {
    std::ostringstream csv_out, md;
    csv::write_row(csv_out, {"model", "start_wo", "end_wo", "start_w", "end_w", "teacher",
                             "rec_vs_lesson_start", "rec_vs_teacher", "agg_rec_vs_lesson_start",
                             "agg_rec_vs_teacher", "n_domains"});
    md << "| Model | Student w/o Lesson Start | End | Student w/ Lesson Start | End | Teacher | "
          "Recovery vs Lesson Start | Recovery vs Teacher | Aggregate-ratio vs Lesson Start | "
          "Aggregate-ratio vs Teacher |\n|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& r : rows) {
      csv::write_row(csv_out, {r.model, pct(r.start_wo), pct(r.end_wo), pct(r.start_w), pct(r.end_w),
                               pct(r.teacher), pct(r.rec_vs_lesson_start), pct(r.rec_vs_teacher),
                               pct(r.agg_rec_vs_lesson_start), pct(r.agg_rec_vs_teacher),
                               std::to_string(r.n_domains)});
      md << "| " << r.model << " | " << pct(r.start_wo) << " | " << pct(r.end_wo) << " ("
         << scoring::format_delta(r.end_wo - r.start_wo) << ") | " << pct(r.start_w) << " | " << pct(r.end_w)
         << " (" << scoring::format_delta(r.end_w - r.start_w) << ") | " << pct(r.teacher) << " | "
         << pct(r.rec_vs_lesson_start) << " | " << pct(r.rec_vs_teacher) << " | "
         << pct(r.agg_rec_vs_lesson_start) << " | " << pct(r.agg_rec_vs_teacher) << " |\n";
    }
    for (const auto& n : notes) md << "\nMissing: " << n << "\n";
    write_text(reports / "recovery.csv", csv_out.str());
    write_text(reports / "recovery.md", md.str());
  }

  // Per-round curves with bootstrap intervals.
  {
    std::ostringstream csv_out;
    csv::write_row(csv_out, {"model", "domain", "scenario", "round", "mean", "ci_low", "ci_high", "n"});
    for (const auto& c : scoring::aggregate_curves(records, 1000, 0))
      csv::write_row(csv_out, {c.model, c.domain, c.scenario, std::to_string(c.round), csv::format_double(c.mean),
                               csv::format_double(c.ci_low), csv::format_double(c.ci_high), std::to_string(c.n)});
    write_text(reports / "curves.csv", csv_out.str());
  }
  for (const auto& n : notes) log << "note: " << n << "\n";
  log << "reported " << records.size() << " records: " << deltas.size() << " start/end rows, " << rows.size()
      << " recovery rows\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// features / gainfit

int cmd_features(const Options& opts, std::ostream& log) {
  auto corpus = load_corpus(opts);
  std::map<std::string, corpus::ContextDocument> docs;
  for (const auto& d : corpus.contexts) docs.emplace(d.id, d);
  auto keywords = features::load_all_keywords(opts.keywords_dir.value_or(features::default_keywords_dir()));
  auto transcripts = load_transcripts(opts.run_root());
  features::HeuristicAnnotator annotator;
  auto rows = features::build_feature_matrix(transcripts, docs, annotator, keywords);
  std::ostringstream out;
  features::write_csv(out, rows);
  write_text(opts.features_file.value_or(opts.run_root() / "features.csv"), out.str());
  log << "extracted " << rows.size() << " feature rows from " << transcripts.size() << " transcripts\n";
  return kOk;
}

int cmd_gainfit(const Options& opts, std::ostream& log) {
  opts.validate();
  auto path = opts.features_file.value_or(opts.run_root() / "features.csv");
  std::ifstream in(path);
  if (!in) throw ConfigError("no feature file at " + path.string() + "; run `interact features` first");
  auto rows = features::read_csv(in);
  if (rows.size() < 10) throw TooFewRows("gainfit needs at least 10 feature rows (have " + std::to_string(rows.size()) + ")");
  auto design = features::design_matrix(rows);

  auto split = gainmodel::train_test_split(rows.size(), 0.2, opts.gain_seed);
  auto x_train = gainmodel::take_rows(design.x, split.train);
  auto y_train = gainmodel::take(design.y, split.train);
  const int k = std::min<int>(opts.cv_folds, static_cast<int>(split.train.size()));
  auto cv = gainmodel::cross_validate(x_train, y_train, gainmodel::default_grid(opts.gain_seed), k,
                                      opts.gain_seed, opts.parallel);
  auto model = gainmodel::fit(x_train, y_train, cv.best, opts.parallel);
  auto pred = gainmodel::predict(model, gainmodel::take_rows(design.x, split.test));
  auto y_test = gainmodel::take(design.y, split.test);
  const double r2 = gainmodel::r2_score(y_test, pred);

  const auto reports = opts.run_root() / "reports";
  fs::create_directories(reports);
  gainmodel::save_model(model, reports / "gain_model.json");
  {
    std::vector<std::size_t> order(design.columns.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return model.feature_importances[a] > model.feature_importances[b];
    });
    std::ostringstream out;
    csv::write_row(out, {"feature", "importance"});
    for (auto i : order) csv::write_row(out, {design.columns[i], csv::format_double(model.feature_importances[i])});
    write_text(reports / "importances.csv", out.str());
  }
  {
    std::ostringstream out;
    csv::write_row(out, {"scope", "n_test", "r2"});
    csv::write_row(out, {"all", std::to_string(y_test.size()), csv::format_double(r2)});
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_domain;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      auto& [t, p] = by_domain[rows[split.test[i]].domain];
      t.push_back(y_test[i]);
      p.push_back(pred[i]);
    }
    for (const auto& [domain, tp] : by_domain)
      if (tp.first.size() >= 2)
        csv::write_row(out, {domain, std::to_string(tp.first.size()),
                             csv::format_double(gainmodel::r2_score(tp.first, tp.second))});
    write_text(reports / "gain_r2.csv", out.str());
  }
  {
    std::ostringstream out;
    csv::write_row(out, {"n_trees", "max_depth", "min_samples_leaf", "mean_r2", "fold_r2"});
    for (const auto& g : cv.grid) {
      std::vector<std::string> folds;
      for (double s : g.fold_scores) folds.push_back(csv::format_double(s));
      csv::write_row(out, {std::to_string(g.params.n_trees),
                           g.params.max_depth ? std::to_string(*g.params.max_depth) : "none",
                           std::to_string(g.params.min_samples_leaf), csv::format_double(g.mean),
                           text::join(folds, ";")});
    }
    write_text(reports / "gain_cv.csv", out.str());
  }
  log << "gain model: " << rows.size() << " rows, cv mean R2 " << text::fixed(cv.mean_score, 4)
      << ", held-out R2 " << text::fixed(r2, 4) << " (" << y_test.size() << " rows)\n";
  return kOk;
}

}  // namespace interact::pipeline
