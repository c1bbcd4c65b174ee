// avgkit: validate and expand attribute-varying grammars, score the
// resulting minimal sets, evaluate score files, and aggregate reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "avg/generate.hpp"
#include "avg/grammar.hpp"
#include "avg/metrics.hpp"
#include "avg/scoring.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitUsageError = 2;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

avg::Grammar load_grammar(const fs::path& path,
                          std::vector<avg::Diagnostic>* warnings) {
  return avg::parse_grammar(read_file(path), path.stem().string(), warnings);
}

void print_diagnostics(const fs::path& path,
                       const std::vector<avg::Diagnostic>& diags,
                       const char* severity) {
  for (const avg::Diagnostic& d : diags) {
    std::cerr << path.string() << ':' << d.line << ": " << severity << ": ["
              << d.code << "] " << d.message << '\n';
  }
}

int cmd_validate(const std::vector<std::string>& grammar_paths) {
  bool any_errors = false;
  for (const std::string& p : grammar_paths) {
    fs::path path(p);
    std::vector<avg::Diagnostic> warnings;
    avg::Grammar g;
    try {
      g = load_grammar(path, &warnings);
    } catch (const avg::ParseError& e) {
      std::cerr << path.string() << ':' << e.line() << ": error: "
                << e.message() << '\n';
      any_errors = true;
      continue;
    }
    avg::ValidationReport report = avg::validate_grammar(g);
    print_diagnostics(path, warnings, "warning");
    print_diagnostics(path, report.warnings, "warning");
    print_diagnostics(path, report.errors, "error");
    if (!report.ok()) any_errors = true;
  }
  return any_errors ? kExitDomainError : kExitOk;
}

int cmd_generate(const std::vector<std::string>& grammar_paths,
                 const std::string& format, bool capitalize,
                 const std::string& out_dir, const std::string& output) {
  fs::create_directories(out_dir);
  for (const std::string& p : grammar_paths) {
    fs::path path(p);
    std::vector<avg::Diagnostic> warnings;
    avg::Grammar g = load_grammar(path, &warnings);
    avg::ValidationReport report = avg::validate_grammar(g);
    print_diagnostics(path, report.warnings, "warning");
    if (!report.ok()) {
      print_diagnostics(path, report.errors, "error");
      return kExitDomainError;
    }
    std::vector<avg::MinimalSet> sets = avg::generate(g, &warnings);
    print_diagnostics(path, warnings, "warning");
    if (capitalize) {
      for (avg::MinimalSet& set : sets) set = avg::apply_capitalization(set);
    }
    fs::path out_path;
    if (!output.empty()) {
      if (grammar_paths.size() != 1) {
        std::cerr << "--output requires a single grammar file\n";
        return kExitUsageError;
      }
      out_path = output;
    } else {
      std::string suffix = format == "labeled" ? ".labeled" : ".sets.jsonl";
      out_path = fs::path(out_dir) / (path.stem().string() + suffix);
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + out_path.string());
    if (format == "labeled") {
      avg::write_labeled_lines(sets, out);
    } else {
      avg::write_structured(sets, out);
    }
    std::cout << path.stem().string() << ": " << sets.size() << " minimal sets -> "
              << out_path.string() << '\n';
  }
  return kExitOk;
}

std::vector<std::vector<std::string>> read_corpus(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path.string());
  std::vector<std::vector<std::string>> corpus;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream tokens(line);
    std::vector<std::string> sentence;
    std::string token;
    while (tokens >> token) sentence.push_back(token);
    if (!sentence.empty()) corpus.push_back(std::move(sentence));
  }
  return corpus;
}

int cmd_score(const std::string& sets_path, const std::string& scorer,
              const std::string& mode_name, const std::string& corpus_path,
              double k, std::size_t vocab_limit, std::uint64_t seed,
              const std::string& output) {
  std::ifstream in(sets_path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + sets_path);
  std::vector<avg::MinimalSet> sets = avg::read_structured(in);
  avg::ScoreMode mode = mode_name == "masked" ? avg::ScoreMode::masked_focus
                                              : avg::ScoreMode::full_sentence;
  avg::ScoreTable table;
  if (scorer == "bigram") {
    if (corpus_path.empty()) {
      std::cerr << "--scorer bigram requires --corpus\n";
      return kExitUsageError;
    }
    avg::BigramModel model =
        avg::BigramModel::train(read_corpus(corpus_path), k, vocab_limit);
    table = avg::score_with_bigram(sets, model, mode);
  } else {
    avg::ScorerKind kind;
    if (scorer == "oracle") kind = avg::ScorerKind::oracle;
    else if (scorer == "adversary") kind = avg::ScorerKind::adversary;
    else if (scorer == "constant") kind = avg::ScorerKind::constant;
    else kind = avg::ScorerKind::seeded_random;
    table = avg::make_reference_scorer(sets, kind, mode, seed);
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + output);
  avg::write_scores(table, out);
  return kExitOk;
}

int cmd_evaluate(const std::string& sets_path, const std::string& scores_path,
                 const std::string& mode_name, const std::string& vocab_path,
                 const std::string& run_id, const std::string& language,
                 const std::string& records_path) {
  std::ifstream sets_in(sets_path, std::ios::binary);
  if (!sets_in) throw std::ios_base::failure("cannot read " + sets_path);
  std::vector<avg::MinimalSet> sets = avg::read_structured(sets_in);

  avg::ScoreMode mode = mode_name == "masked" ? avg::ScoreMode::masked_focus
                                              : avg::ScoreMode::full_sentence;
  std::ifstream scores_in(scores_path, std::ios::binary);
  if (!scores_in) throw std::ios_base::failure("cannot read " + scores_path);
  avg::ScoreTable table = avg::load_scores(scores_in, mode);
  if (table.duplicate_warnings > 0) {
    std::cerr << "warning: " << table.duplicate_warnings
              << " duplicate score keys (last value kept)\n";
  }

  avg::Vocabulary vocab;
  if (mode == avg::ScoreMode::masked_focus) {
    if (vocab_path.empty()) {
      std::cerr << "--mode masked requires --vocab\n";
      return kExitUsageError;
    }
    std::ifstream vocab_in(vocab_path, std::ios::binary);
    if (!vocab_in) throw std::ios_base::failure("cannot read " + vocab_path);
    vocab = avg::Vocabulary::read(vocab_in);
  }

  // Group by construction, keeping each group's generation order.
  std::map<std::string, std::vector<avg::MinimalSet>> by_construction;
  for (avg::MinimalSet& set : sets) {
    by_construction[set.construction_id].push_back(std::move(set));
  }

  avg::RunResults run{run_id, language, {}};
  for (const auto& [construction, group] : by_construction) {
    avg::EvalResult result =
        mode == avg::ScoreMode::full_sentence
            ? avg::evaluate_full(group, table)
            : avg::evaluate_masked(group, table, vocab);
    run.results[construction] = result;
  }

  avg::AggregateReport summary = avg::aggregate_runs({run});
  std::cout << avg::render_report(summary, avg::ReportFormat::table);

  if (!records_path.empty()) {
    std::ofstream records(records_path, std::ios::binary);
    if (!records) {
      throw std::ios_base::failure("cannot write " + records_path);
    }
    avg::write_eval_records(run, records);
  }
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& record_paths,
               const std::string& complexity_path, bool correlate,
               const std::string& format_name) {
  std::vector<avg::RunResults> runs;
  for (const std::string& p : record_paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot read " + p);
    avg::read_eval_records(in, &runs);
  }
  avg::AggregateReport report = avg::aggregate_runs(runs);
  avg::ReportFormat format = format_name == "records"
                                 ? avg::ReportFormat::records
                                 : avg::ReportFormat::table;
  std::cout << avg::render_report(report, format);

  if (!complexity_path.empty()) {
    std::ifstream in(complexity_path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot read " + complexity_path);
    auto profiles = avg::read_wals_file(in);
    for (const auto& [language, agg] : report.languages) {
      auto it = profiles.find(language);
      if (it != profiles.end()) {
        std::cout << "complexity " << language << " = " << std::fixed
                  << std::setprecision(4) << avg::c_wals(it->second) << '\n';
      }
    }
    if (correlate) {
      std::vector<double> complexity, accuracy;
      for (const auto& [language, agg] : report.languages) {
        auto it = profiles.find(language);
        if (it == profiles.end() || !agg.average) continue;
        complexity.push_back(avg::c_wals(it->second));
        accuracy.push_back(*agg.average);
      }
      std::cout << "spearman(complexity, accuracy) = " << std::fixed
                << std::setprecision(4) << avg::spearman(complexity, accuracy)
                << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attribute-varying grammar toolkit"};
  app.require_subcommand(1);

  std::vector<std::string> grammar_paths;
  std::string format = "labeled";
  bool capitalize = false;
  std::string out_dir = ".";
  std::string output;

  CLI::App* validate = app.add_subcommand("validate", "check grammar files");
  validate->add_option("grammars", grammar_paths, "grammar files")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* generate =
      app.add_subcommand("generate", "expand grammars into minimal sets");
  generate->add_option("grammars", grammar_paths, "grammar files")
      ->required()
      ->check(CLI::ExistingFile);
  generate->add_option("--format", format, "labeled|structured")
      ->check(CLI::IsMember({"labeled", "structured"}));
  generate->add_flag("--capitalize", capitalize,
                     "uppercase the first character of each sentence");
  generate->add_option("--out-dir", out_dir, "output directory");
  generate->add_option("-o,--output", output,
                       "output file (single grammar only)");

  std::string sets_path, scores_path, scorer = "oracle", mode = "full";
  std::string corpus_path, vocab_path, run_id = "run", language = "";
  std::string records_path;
  double k = 1.0;
  std::size_t vocab_limit = 50000;
  std::uint64_t seed = 0;

  CLI::App* score = app.add_subcommand("score", "score minimal sets");
  score->add_option("sets", sets_path, "structured sets file")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--scorer", scorer, "bigram|oracle|adversary|constant|random")
      ->check(CLI::IsMember({"bigram", "oracle", "adversary", "constant",
                             "random"}));
  score->add_option("--mode", mode, "full|masked")
      ->check(CLI::IsMember({"full", "masked"}));
  score->add_option("--corpus", corpus_path, "training corpus (bigram)");
  score->add_option("--k", k, "add-k smoothing constant");
  score->add_option("--vocab-limit", vocab_limit, "bigram vocabulary size");
  score->add_option("--seed", seed, "random scorer seed");
  score->add_option("-o,--output", output, "score file to write")->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a score file");
  evaluate->add_option("sets", sets_path, "structured sets file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("scores", scores_path, "score file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--mode", mode, "full|masked")
      ->check(CLI::IsMember({"full", "masked"}));
  evaluate->add_option("--vocab", vocab_path, "vocabulary file (masked mode)");
  evaluate->add_option("--run-id", run_id, "run label stored in records");
  evaluate->add_option("--language", language, "language stored in records");
  evaluate->add_option("--records", records_path, "eval records output file");

  std::vector<std::string> record_paths;
  std::string complexity_path, report_format = "table";
  bool correlate = false;

  CLI::App* report = app.add_subcommand("report", "aggregate eval records");
  report->add_option("records", record_paths, "eval record files")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--complexity", complexity_path, "WALS feature file");
  report->add_flag("--correlate", correlate,
                   "Spearman correlation of complexity vs accuracy");
  report->add_option("--format", report_format, "table|records")
      ->check(CLI::IsMember({"table", "records"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (validate->parsed()) return cmd_validate(grammar_paths);
    if (generate->parsed()) {
      return cmd_generate(grammar_paths, format, capitalize, out_dir, output);
    }
    if (score->parsed()) {
      return cmd_score(sets_path, scorer, mode, corpus_path, k, vocab_limit,
                       seed, output);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(sets_path, scores_path, mode, vocab_path, run_id,
                          language, records_path);
    }
    if (report->parsed()) {
      return cmd_report(record_paths, complexity_path, correlate,
                        report_format);
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitOk;
}
