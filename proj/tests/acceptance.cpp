// Acceptance suite: runs every acceptance criterion and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "avg/generate.hpp"
#include "avg/grammar.hpp"
#include "avg/metrics.hpp"
#include "avg/scoring.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace avg;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::vector<std::string> kPack = {
    "simple_agreement",
    "vp_coordination_short",
    "vp_coordination_long",
    "across_subject_relative_clause",
    "within_object_relative_clause",
    "across_object_relative_clause",
    "across_prepositional_phrase",
};

Grammar load_pack_grammar(const std::string& stem) {
  fs::path path = fs::path(AVG_DATA_DIR) / "grammars" / "en" / (stem + ".avg");
  return parse_grammar(read_file(path), stem);
}

Grammar french_with_vary(const std::string& vary_line) {
  std::string text = avg_test::kFrenchGrammar;
  text.replace(0, text.find('\n'), vary_line);
  return parse_grammar(text, "french");
}

// 1. Exact reproduction of the worked grammar's labeled output.
Check criterion_golden() {
  Check check;
  auto start = std::chrono::steady_clock::now();
  Grammar g = parse_grammar(avg_test::kFrenchGrammar, "french");
  std::ostringstream out;
  write_labeled_lines(generate(g), out);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  check.require(out.str() ==
                    "True\tje pense\n"
                    "False\tje penses\n"
                    "False\tje pensons\n"
                    "False\tje pensez\n",
                "labeled output differs from the worked listing");
  check.require(elapsed < 50, "took " + std::to_string(elapsed) + " ms");
  return check;
}

// 2. Vary statement semantics (AND, OR, single-attribute restriction).
Check criterion_vary_semantics() {
  Check check;
  auto ungrammatical = [](const Grammar& g, std::vector<Diagnostic>* warnings =
                                                nullptr) {
    std::vector<std::string> out;
    for (const MinimalSet& set : generate(g, warnings)) {
      for (const Sentence& u : set.ungrammatical) out.push_back(u.render());
    }
    return out;
  };
  check.require(ungrammatical(french_with_vary("vary: V[1]")) ==
                    std::vector<std::string>{"je pensons"},
                "V[1] variants");
  std::vector<Diagnostic> warnings;
  check.require(ungrammatical(french_with_vary("vary: V[1,s]"), &warnings)
                    .empty(),
                "V[1,s] variants should be empty");
  check.require(!warnings.empty() && warnings[0].code == "zero-variant-set",
                "V[1,s] should warn");
  check.require(ungrammatical(french_with_vary("vary: V[1]; V[s]")) ==
                    std::vector<std::string>{"je penses", "je pensons"},
                "V[1]; V[s] variants");
  return check;
}

// 3. Equivalence with the independent brute-force enumerator.
Check criterion_oracle_equivalence() {
  Check check;
  auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(20260823);
  for (int i = 0; i < 200 && check.ok; ++i) {
    Grammar g = avg_test::random_grammar(rng);
    std::vector<MinimalSet> sets = generate(g);
    avg_test::BruteResult expected = avg_test::brute_force(g);
    check.require(avg_test::as_labeled_multiset(sets) == expected.sentences,
                  "sentence mismatch on grammar " + std::to_string(i));
    check.require(count_minimal_sets(g) == expected.set_count,
                  "count mismatch on grammar " + std::to_string(i));
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  check.require(elapsed < 30, "took " + std::to_string(elapsed) + " s");
  return check;
}

// 4. Harness sanity on the shipped pack plus chance-level random scoring.
Check criterion_harness_sanity() {
  Check check;
  auto start = std::chrono::steady_clock::now();
  for (const std::string& stem : kPack) {
    Grammar g = load_pack_grammar(stem);
    check.require(validate_grammar(g).ok(), stem + " does not validate");
    std::vector<MinimalSet> sets = generate(g);
    check.require(!sets.empty(), stem + " generated nothing");
    auto accuracy = [&](ScorerKind kind) {
      ScoreTable table =
          make_reference_scorer(sets, kind, ScoreMode::full_sentence);
      return *evaluate_full(sets, table).accuracy();
    };
    check.require(accuracy(ScorerKind::oracle) == 1.0, stem + " oracle != 1");
    check.require(accuracy(ScorerKind::adversary) == 0.0,
                  stem + " adversary != 0");
    check.require(accuracy(ScorerKind::constant) == 0.0,
                  stem + " constant != 0");
  }

  // >=1000 two-member sets from a dedicated 10x10 grammar, fixed seed.
  std::string big = "vary: V[]\nS[] -> A[] B[] V[s]\n";
  for (int i = 0; i < 10; ++i) {
    big += "A[] -> a" + std::to_string(i) + "\n";
    big += "B[] -> b" + std::to_string(i) + "\n";
  }
  std::string vs = "V[s] ->", vp = "V[p] ->";
  for (int i = 0; i < 10; ++i) {
    std::string sep = i == 0 ? " " : " | ";
    vs += sep + "good" + std::to_string(i);
    vp += sep + "bad" + std::to_string(i);
  }
  Grammar chance = parse_grammar(big + vs + "\n" + vp + "\n", "chance");
  std::vector<MinimalSet> sets = generate(chance);
  check.require(sets.size() == 1000, "expected 1000 sets");
  ScoreTable table = make_reference_scorer(sets, ScorerKind::seeded_random,
                                           ScoreMode::full_sentence, 17);
  double accuracy = *evaluate_full(sets, table).accuracy();
  check.require(accuracy >= 0.45 && accuracy <= 0.55,
                "random accuracy " + std::to_string(accuracy));

  auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  check.require(elapsed < 10, "took " + std::to_string(elapsed) + " s");
  return check;
}

// 5. Masked-mode skip accounting and the hyphen convention.
Check criterion_skip_accounting() {
  Check check;
  std::vector<MinimalSet> sets;
  for (int i = 0; i < 10; ++i) {
    MinimalSet set;
    set.construction_id = "skips";
    set.set_index = i;
    std::string id = std::to_string(i);
    set.grammatical = {{"the", "dog", "g" + id}, true};
    set.ungrammatical = {{{"the", "dog", "b" + id}, false}};
    set.focus = {2, Terminal{{"g" + id}}, {Terminal{{"b" + id}}}};
    sets.push_back(std::move(set));
  }
  Vocabulary vocab;
  for (int i = 0; i < 10; ++i) {
    if (i >= 4) {
      vocab.tokens.insert("g" + std::to_string(i));
      vocab.tokens.insert("b" + std::to_string(i));
    }
  }
  ScoreTable oracle =
      make_reference_scorer(sets, ScorerKind::oracle, ScoreMode::masked_focus);
  EvalResult result = evaluate_masked(sets, oracle, vocab);
  check.require(result.evaluated == 6, "evaluated != 6");
  check.require(result.skipped == 4, "skipped != 4");

  EvalResult all_skipped = evaluate_masked(sets, oracle, Vocabulary{});
  check.require(all_skipped.evaluated == 0 && all_skipped.skipped == 10,
                "empty vocabulary accounting");
  check.require(!all_skipped.accuracy().has_value(),
                "accuracy should be undefined");
  RunResults run{"seed1", "en", {{"skips", all_skipped}}};
  std::string table = render_report(aggregate_runs({run}), ReportFormat::table);
  check.require(table.find('-') != std::string::npos, "no hyphen cell");
  return check;
}

// 6. Metric identities.
Check criterion_metrics() {
  Check check;
  check.require(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == 1.0,
                "monotone spearman");
  check.require(spearman({1, 2, 3, 4}, {40, 30, 20, 10}) == -1.0,
                "reversed spearman");
  check.require(spearman({1, 2, 3, 4}, {0.77, 0.83, 0.85, 0.88}) == 1.0,
                "paper-ordering fixture");
  check.require(c_wals({"x", {{"f1", 1.0}, {"f2", 0.0}, {"f3", 1.0},
                              {"f4", 0.0}}}) == 0.5,
                "c_wals [1,0,1,0]");

  EvalResult a;
  a.construction_id = "c";
  a.correct = 60;
  a.evaluated = 100;
  EvalResult b = a;
  b.correct = 70;
  AggregateReport report = aggregate_runs(
      {{"s1", "en", {{"c", a}}}, {"s2", "en", {{"c", b}}}});
  const ConstructionStats& stats =
      report.languages.at("en").constructions.at("c");
  check.require(std::abs(*stats.mean - 0.65) < 1e-12, "mean != 0.65");
  check.require(std::abs(*stats.stddev - std::sqrt(0.005)) < 1e-9,
                "std != sqrt(0.005)");
  return check;
}

// 7. Table arithmetic: unweighted mean of the seven construction accuracies.
Check criterion_table_arithmetic() {
  Check check;
  std::vector<double> accuracies{1.00, 0.94, 0.76, 0.60, 0.89, 0.55, 0.63};
  RunResults run{"s1", "en", {}};
  for (size_t i = 0; i < accuracies.size(); ++i) {
    EvalResult r;
    r.construction_id = "c" + std::to_string(i);
    r.evaluated = 100;
    r.correct = std::llround(accuracies[i] * 100);
    run.results[r.construction_id] = r;
  }
  AggregateReport report = aggregate_runs({run});
  check.require(std::abs(*report.languages.at("en").average - 0.77) <= 0.005,
                "language average " +
                    std::to_string(*report.languages.at("en").average));
  return check;
}

// 8. Bigram scorer against hand arithmetic on a three-sentence corpus.
Check criterion_bigram() {
  Check check;
  BigramModel model =
      BigramModel::train({{"a", "b"}, {"a", "a"}, {"b", "a"}}, 0.5, 10);
  // Events {a, b, <unk>, </s>}; counts: <s>:{a:2,b:1}, a:{b:1,a:1,</s>:2},
  // b:{a:1,</s>:1}. Denominator is c(h) + 0.5 * 4.
  double expected_ab =
      std::log(2.5 / 5.0) + std::log(1.5 / 6.0) + std::log(1.5 / 4.0);
  double expected_ba =
      std::log(1.5 / 5.0) + std::log(1.5 / 4.0) + std::log(2.5 / 6.0);
  check.require(std::abs(model.score_sentence({"a", "b"}) - expected_ab) < 1e-9,
                "score(a b)");
  check.require(std::abs(model.score_sentence({"b", "a"}) - expected_ba) < 1e-9,
                "score(b a)");
  for (const std::string& history : model.observed_histories()) {
    double sum = 0.0;
    for (const std::string& event : model.event_space()) {
      sum += model.cond_prob(history, event);
    }
    check.require(std::abs(sum - 1.0) < 1e-9, "normalization at " + history);
  }
  return check;
}

int run_cli(const std::string& args) {
  std::string command = std::string(AVGKIT_BIN) + " " + args;
  return std::system(command.c_str());
}

// 9. Byte-identical pipeline runs and round-trips over the fixture suite,
// including the end-to-end CLI pipeline at accuracy 1.0.
Check criterion_determinism() {
  Check check;
  fs::path work = fs::temp_directory_path() / "avgkit_acceptance";
  fs::remove_all(work);
  fs::create_directories(work / "run1");
  fs::create_directories(work / "run2");

  std::string grammar_args;
  for (const std::string& stem : kPack) {
    grammar_args += " \"" +
                    (fs::path(AVG_DATA_DIR) / "grammars" / "en" /
                     (stem + ".avg"))
                        .string() +
                    "\"";
  }
  for (const char* run : {"run1", "run2"}) {
    int status = run_cli("generate" + grammar_args +
                         " --format structured --out-dir \"" +
                         (work / run).string() + "\" > /dev/null");
    check.require(status == 0, "generate failed");
  }
  for (const std::string& stem : kPack) {
    std::string a = read_file(work / "run1" / (stem + ".sets.jsonl"));
    std::string b = read_file(work / "run2" / (stem + ".sets.jsonl"));
    check.require(!a.empty() && a == b, stem + " not byte-identical");
  }

  // CLI pipeline: score with the oracle, evaluate, aggregate; average 1.00.
  std::string record_args;
  for (const std::string& stem : kPack) {
    fs::path sets = work / "run1" / (stem + ".sets.jsonl");
    fs::path scores = work / (stem + ".scores");
    fs::path records = work / (stem + ".records.jsonl");
    int status = run_cli("score \"" + sets.string() +
                         "\" --scorer oracle --mode full -o \"" +
                         scores.string() + "\"");
    check.require(status == 0, "score failed for " + stem);
    status = run_cli("evaluate \"" + sets.string() + "\" \"" +
                     scores.string() +
                     "\" --mode full --language en --run-id s1 --records \"" +
                     records.string() + "\" > /dev/null");
    check.require(status == 0, "evaluate failed for " + stem);
    record_args += " \"" + records.string() + "\"";
  }
  fs::path report_path = work / "report.txt";
  int status =
      run_cli("report" + record_args + " > \"" + report_path.string() + "\"");
  check.require(status == 0, "report failed");
  std::string report = read_file(report_path);
  check.require(report.find("average") != std::string::npos &&
                    report.find("1.00") != std::string::npos,
                "report does not show perfect accuracy");

  // Round-trips across the whole fixture suite.
  std::vector<fs::path> grammars;
  for (const std::string& stem : kPack) {
    grammars.push_back(fs::path(AVG_DATA_DIR) / "grammars" / "en" /
                       (stem + ".avg"));
  }
  grammars.push_back(fs::path(AVG_FIXTURE_DIR) / "hebrew_simple_agreement.avg");
  for (const fs::path& path : grammars) {
    Grammar g = parse_grammar(read_file(path), path.stem().string());
    Grammar again = parse_grammar(serialize_grammar(g), g.construction_id);
    check.require(again == g, path.stem().string() + " serialize round-trip");

    std::vector<MinimalSet> sets = generate(g);
    std::ostringstream out;
    write_structured(sets, out);
    std::istringstream in(out.str());
    check.require(read_structured(in) == sets,
                  path.stem().string() + " structured round-trip");
  }
  return check;
}

// 10. Capitalization transform over the English pack and a caseless script.
Check criterion_capitalization() {
  Check check;
  for (const std::string& stem : kPack) {
    Grammar g = load_pack_grammar(stem);
    for (const MinimalSet& set : generate(g)) {
      MinimalSet capped = apply_capitalization(set);
      auto compare = [&](const Sentence& before, const Sentence& after) {
        check.require(before.tokens.size() == after.tokens.size(),
                      stem + ": token count changed");
        for (size_t i = 1; i < before.tokens.size(); ++i) {
          check.require(before.tokens[i] == after.tokens[i],
                        stem + ": non-initial token changed");
        }
        check.require(after.tokens[0] == capitalize_first(before.tokens[0]),
                      stem + ": wrong first token");
        check.require(after.tokens[0].substr(1) == before.tokens[0].substr(1),
                      stem + ": first token tail changed");
      };
      compare(set.grammatical, capped.grammatical);
      for (size_t u = 0; u < set.ungrammatical.size(); ++u) {
        compare(set.ungrammatical[u], capped.ungrammatical[u]);
      }
      check.require(apply_capitalization(capped) == capped,
                    stem + ": not idempotent");
      check.require(capped.focus == set.focus, stem + ": focus changed");
    }
  }

  Grammar hebrew = parse_grammar(
      read_file(fs::path(AVG_FIXTURE_DIR) / "hebrew_simple_agreement.avg"),
      "hebrew_simple_agreement");
  for (const MinimalSet& set : generate(hebrew)) {
    check.require(apply_capitalization(set) == set,
                  "caseless-script sentence changed");
  }
  return check;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "worked-grammar golden output", criterion_golden},
      {2, "vary statement semantics", criterion_vary_semantics},
      {3, "brute-force oracle equivalence", criterion_oracle_equivalence},
      {4, "harness sanity on the shipped pack", criterion_harness_sanity},
      {5, "masked-mode skip accounting", criterion_skip_accounting},
      {6, "metric identities", criterion_metrics},
      {7, "table arithmetic", criterion_table_arithmetic},
      {8, "bigram scorer hand arithmetic", criterion_bigram},
      {9, "determinism and round-trips", criterion_determinism},
      {10, "capitalization transform", criterion_capitalization},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Check check;
    try {
      check = criterion.run();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    if (check.ok) {
      std::cout << "PASS  criterion " << criterion.number << ": "
                << criterion.name << '\n';
    } else {
      std::cout << "FAIL  criterion " << criterion.number << ": "
                << criterion.name << " (" << check.detail << ")\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
