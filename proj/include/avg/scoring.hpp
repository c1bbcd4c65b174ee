#pragma once

// Scoring harness: score tables, the two evaluation protocols
// (whole-sentence comparison and masked-focus comparison with OOV
// skipping), built-in reference scorers and a smoothed bigram scorer.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "avg/generate.hpp"

namespace avg {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScoreMode { full_sentence, masked_focus };

struct MaskedKey {
  std::string construction_id;
  int set_index = 0;
  std::string candidate;

  auto operator<=>(const MaskedKey&) const = default;
};

struct ScoreTable {
  ScoreMode mode = ScoreMode::full_sentence;
  std::map<std::string, double> full;     // rendered sentence -> score
  std::map<MaskedKey, double> masked;     // (set, candidate form) -> score
  int duplicate_warnings = 0;
};

struct Vocabulary {
  std::set<std::string> tokens;

  bool contains(const std::string& token) const { return tokens.count(token) > 0; }
  static Vocabulary read(std::istream& source);
};

struct EvalResult {
  std::string construction_id;
  long long evaluated = 0;
  long long correct = 0;
  long long skipped = 0;  // masked mode only

  // Undefined when nothing was evaluated (rendered as a hyphen in reports).
  std::optional<double> accuracy() const {
    if (evaluated == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(evaluated);
  }
  bool operator==(const EvalResult&) const = default;
};

// A set counts correct iff the grammatical sentence strictly outscores every
// ungrammatical one; ties are incorrect. Sets without ungrammatical variants
// are excluded from the denominator. Missing sentences are a hard error.
EvalResult evaluate_full(const std::vector<MinimalSet>& sets,
                         const ScoreTable& scores);

// Skips (and counts) any set whose grammatical or variant focus form is out
// of vocabulary; otherwise compares candidate scores at the focus position.
// All focus forms must be single-token.
EvalResult evaluate_masked(const std::vector<MinimalSet>& sets,
                           const ScoreTable& scores, const Vocabulary& vocab);

// Add-k smoothed bigram model over a closed vocabulary; the stand-in scorer
// for end-to-end runs without an external model.
class BigramModel {
 public:
  static constexpr const char* kUnknown = "<unk>";
  static constexpr const char* kStart = "<s>";
  static constexpr const char* kEnd = "</s>";

  // vocabulary = the vocab_limit most frequent corpus tokens (ties broken
  // lexicographically); everything else maps to the unknown token.
  static BigramModel train(const std::vector<std::vector<std::string>>& corpus,
                           double k, std::size_t vocab_limit);

  // P(word | history); sums to 1 over vocabulary + unknown + end marker.
  double cond_prob(const std::string& history, const std::string& word) const;

  // Sum of log conditional probabilities with boundary markers.
  double score_sentence(const std::vector<std::string>& tokens) const;

  const std::set<std::string>& vocabulary() const { return vocab_; }
  std::vector<std::string> observed_histories() const;
  std::vector<std::string> event_space() const;

 private:
  std::set<std::string> vocab_;
  double k_ = 1.0;
  std::map<std::string, std::map<std::string, long long>> bigrams_;
  std::map<std::string, long long> history_totals_;

  std::string map_token(const std::string& token) const;
};

enum class ScorerKind { oracle, adversary, constant, seeded_random };

// Harness self-test doubles. seeded_random is deterministic for a given seed.
ScoreTable make_reference_scorer(const std::vector<MinimalSet>& sets,
                                 ScorerKind kind, ScoreMode mode,
                                 std::uint64_t seed = 0);

// Scores every sentence (full mode) or every focus candidate spliced into
// its sentence (masked mode) with the bigram model.
ScoreTable score_with_bigram(const std::vector<MinimalSet>& sets,
                             const BigramModel& model, ScoreMode mode);

// Line format: full mode `<sentence>\t<score>`; masked mode
// `<construction_id>\t<set_index>\t<candidate>\t<score>`. Duplicate keys are
// last-write-wins and counted in duplicate_warnings.
ScoreTable load_scores(std::istream& source, ScoreMode mode);
std::size_t write_scores(const ScoreTable& table, std::ostream& sink);

}  // namespace avg
