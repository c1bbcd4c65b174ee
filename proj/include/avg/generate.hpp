#pragma once

// Exhaustive expansion of a validated grammar into labeled minimal sets,
// plus the labeled-line and structured (JSON lines) writers and the
// first-character capitalization transform.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "avg/grammar.hpp"

namespace avg {

struct Sentence {
  std::vector<std::string> tokens;
  bool label = true;  // true = grammatical

  std::string render() const;
  bool operator==(const Sentence&) const = default;
};

struct Focus {
  int token_index = 0;  // index of the focus form's first token
  Terminal grammatical_form;
  std::vector<Terminal> variant_forms;  // aligned with the ungrammatical list

  bool operator==(const Focus&) const = default;
};

struct MinimalSet {
  std::string construction_id;
  int set_index = 0;
  Sentence grammatical;
  std::vector<Sentence> ungrammatical;  // may be empty (vary selects only the
                                        // grammatical cell)
  Focus focus;

  bool operator==(const MinimalSet&) const = default;
};

class GenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic: the same grammar always yields the same sequence.
// Pre: validate_grammar(g).ok().
std::vector<MinimalSet> generate(const Grammar& g,
                                 std::vector<Diagnostic>* warnings = nullptr);

// Equals generate(g).size() without materializing sentences.
long long count_minimal_sets(const Grammar& g);

// Uppercases the first character of every sentence's first token; caseless
// scripts pass through unchanged. Idempotent.
MinimalSet apply_capitalization(const MinimalSet& s);

// Simple locale-independent uppercase mapping of the first code point.
std::string capitalize_first(std::string_view token);

// One `True`/`False` + TAB + sentence line per sentence, grammatical first.
// Returns the number of bytes written.
std::size_t write_labeled_lines(const std::vector<MinimalSet>& sets,
                                std::ostream& sink);

// One self-contained JSON record per line. Returns the byte count.
std::size_t write_structured(const std::vector<MinimalSet>& sets,
                             std::ostream& sink);

// Inverse of write_structured; throws GenerateError on malformed records.
std::vector<MinimalSet> read_structured(std::istream& source);

}  // namespace avg
