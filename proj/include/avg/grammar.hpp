#pragma once

// Attribute-varying grammar data model, parser, validator and canonical
// serializer. Grammars are line-oriented: one vary statement, one or more
// S templates, and non-recursive preterminal definitions whose right-hand
// sides are plain terminals.

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace avg {

struct Diagnostic {
  int line = 0;
  std::string code;
  std::string message;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line),
        message_(message) {}
  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

// Unordered, duplicate-free; std::set keeps serialization order canonical.
using AttributeSet = std::set<std::string>;

struct Terminal {
  std::vector<std::string> tokens;  // non-empty, each token whitespace-free

  std::string render() const;
  bool operator==(const Terminal&) const = default;
};

struct Reference {
  std::string name;
  AttributeSet attributes;
  bool operator==(const Reference&) const = default;
};

// A template item is either a single literal token or a preterminal reference.
using TemplateItem = std::variant<std::string, Reference>;

struct Template {
  AttributeSet attributes;  // attributes on the S head; stored, not interpreted
  std::vector<TemplateItem> items;
  int line = 0;

  bool operator==(const Template& o) const {
    return attributes == o.attributes && items == o.items;
  }
};

struct PreterminalDef {
  std::string name;
  AttributeSet attributes;
  std::vector<Terminal> alternatives;  // source order; alignment depends on it
  int line = 0;

  bool operator==(const PreterminalDef& o) const {
    return name == o.name && attributes == o.attributes &&
           alternatives == o.alternatives;
  }
};

struct VarySelector {
  std::string name;
  AttributeSet attributes;  // conjunctive: all must be present on a match
  int line = 0;

  bool operator==(const VarySelector& o) const {
    return name == o.name && attributes == o.attributes;
  }
};

struct Grammar {
  std::vector<VarySelector> vary;  // semicolon-separated selectors; disjunctive
  std::vector<Template> templates;
  std::vector<PreterminalDef> definitions;
  std::string construction_id;

  bool operator==(const Grammar& o) const {
    return vary == o.vary && templates == o.templates &&
           definitions == o.definitions && construction_id == o.construction_id;
  }
};

struct ValidationReport {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;

  bool ok() const { return errors.empty(); }
};

// true iff required is a subset of candidate; empty required matches anything.
bool match_selector(const AttributeSet& required, const AttributeSet& candidate);

// Throws ParseError on malformed input. Duplicate attributes within one
// bracket are collapsed with a warning appended to *warnings when given.
Grammar parse_grammar(std::string_view source_text,
                      const std::string& construction_id,
                      std::vector<Diagnostic>* warnings = nullptr);

ValidationReport validate_grammar(const Grammar& g);

// Canonical text form; parse_grammar(serialize_grammar(g)) == g.
std::string serialize_grammar(const Grammar& g);

}  // namespace avg
