#include "avg/grammar.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace avg;

TEST_CASE("worked French grammar parses into the expected structure") {
  Grammar g = parse_grammar(avg_test::kFrenchGrammar, "french");

  REQUIRE(g.vary.size() == 1);
  CHECK(g.vary[0].name == "V");
  CHECK(g.vary[0].attributes.empty());

  REQUIRE(g.templates.size() == 1);
  REQUIRE(g.templates[0].items.size() == 2);
  CHECK(std::get<std::string>(g.templates[0].items[0]) == "je");
  const Reference& ref = std::get<Reference>(g.templates[0].items[1]);
  CHECK(ref.name == "V");
  CHECK(ref.attributes == AttributeSet{"1", "s"});

  REQUIRE(g.definitions.size() == 4);
  for (const PreterminalDef& def : g.definitions) {
    CHECK(def.name == "V");
    CHECK(def.alternatives.size() == 1);
  }
  CHECK(g.definitions[0].alternatives[0].render() == "pense");
  CHECK(g.definitions[3].alternatives[0].render() == "pensez");
}

TEST_CASE("same-key definition lines merge in source order") {
  Grammar g = parse_grammar(
      "vary: V[]\nS[] -> he V[s]\nV[s] -> smiles\nV[s] -> laughs\n", "t");
  REQUIRE(g.definitions.size() == 1);
  REQUIRE(g.definitions[0].alternatives.size() == 2);
  CHECK(g.definitions[0].alternatives[0].render() == "smiles");
  CHECK(g.definitions[0].alternatives[1].render() == "laughs");

  // Re-serializing keeps the merged form.
  Grammar again = parse_grammar(serialize_grammar(g), "t");
  CHECK(again == g);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_grammar("S[] -> a b\nN[] -> x\n", "t"), ParseError);
  CHECK_THROWS_AS(
      parse_grammar("vary: V[]\nvary: V[]\nS[] -> V[]\nV[] -> x\n", "t"),
      ParseError);
  CHECK_THROWS_AS(parse_grammar("vary: V[]\nV[] -> x\n", "t"), ParseError);
  CHECK_THROWS_AS(parse_grammar("vary: V[]\nS[] -> V[]\nN[] -> \n", "t"),
                  ParseError);
  CHECK_THROWS_AS(parse_grammar("vary: V[]\nS[] -> V[\nV[] -> x\n", "t"),
                  ParseError);
  CHECK_THROWS_AS(parse_grammar("vary: S[]\nS[] -> x\n", "t"), ParseError);
  CHECK_THROWS_AS(parse_grammar("vary: V[]\nS[] -> S[] V[]\nV[] -> x\n", "t"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_grammar("vary: V[]\nS[] -> V[]\nV[] -> a N[x]\n", "t"),
      ParseError);
}

TEST_CASE("duplicate attribute collapses with a warning") {
  std::vector<Diagnostic> warnings;
  Grammar g = parse_grammar("vary: V[]\nS[] -> V[s,s]\nV[s] -> x\n", "t",
                            &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].code == "duplicate-attribute");
  const Reference& ref = std::get<Reference>(g.templates[0].items[0]);
  CHECK(ref.attributes == AttributeSet{"s"});
}

TEST_CASE("attributes may contain internal spaces") {
  Grammar g = parse_grammar(
      "vary: V[first person]\nS[] -> V[first person, sing]\n"
      "V[first person, sing] -> pense\n",
      "t");
  const Reference& ref = std::get<Reference>(g.templates[0].items[0]);
  CHECK(ref.attributes == AttributeSet{"first person", "sing"});
  CHECK(validate_grammar(g).ok());
}

TEST_CASE("match_selector is subset matching") {
  CHECK(match_selector({}, {"1", "s"}));
  CHECK(match_selector({"1"}, {"1", "p"}));
  CHECK_FALSE(match_selector({"1"}, {"2", "s"}));
  CHECK_FALSE(match_selector({"1", "s"}, {"1"}));

  // Reflexive and monotone.
  AttributeSet a{"x", "y"};
  CHECK(match_selector(a, a));
  AttributeSet b{"x", "y", "z"};
  CHECK(match_selector(a, b));
}

TEST_CASE("validation accepts the worked grammar") {
  Grammar g = parse_grammar(avg_test::kFrenchGrammar, "french");
  ValidationReport report = validate_grammar(g);
  CHECK(report.errors.empty());
  CHECK(report.warnings.empty());
}

TEST_CASE("validation flags undefined vary names") {
  std::string text = avg_test::kFrenchGrammar;
  size_t at = text.find("V[]");
  text.replace(at, 3, "W[]");
  Grammar g = parse_grammar(text, "french");
  ValidationReport report = validate_grammar(g);
  REQUIRE_FALSE(report.ok());
  bool found = std::any_of(report.errors.begin(), report.errors.end(),
                           [](const Diagnostic& d) {
                             return d.code == "undefined-vary-name";
                           });
  CHECK(found);
}

TEST_CASE("validation flags unresolvable template references") {
  Grammar g = parse_grammar(
      "vary: V[]\nS[] -> je V[3,s]\n"
      "V[1,s] -> pense\nV[2,s] -> penses\nV[1,p] -> pensons\nV[2,p] -> pensez\n",
      "t");
  ValidationReport report = validate_grammar(g);
  REQUIRE_FALSE(report.ok());
  CHECK(report.errors[0].code == "unresolved-reference");
}

TEST_CASE("validation warns about multi-name vary and unreachable defs") {
  Grammar g = parse_grammar(
      "vary: V[]; W[]\nS[] -> V[] x\nV[] -> a\nW[] -> b\nZ[] -> c\n", "t");
  ValidationReport report = validate_grammar(g);
  // W is varied but never referenced by a template.
  CHECK_FALSE(report.ok());
  auto has_warning = [&](const std::string& code) {
    return std::any_of(report.warnings.begin(), report.warnings.end(),
                       [&](const Diagnostic& d) { return d.code == code; });
  };
  CHECK(has_warning("multi-vary"));
  CHECK(has_warning("unreachable-definition"));
}

TEST_CASE("serialization round-trips") {
  Grammar g = parse_grammar(avg_test::kFrenchGrammar, "french");
  Grammar again = parse_grammar(serialize_grammar(g), "french");
  CHECK(again == g);
  // Fixed point after one canonicalization.
  CHECK(serialize_grammar(again) == serialize_grammar(g));
}

TEST_CASE("empty attribute set renders as literal brackets") {
  Grammar g = parse_grammar("vary: V[]\nS[] -> V[]\nV[] -> x\n", "t");
  std::string text = serialize_grammar(g);
  CHECK(text.find("S[] ->") != std::string::npos);
  CHECK(text.find("vary: V[]") == 0);
}

TEST_CASE("attribute order and comments do not affect equality") {
  std::string base = avg_test::kFrenchGrammar;
  std::string reordered =
      "vary: V[]\n\n# a comment\nS[] -> je V[s,1]\n"
      "V[s,1] -> pense\nV[s,2] -> penses\n# another\nV[p,1] -> pensons\n"
      "V[p,2] -> pensez\n\n";
  CHECK(parse_grammar(base, "french") == parse_grammar(reordered, "french"));
}

TEST_CASE("CRLF input parses like LF input") {
  std::string crlf = avg_test::kFrenchGrammar;
  std::string with_cr;
  for (char c : crlf) {
    if (c == '\n') with_cr += "\r\n";
    else with_cr.push_back(c);
  }
  CHECK(parse_grammar(with_cr, "french") ==
        parse_grammar(avg_test::kFrenchGrammar, "french"));
}

TEST_CASE("property: random grammars round-trip through serialization") {
  std::mt19937 rng(1234);
  for (int i = 0; i < 100; ++i) {
    Grammar g = avg_test::random_grammar(rng);
    Grammar again = parse_grammar(serialize_grammar(g), g.construction_id);
    CHECK(again == g);
  }
}
