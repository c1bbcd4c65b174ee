#include "avg/grammar.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace avg {

namespace {

constexpr std::string_view kForbiddenNameChars = "[],;|";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    if (kForbiddenNameChars.find(c) != std::string_view::npos) return false;
  }
  return true;
}

AttributeSet parse_attributes(std::string_view inside, int line,
                              std::vector<Diagnostic>* warnings) {
  AttributeSet attrs;
  if (trim(inside).empty()) return attrs;
  size_t start = 0;
  while (start <= inside.size()) {
    size_t comma = inside.find(',', start);
    std::string_view part = comma == std::string_view::npos
                                ? inside.substr(start)
                                : inside.substr(start, comma - start);
    std::string_view attr = trim(part);
    if (attr.empty()) throw ParseError(line, "empty attribute");
    if (attr.find_first_of("[];") != std::string_view::npos) {
      throw ParseError(line, "invalid character in attribute '" +
                                 std::string(attr) + "'");
    }
    if (!attrs.insert(std::string(attr)).second && warnings) {
      warnings->push_back({line, "duplicate-attribute",
                           "duplicate attribute '" + std::string(attr) +
                               "' collapsed"});
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return attrs;
}

// Parses "Name[a,b]" into name + attributes.
std::pair<std::string, AttributeSet> parse_attributed_name(
    std::string_view text, int line, std::vector<Diagnostic>* warnings) {
  text = trim(text);
  size_t open = text.find('[');
  if (open == std::string_view::npos || text.back() != ']') {
    throw ParseError(line, "malformed brackets in '" + std::string(text) + "'");
  }
  std::string_view name = trim(text.substr(0, open));
  std::string_view inside = text.substr(open + 1, text.size() - open - 2);
  if (inside.find_first_of("[]") != std::string_view::npos) {
    throw ParseError(line, "malformed brackets in '" + std::string(text) + "'");
  }
  if (!valid_identifier(name)) {
    throw ParseError(line, "invalid preterminal name '" + std::string(name) + "'");
  }
  return {std::string(name), parse_attributes(inside, line, warnings)};
}

// Splits a right-hand side on whitespace, keeping bracketed spans intact so
// attribute lists may contain internal spaces.
std::vector<std::string> tokenize_rhs(std::string_view rhs, int line) {
  std::vector<std::string> tokens;
  std::string current;
  int depth = 0;
  for (char c : rhs) {
    if (c == '[') ++depth;
    if (c == ']') {
      --depth;
      if (depth < 0) throw ParseError(line, "malformed brackets");
    }
    if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (depth != 0) throw ParseError(line, "malformed brackets");
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// Splits on a separator character at bracket depth 0.
std::vector<std::string_view> split_top_level(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '[') ++depth;
    if (text[i] == ']') --depth;
    if (text[i] == sep && depth == 0) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(text.substr(start));
  return parts;
}

bool looks_like_reference(std::string_view token) {
  size_t open = token.find('[');
  return open != std::string_view::npos && open > 0 && token.back() == ']';
}

}  // namespace

std::string Terminal::render() const {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool match_selector(const AttributeSet& required, const AttributeSet& candidate) {
  return std::includes(candidate.begin(), candidate.end(), required.begin(),
                       required.end());
}

Grammar parse_grammar(std::string_view source_text,
                      const std::string& construction_id,
                      std::vector<Diagnostic>* warnings) {
  Grammar g;
  g.construction_id = construction_id;
  bool saw_vary = false;

  std::istringstream in{std::string(source_text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.substr(0, 5) == "vary:") {
      if (saw_vary) throw ParseError(line_no, "multiple vary statements");
      saw_vary = true;
      std::string_view rest = trim(line.substr(5));
      if (rest.empty()) throw ParseError(line_no, "empty vary statement");
      for (std::string_view part : split_top_level(rest, ';')) {
        auto [name, attrs] = parse_attributed_name(part, line_no, warnings);
        if (name == "S") {
          throw ParseError(line_no, "reserved name S used as a preterminal");
        }
        g.vary.push_back({std::move(name), std::move(attrs), line_no});
      }
      continue;
    }

    size_t arrow = line.find("->");
    if (arrow == std::string_view::npos) {
      throw ParseError(line_no, "expected '->' in '" + std::string(line) + "'");
    }
    auto [name, attrs] =
        parse_attributed_name(line.substr(0, arrow), line_no, warnings);
    std::string_view rhs = trim(line.substr(arrow + 2));
    if (rhs.empty()) throw ParseError(line_no, "empty right-hand side");

    std::vector<std::string_view> alternatives = split_top_level(rhs, '|');

    if (name == "S") {
      // Each |-separated alternative is an independent template.
      for (std::string_view alt : alternatives) {
        std::vector<std::string> tokens = tokenize_rhs(trim(alt), line_no);
        if (tokens.empty()) throw ParseError(line_no, "empty right-hand side");
        Template tmpl;
        tmpl.attributes = attrs;
        tmpl.line = line_no;
        for (std::string& tok : tokens) {
          if (looks_like_reference(tok)) {
            auto [ref_name, ref_attrs] =
                parse_attributed_name(tok, line_no, warnings);
            if (ref_name == "S") {
              throw ParseError(line_no,
                               "reserved name S used as a preterminal");
            }
            tmpl.items.emplace_back(
                Reference{std::move(ref_name), std::move(ref_attrs)});
          } else {
            if (tok.find_first_of("[]") != std::string::npos) {
              throw ParseError(line_no, "malformed brackets in '" + tok + "'");
            }
            tmpl.items.emplace_back(std::move(tok));
          }
        }
        g.templates.push_back(std::move(tmpl));
      }
      continue;
    }

    // Preterminal definition; right-hand sides hold terminals only.
    std::vector<Terminal> terms;
    for (std::string_view alt : alternatives) {
      std::vector<std::string> tokens = tokenize_rhs(trim(alt), line_no);
      if (tokens.empty()) throw ParseError(line_no, "empty right-hand side");
      for (const std::string& tok : tokens) {
        if (tok.find_first_of("[]") != std::string::npos) {
          throw ParseError(
              line_no, "definition right-hand side may not contain brackets");
        }
      }
      terms.push_back(Terminal{std::move(tokens)});
    }
    auto same = std::find_if(g.definitions.begin(), g.definitions.end(),
                             [&](const PreterminalDef& d) {
                               return d.name == name && d.attributes == attrs;
                             });
    if (same != g.definitions.end()) {
      same->alternatives.insert(same->alternatives.end(), terms.begin(),
                                terms.end());
    } else {
      g.definitions.push_back(
          {std::move(name), std::move(attrs), std::move(terms), line_no});
    }
  }

  if (!saw_vary) throw ParseError(line_no, "missing vary statement");
  if (g.templates.empty()) throw ParseError(line_no, "no template");
  return g;
}

ValidationReport validate_grammar(const Grammar& g) {
  ValidationReport report;

  auto defined = [&](const std::string& name) {
    return std::any_of(g.definitions.begin(), g.definitions.end(),
                       [&](const PreterminalDef& d) { return d.name == name; });
  };
  auto resolvable = [&](const Reference& ref) {
    return std::any_of(g.definitions.begin(), g.definitions.end(),
                       [&](const PreterminalDef& d) {
                         return d.name == ref.name &&
                                match_selector(ref.attributes, d.attributes);
                       });
  };

  std::set<std::string> vary_names;
  for (const VarySelector& sel : g.vary) {
    vary_names.insert(sel.name);
    if (!defined(sel.name)) {
      report.errors.push_back(
          {sel.line, "undefined-vary-name",
           "vary selector names undefined preterminal " + sel.name});
    }
  }
  if (vary_names.size() > 1) {
    report.warnings.push_back(
        {g.vary.front().line, "multi-vary",
         "vary statement covers more than one preterminal name"});
  }

  std::set<std::string> referenced_names;
  for (const Template& tmpl : g.templates) {
    for (const TemplateItem& item : tmpl.items) {
      const Reference* ref = std::get_if<Reference>(&item);
      if (!ref) continue;
      referenced_names.insert(ref->name);
      if (!resolvable(*ref)) {
        report.errors.push_back(
            {tmpl.line, "unresolved-reference",
             "unresolvable reference " + ref->name + " in template"});
      }
    }
  }
  for (const std::string& name : vary_names) {
    if (!referenced_names.count(name)) {
      report.errors.push_back(
          {g.vary.front().line, "vary-never-referenced",
           "varied preterminal " + name +
               " is referenced by no template"});
    }
  }

  for (const PreterminalDef& def : g.definitions) {
    bool reachable = false;
    for (const Template& tmpl : g.templates) {
      for (const TemplateItem& item : tmpl.items) {
        const Reference* ref = std::get_if<Reference>(&item);
        if (ref && ref->name == def.name &&
            match_selector(ref->attributes, def.attributes)) {
          reachable = true;
        }
      }
    }
    for (const VarySelector& sel : g.vary) {
      if (sel.name == def.name &&
          match_selector(sel.attributes, def.attributes)) {
        reachable = true;
      }
    }
    if (!reachable) {
      report.warnings.push_back(
          {def.line, "unreachable-definition",
           "definition " + def.name + " is never used"});
    }
  }

  // Unequal paradigm sizes become a hard error at generation time.
  for (const std::string& name : vary_names) {
    size_t count = 0;
    bool first = true, mismatch = false;
    for (const PreterminalDef& def : g.definitions) {
      if (def.name != name) continue;
      bool matched = std::any_of(g.vary.begin(), g.vary.end(),
                                 [&](const VarySelector& sel) {
                                   return sel.name == def.name &&
                                          match_selector(sel.attributes,
                                                         def.attributes);
                                 });
      if (!matched) continue;
      if (first) {
        count = def.alternatives.size();
        first = false;
      } else if (def.alternatives.size() != count) {
        mismatch = true;
      }
    }
    if (mismatch) {
      report.warnings.push_back(
          {g.vary.front().line, "unaligned-paradigm",
           "definitions of varied preterminal " + name +
               " have unequal alternative counts"});
    }
  }

  return report;
}

namespace {

std::string render_attributes(const AttributeSet& attrs) {
  std::string out = "[";
  bool first = true;
  for (const std::string& a : attrs) {
    if (!first) out.push_back(',');
    out += a;
    first = false;
  }
  out.push_back(']');
  return out;
}

}  // namespace

std::string serialize_grammar(const Grammar& g) {
  std::string out = "vary: ";
  for (size_t i = 0; i < g.vary.size(); ++i) {
    if (i > 0) out += "; ";
    out += g.vary[i].name + render_attributes(g.vary[i].attributes);
  }
  out.push_back('\n');
  for (const Template& tmpl : g.templates) {
    out += "S" + render_attributes(tmpl.attributes) + " ->";
    for (const TemplateItem& item : tmpl.items) {
      out.push_back(' ');
      if (const Reference* ref = std::get_if<Reference>(&item)) {
        out += ref->name + render_attributes(ref->attributes);
      } else {
        out += std::get<std::string>(item);
      }
    }
    out.push_back('\n');
  }
  for (const PreterminalDef& def : g.definitions) {
    out += def.name + render_attributes(def.attributes) + " -> ";
    for (size_t i = 0; i < def.alternatives.size(); ++i) {
      if (i > 0) out += " | ";
      out += def.alternatives[i].render();
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace avg
