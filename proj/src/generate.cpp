#include "avg/generate.hpp"

#include <algorithm>
#include <ostream>
#include <istream>
#include <set>

#include "json.hpp"

namespace avg {

namespace {

struct NonVariedSlot {
  size_t item_pos;
  std::vector<const Terminal*> choices;  // matched defs' alternatives, in order
};

struct TemplatePlan {
  const Template* tmpl;
  size_t varied_pos;
  std::vector<const PreterminalDef*> resolved;  // defs matching the varied ref
  std::vector<const PreterminalDef*> pool;      // defs matched by vary
  size_t paradigm_size;
  std::vector<NonVariedSlot> slots;
};

std::vector<const PreterminalDef*> matching_defs(const Grammar& g,
                                                 const std::string& name,
                                                 const AttributeSet& attrs) {
  std::vector<const PreterminalDef*> out;
  for (const PreterminalDef& def : g.definitions) {
    if (def.name == name && match_selector(attrs, def.attributes)) {
      out.push_back(&def);
    }
  }
  return out;
}

TemplatePlan plan_template(const Grammar& g, const Template& tmpl) {
  std::set<std::string> vary_names;
  for (const VarySelector& sel : g.vary) vary_names.insert(sel.name);

  TemplatePlan plan{&tmpl, tmpl.items.size(), {}, {}, 0, {}};
  for (size_t pos = 0; pos < tmpl.items.size(); ++pos) {
    const Reference* ref = std::get_if<Reference>(&tmpl.items[pos]);
    if (!ref) continue;
    if (vary_names.count(ref->name)) {
      if (plan.varied_pos != tmpl.items.size()) {
        throw GenerateError("one varied occurrence per template (line " +
                            std::to_string(tmpl.line) + ")");
      }
      plan.varied_pos = pos;
      continue;
    }
    NonVariedSlot slot{pos, {}};
    for (const PreterminalDef* def :
         matching_defs(g, ref->name, ref->attributes)) {
      for (const Terminal& alt : def->alternatives) slot.choices.push_back(&alt);
    }
    if (slot.choices.empty()) {
      throw GenerateError("unresolvable reference " + ref->name +
                          " (line " + std::to_string(tmpl.line) + ")");
    }
    plan.slots.push_back(std::move(slot));
  }
  if (plan.varied_pos == tmpl.items.size()) {
    throw GenerateError("template has no varied occurrence (line " +
                        std::to_string(tmpl.line) + ")");
  }

  const Reference& varied = std::get<Reference>(tmpl.items[plan.varied_pos]);
  plan.resolved = matching_defs(g, varied.name, varied.attributes);
  if (plan.resolved.empty()) {
    throw GenerateError("varied reference " + varied.name +
                        " resolves to zero definitions (line " +
                        std::to_string(tmpl.line) + ")");
  }
  for (const PreterminalDef& def : g.definitions) {
    if (def.name != varied.name) continue;
    bool matched = std::any_of(g.vary.begin(), g.vary.end(),
                               [&](const VarySelector& sel) {
                                 return sel.name == def.name &&
                                        match_selector(sel.attributes,
                                                       def.attributes);
                               });
    if (matched) plan.pool.push_back(&def);
  }

  plan.paradigm_size = plan.resolved.front()->alternatives.size();
  auto aligned = [&](const PreterminalDef* d) {
    return d->alternatives.size() == plan.paradigm_size;
  };
  if (!std::all_of(plan.resolved.begin(), plan.resolved.end(), aligned) ||
      !std::all_of(plan.pool.begin(), plan.pool.end(), aligned)) {
    throw GenerateError("unaligned paradigm for varied preterminal " +
                        varied.name);
  }
  return plan;
}

}  // namespace

std::string Sentence::render() const {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<MinimalSet> generate(const Grammar& g,
                                 std::vector<Diagnostic>* warnings) {
  std::vector<MinimalSet> sets;
  int set_index = 0;
  for (const Template& tmpl : g.templates) {
    TemplatePlan plan = plan_template(g, tmpl);
    bool warned_empty = false;

    std::vector<size_t> odometer(plan.slots.size(), 0);
    bool done = false;
    while (!done) {
      // Assemble the grounded sentence skeleton around the varied item.
      std::vector<std::string> prefix, suffix;
      int focus_index = 0;
      {
        size_t slot_i = 0;
        for (size_t pos = 0; pos < tmpl.items.size(); ++pos) {
          std::vector<std::string>* dst =
              pos < plan.varied_pos ? &prefix : &suffix;
          if (pos == plan.varied_pos) {
            focus_index = static_cast<int>(prefix.size());
            continue;
          }
          if (const std::string* lit =
                  std::get_if<std::string>(&tmpl.items[pos])) {
            dst->push_back(*lit);
          } else {
            const Terminal* choice =
                plan.slots[slot_i].choices[odometer[slot_i]];
            dst->insert(dst->end(), choice->tokens.begin(),
                        choice->tokens.end());
            ++slot_i;
          }
        }
      }

      auto splice = [&](const Terminal& form, bool label) {
        Sentence s;
        s.label = label;
        s.tokens = prefix;
        s.tokens.insert(s.tokens.end(), form.tokens.begin(), form.tokens.end());
        s.tokens.insert(s.tokens.end(), suffix.begin(), suffix.end());
        return s;
      };

      for (const PreterminalDef* gram_def : plan.resolved) {
        for (size_t j = 0; j < plan.paradigm_size; ++j) {
          const Terminal& gram_form = gram_def->alternatives[j];
          MinimalSet set;
          set.construction_id = g.construction_id;
          set.set_index = set_index;
          set.grammatical = splice(gram_form, true);
          set.focus.token_index = focus_index;
          set.focus.grammatical_form = gram_form;
          for (const PreterminalDef* other : plan.pool) {
            if (other == gram_def) continue;
            const Terminal& form = other->alternatives[j];
            if (form.render() == gram_form.render()) continue;
            set.ungrammatical.push_back(splice(form, false));
            set.focus.variant_forms.push_back(form);
          }
          if (set.ungrammatical.empty() && !warned_empty && warnings) {
            warnings->push_back(
                {tmpl.line, "zero-variant-set",
                 "vary statement selects only the grammatical cell; "
                 "minimal sets have no ungrammatical variants"});
            warned_empty = true;
          }
          ++set_index;
          sets.push_back(std::move(set));
        }
      }

      // Advance the rightmost slot; item position is the major order.
      done = true;
      for (size_t i = odometer.size(); i-- > 0;) {
        if (++odometer[i] < plan.slots[i].choices.size()) {
          done = false;
          break;
        }
        odometer[i] = 0;
      }
    }
  }
  return sets;
}

long long count_minimal_sets(const Grammar& g) {
  long long total = 0;
  for (const Template& tmpl : g.templates) {
    TemplatePlan plan = plan_template(g, tmpl);
    long long groundings = 1;
    for (const NonVariedSlot& slot : plan.slots) {
      groundings *= static_cast<long long>(slot.choices.size());
    }
    total += groundings * static_cast<long long>(plan.resolved.size()) *
             static_cast<long long>(plan.paradigm_size);
  }
  return total;
}

namespace {

// Maps a lowercase code point to its uppercase counterpart for the Latin,
// Greek and Cyrillic ranges; returns the input unchanged elsewhere.
uint32_t simple_upper(uint32_t cp) {
  if (cp >= 'a' && cp <= 'z') return cp - 0x20;
  if (cp >= 0x00E0 && cp <= 0x00FE && cp != 0x00F7) return cp - 0x20;
  if (cp == 0x00FF) return 0x0178;
  if ((cp >= 0x0100 && cp <= 0x0137) || (cp >= 0x014A && cp <= 0x0177)) {
    return (cp % 2 == 1) ? cp - 1 : cp;
  }
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 0) ? cp - 1 : cp;
  if (cp == 0x017A || cp == 0x017C || cp == 0x017E) return cp - 1;
  if (cp == 0x03C2) return 0x03A3;  // final sigma
  if (cp >= 0x03B1 && cp <= 0x03C9) return cp - 0x20;
  if (cp >= 0x0430 && cp <= 0x044F) return cp - 0x20;
  if (cp >= 0x0450 && cp <= 0x045F) return cp - 0x50;
  return cp;
}

size_t decode_utf8(std::string_view s, uint32_t* cp) {
  if (s.empty()) return 0;
  unsigned char c0 = s[0];
  size_t len;
  uint32_t value;
  if (c0 < 0x80) {
    len = 1;
    value = c0;
  } else if ((c0 & 0xE0) == 0xC0) {
    len = 2;
    value = c0 & 0x1F;
  } else if ((c0 & 0xF0) == 0xE0) {
    len = 3;
    value = c0 & 0x0F;
  } else if ((c0 & 0xF8) == 0xF0) {
    len = 4;
    value = c0 & 0x07;
  } else {
    return 0;
  }
  if (s.size() < len) return 0;
  for (size_t i = 1; i < len; ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) return 0;
    value = (value << 6) | (static_cast<unsigned char>(s[i]) & 0x3F);
  }
  *cp = value;
  return len;
}

std::string encode_utf8(uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

}  // namespace

std::string capitalize_first(std::string_view token) {
  uint32_t cp = 0;
  size_t len = decode_utf8(token, &cp);
  if (len == 0) return std::string(token);
  return encode_utf8(simple_upper(cp)) + std::string(token.substr(len));
}

MinimalSet apply_capitalization(const MinimalSet& s) {
  MinimalSet out = s;
  auto fix = [](Sentence& sent) {
    if (!sent.tokens.empty()) {
      sent.tokens.front() = capitalize_first(sent.tokens.front());
    }
  };
  fix(out.grammatical);
  for (Sentence& u : out.ungrammatical) fix(u);
  return out;
}

std::size_t write_labeled_lines(const std::vector<MinimalSet>& sets,
                                std::ostream& sink) {
  std::size_t bytes = 0;
  auto emit = [&](const Sentence& s) {
    std::string line =
        std::string(s.label ? "True" : "False") + "\t" + s.render() + "\n";
    sink.write(line.data(), static_cast<std::streamsize>(line.size()));
    bytes += line.size();
  };
  for (const MinimalSet& set : sets) {
    emit(set.grammatical);
    for (const Sentence& u : set.ungrammatical) emit(u);
  }
  if (!sink) throw GenerateError("write failure");
  return bytes;
}

std::size_t write_structured(const std::vector<MinimalSet>& sets,
                             std::ostream& sink) {
  std::size_t bytes = 0;
  for (const MinimalSet& set : sets) {
    nlohmann::ordered_json record;
    record["construction_id"] = set.construction_id;
    record["set_index"] = set.set_index;
    record["grammatical"] = set.grammatical.render();
    auto ungrammatical = nlohmann::ordered_json::array();
    for (const Sentence& u : set.ungrammatical) ungrammatical.push_back(u.render());
    record["ungrammatical"] = std::move(ungrammatical);
    record["focus_index"] = set.focus.token_index;
    record["focus_form"] = set.focus.grammatical_form.render();
    auto variants = nlohmann::ordered_json::array();
    for (const Terminal& v : set.focus.variant_forms) variants.push_back(v.render());
    record["variant_forms"] = std::move(variants);
    std::string line = record.dump() + "\n";
    sink.write(line.data(), static_cast<std::streamsize>(line.size()));
    bytes += line.size();
  }
  if (!sink) throw GenerateError("write failure");
  return bytes;
}

namespace {

std::vector<std::string> split_tokens(const std::string& rendered) {
  std::vector<std::string> tokens;
  size_t start = 0;
  while (start < rendered.size()) {
    size_t space = rendered.find(' ', start);
    if (space == std::string::npos) {
      tokens.push_back(rendered.substr(start));
      break;
    }
    tokens.push_back(rendered.substr(start, space - start));
    start = space + 1;
  }
  return tokens;
}

}  // namespace

std::vector<MinimalSet> read_structured(std::istream& source) {
  std::vector<MinimalSet> sets;
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
      MinimalSet set;
      set.construction_id = record.at("construction_id").get<std::string>();
      set.set_index = record.at("set_index").get<int>();
      set.grammatical = {split_tokens(record.at("grammatical").get<std::string>()),
                         true};
      for (const auto& u : record.at("ungrammatical")) {
        set.ungrammatical.push_back({split_tokens(u.get<std::string>()), false});
      }
      set.focus.token_index = record.at("focus_index").get<int>();
      set.focus.grammatical_form =
          Terminal{split_tokens(record.at("focus_form").get<std::string>())};
      for (const auto& v : record.at("variant_forms")) {
        set.focus.variant_forms.push_back(
            Terminal{split_tokens(v.get<std::string>())});
      }
      sets.push_back(std::move(set));
    } catch (const nlohmann::json::exception& e) {
      throw GenerateError("malformed structured record at line " +
                          std::to_string(line_no) + ": " + e.what());
    }
  }
  return sets;
}

}  // namespace avg
