#include "avg/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace avg {

namespace {

double lookup_full(const ScoreTable& scores, const std::string& sentence) {
  auto it = scores.full.find(sentence);
  if (it == scores.full.end()) {
    throw EvalError("no score for sentence: " + sentence);
  }
  return it->second;
}

std::string result_id(const std::vector<MinimalSet>& sets) {
  return sets.empty() ? std::string() : sets.front().construction_id;
}

}  // namespace

Vocabulary Vocabulary::read(std::istream& source) {
  Vocabulary vocab;
  std::string line;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) vocab.tokens.insert(line);
  }
  return vocab;
}

EvalResult evaluate_full(const std::vector<MinimalSet>& sets,
                         const ScoreTable& scores) {
  if (scores.mode != ScoreMode::full_sentence) {
    throw EvalError("evaluate_full requires a full-sentence score table");
  }
  EvalResult result;
  result.construction_id = result_id(sets);
  for (const MinimalSet& set : sets) {
    if (set.ungrammatical.empty()) continue;
    double gram = lookup_full(scores, set.grammatical.render());
    bool win = true;
    for (const Sentence& u : set.ungrammatical) {
      if (!(gram > lookup_full(scores, u.render()))) win = false;
    }
    ++result.evaluated;
    if (win) ++result.correct;
  }
  return result;
}

EvalResult evaluate_masked(const std::vector<MinimalSet>& sets,
                           const ScoreTable& scores, const Vocabulary& vocab) {
  if (scores.mode != ScoreMode::masked_focus) {
    throw EvalError("evaluate_masked requires a masked-focus score table");
  }
  EvalResult result;
  result.construction_id = result_id(sets);
  for (const MinimalSet& set : sets) {
    if (set.ungrammatical.empty()) continue;
    if (set.focus.grammatical_form.tokens.size() != 1) {
      throw EvalError("multi-token focus form in set " +
                      std::to_string(set.set_index) + " of " +
                      set.construction_id);
    }
    for (const Terminal& v : set.focus.variant_forms) {
      if (v.tokens.size() != 1) {
        throw EvalError("multi-token focus form in set " +
                        std::to_string(set.set_index) + " of " +
                        set.construction_id);
      }
    }
    bool oov = !vocab.contains(set.focus.grammatical_form.tokens.front());
    for (const Terminal& v : set.focus.variant_forms) {
      if (!vocab.contains(v.tokens.front())) oov = true;
    }
    if (oov) {
      ++result.skipped;
      continue;
    }
    auto lookup = [&](const Terminal& form) {
      MaskedKey key{set.construction_id, set.set_index, form.render()};
      auto it = scores.masked.find(key);
      if (it == scores.masked.end()) {
        throw EvalError("no score for candidate '" + form.render() +
                        "' in set " + std::to_string(set.set_index) + " of " +
                        set.construction_id);
      }
      return it->second;
    };
    double gram = lookup(set.focus.grammatical_form);
    bool win = true;
    for (const Terminal& v : set.focus.variant_forms) {
      if (!(gram > lookup(v))) win = false;
    }
    ++result.evaluated;
    if (win) ++result.correct;
  }
  return result;
}

std::string BigramModel::map_token(const std::string& token) const {
  if (token == kStart || token == kEnd) return token;
  return vocab_.count(token) ? token : kUnknown;
}

BigramModel BigramModel::train(
    const std::vector<std::vector<std::string>>& corpus, double k,
    std::size_t vocab_limit) {
  if (corpus.empty()) throw EvalError("empty training corpus");
  if (!(k > 0)) throw EvalError("smoothing constant must be positive");
  if (vocab_limit == 0) throw EvalError("vocabulary size limit must be positive");

  std::map<std::string, long long> freq;
  for (const auto& sentence : corpus) {
    for (const std::string& token : sentence) ++freq[token];
  }
  std::vector<std::pair<std::string, long long>> by_freq(freq.begin(),
                                                         freq.end());
  std::stable_sort(by_freq.begin(), by_freq.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });

  BigramModel model;
  model.k_ = k;
  for (size_t i = 0; i < by_freq.size() && i < vocab_limit; ++i) {
    model.vocab_.insert(by_freq[i].first);
  }

  for (const auto& sentence : corpus) {
    std::string history = kStart;
    for (const std::string& token : sentence) {
      std::string mapped = model.map_token(token);
      ++model.bigrams_[history][mapped];
      ++model.history_totals_[history];
      history = std::move(mapped);
    }
    ++model.bigrams_[history][kEnd];
    ++model.history_totals_[history];
  }
  return model;
}

double BigramModel::cond_prob(const std::string& history,
                              const std::string& word) const {
  // Event space: vocabulary, the unknown class, and the end marker.
  double events = static_cast<double>(vocab_.size()) + 2.0;
  std::string h = map_token(history);
  std::string w = map_token(word);
  long long joint = 0, total = 0;
  if (auto hit = bigrams_.find(h); hit != bigrams_.end()) {
    if (auto wit = hit->second.find(w); wit != hit->second.end()) {
      joint = wit->second;
    }
  }
  if (auto tit = history_totals_.find(h); tit != history_totals_.end()) {
    total = tit->second;
  }
  return (static_cast<double>(joint) + k_) /
         (static_cast<double>(total) + k_ * events);
}

double BigramModel::score_sentence(
    const std::vector<std::string>& tokens) const {
  double score = 0.0;
  std::string history = kStart;
  for (const std::string& token : tokens) {
    score += std::log(cond_prob(history, token));
    history = token;
  }
  score += std::log(cond_prob(history, kEnd));
  return score;
}

std::vector<std::string> BigramModel::observed_histories() const {
  std::vector<std::string> out;
  for (const auto& [history, total] : history_totals_) out.push_back(history);
  return out;
}

std::vector<std::string> BigramModel::event_space() const {
  std::vector<std::string> out(vocab_.begin(), vocab_.end());
  out.push_back(kUnknown);
  out.push_back(kEnd);
  return out;
}

ScoreTable make_reference_scorer(const std::vector<MinimalSet>& sets,
                                 ScorerKind kind, ScoreMode mode,
                                 std::uint64_t seed) {
  ScoreTable table;
  table.mode = mode;
  std::mt19937_64 rng(seed);
  // Raw-bits mapping keeps the draw sequence identical across platforms.
  auto next_double = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  auto assign = [&](const MinimalSet& set, const std::string& sentence,
                    const std::string& form, bool grammatical) {
    double score = 0.0;
    switch (kind) {
      case ScorerKind::oracle:
        score = grammatical ? 1.0 : 0.0;
        break;
      case ScorerKind::adversary:
        score = grammatical ? 0.0 : 1.0;
        break;
      case ScorerKind::constant:
        score = 0.0;
        break;
      case ScorerKind::seeded_random:
        score = next_double();
        break;
    }
    if (mode == ScoreMode::full_sentence) {
      // Grammatical readings win key conflicts for the oracle and lose them
      // for the adversary; random keeps the first draw.
      auto [it, inserted] = table.full.emplace(sentence, score);
      if (!inserted && kind == ScorerKind::oracle && grammatical) {
        it->second = 1.0;
      }
      if (!inserted && kind == ScorerKind::adversary && !grammatical) {
        it->second = 1.0;
      }
    } else {
      table.masked.emplace(MaskedKey{set.construction_id, set.set_index, form},
                           score);
    }
  };

  for (const MinimalSet& set : sets) {
    assign(set, set.grammatical.render(), set.focus.grammatical_form.render(),
           true);
    for (size_t i = 0; i < set.ungrammatical.size(); ++i) {
      assign(set, set.ungrammatical[i].render(),
             i < set.focus.variant_forms.size()
                 ? set.focus.variant_forms[i].render()
                 : std::string(),
             false);
    }
  }
  return table;
}

ScoreTable score_with_bigram(const std::vector<MinimalSet>& sets,
                             const BigramModel& model, ScoreMode mode) {
  ScoreTable table;
  table.mode = mode;
  for (const MinimalSet& set : sets) {
    if (mode == ScoreMode::full_sentence) {
      table.full.emplace(set.grammatical.render(),
                         model.score_sentence(set.grammatical.tokens));
      for (const Sentence& u : set.ungrammatical) {
        table.full.emplace(u.render(), model.score_sentence(u.tokens));
      }
    } else {
      // Candidate score = sentence score with the candidate at the focus span.
      auto splice = [&](const Terminal& form) {
        std::vector<std::string> tokens(
            set.grammatical.tokens.begin(),
            set.grammatical.tokens.begin() + set.focus.token_index);
        tokens.insert(tokens.end(), form.tokens.begin(), form.tokens.end());
        size_t tail = set.focus.token_index +
                      set.focus.grammatical_form.tokens.size();
        tokens.insert(tokens.end(), set.grammatical.tokens.begin() + tail,
                      set.grammatical.tokens.end());
        return tokens;
      };
      auto add = [&](const Terminal& form) {
        table.masked.emplace(
            MaskedKey{set.construction_id, set.set_index, form.render()},
            model.score_sentence(splice(form)));
      };
      add(set.focus.grammatical_form);
      for (const Terminal& v : set.focus.variant_forms) add(v);
    }
  }
  return table;
}

namespace {

double parse_score(const std::string& text, int line_no) {
  size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw EvalError("malformed score at line " + std::to_string(line_no) +
                    ": '" + text + "'");
  }
  if (consumed != text.size() || !std::isfinite(value)) {
    throw EvalError("malformed score at line " + std::to_string(line_no) +
                    ": '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

ScoreTable load_scores(std::istream& source, ScoreMode mode) {
  ScoreTable table;
  table.mode = mode;
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_tabs(line);
    if (mode == ScoreMode::full_sentence) {
      if (fields.size() != 2) {
        throw EvalError("malformed score line " + std::to_string(line_no));
      }
      double score = parse_score(fields[1], line_no);
      if (!table.full.insert_or_assign(fields[0], score).second) {
        ++table.duplicate_warnings;
      }
    } else {
      if (fields.size() != 4) {
        throw EvalError("malformed score line " + std::to_string(line_no));
      }
      int set_index = 0;
      try {
        set_index = std::stoi(fields[1]);
      } catch (const std::exception&) {
        throw EvalError("malformed set index at line " +
                        std::to_string(line_no));
      }
      double score = parse_score(fields[3], line_no);
      MaskedKey key{fields[0], set_index, fields[2]};
      if (!table.masked.insert_or_assign(key, score).second) {
        ++table.duplicate_warnings;
      }
    }
  }
  return table;
}

std::size_t write_scores(const ScoreTable& table, std::ostream& sink) {
  std::size_t bytes = 0;
  std::ostringstream out;
  out.precision(17);
  if (table.mode == ScoreMode::full_sentence) {
    for (const auto& [sentence, score] : table.full) {
      out.str("");
      out << sentence << '\t' << score << '\n';
      sink << out.str();
      bytes += out.str().size();
    }
  } else {
    for (const auto& [key, score] : table.masked) {
      out.str("");
      out << key.construction_id << '\t' << key.set_index << '\t'
          << key.candidate << '\t' << score << '\n';
      sink << out.str();
      bytes += out.str().size();
    }
  }
  if (!sink) throw EvalError("write failure");
  return bytes;
}

}  // namespace avg
