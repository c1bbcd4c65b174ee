#include "avg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace avg {

double c_wals(const ComplexityProfile& profile) {
  if (profile.features.empty()) {
    throw MetricsError("empty complexity profile for " + profile.language);
  }
  double sum = 0.0;
  for (const auto& [id, value] : profile.features) {
    if (value < 0.0 || value > 1.0) {
      throw MetricsError("feature " + id + " out of [0,1] for " +
                         profile.language);
    }
    sum += value;
  }
  return sum / static_cast<double>(profile.features.size());
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw MetricsError("length mismatch");
  size_t n = x.size();
  if (n < 2) throw MetricsError("need at least two observations");
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y)) {
    throw MetricsError("constant vector has no rank correlation");
  }
  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    num += (rx[i] - mean) * (ry[i] - mean);
    dx += (rx[i] - mean) * (rx[i] - mean);
    dy += (ry[i] - mean) * (ry[i] - mean);
  }
  return num / std::sqrt(dx * dy);
}

AggregateReport aggregate_runs(const std::vector<RunResults>& runs) {
  if (runs.empty()) throw MetricsError("no runs to aggregate");
  AggregateReport report;

  std::map<std::string, std::vector<const RunResults*>> by_language;
  for (const RunResults& run : runs) by_language[run.language].push_back(&run);

  for (const auto& [language, language_runs] : by_language) {
    LanguageAggregate agg;
    agg.run_count = static_cast<int>(language_runs.size());

    const RunResults& first = *language_runs.front();
    for (const RunResults* run : language_runs) {
      if (run->results.size() != first.results.size() ||
          !std::equal(run->results.begin(), run->results.end(),
                      first.results.begin(),
                      [](const auto& a, const auto& b) {
                        return a.first == b.first;
                      })) {
        throw MetricsError("mismatched construction sets across runs for " +
                           language);
      }
    }

    for (const auto& [construction, unused] : first.results) {
      std::vector<double> values;
      for (const RunResults* run : language_runs) {
        if (auto acc = run->results.at(construction).accuracy()) {
          values.push_back(*acc);
        }
      }
      ConstructionStats stats;
      stats.samples = static_cast<int>(values.size());
      if (!values.empty()) {
        double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
        stats.mean = mean;
        if (values.size() >= 2) {
          double ss = 0.0;
          for (double v : values) ss += (v - mean) * (v - mean);
          stats.stddev =
              std::sqrt(ss / (static_cast<double>(values.size()) - 1.0));
        }
      }
      agg.constructions.emplace(construction, std::move(stats));
    }

    double sum = 0.0;
    int defined = 0;
    for (const auto& [construction, stats] : agg.constructions) {
      if (stats.mean) {
        sum += *stats.mean;
        ++defined;
      }
    }
    if (defined > 0) agg.average = sum / defined;
    report.languages.emplace(language, std::move(agg));
  }
  return report;
}

namespace {

std::string cell(const std::optional<double>& value) {
  if (!value) return "-";
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << *value;
  return out.str();
}

}  // namespace

std::string render_report(const AggregateReport& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::records) {
    for (const auto& [language, agg] : report.languages) {
      for (const auto& [construction, stats] : agg.constructions) {
        nlohmann::ordered_json record;
        record["kind"] = "construction";
        record["language"] = language;
        record["construction_id"] = construction;
        record["samples"] = stats.samples;
        record["mean"] = stats.mean ? nlohmann::json(*stats.mean)
                                    : nlohmann::json(nullptr);
        record["std"] = stats.stddev ? nlohmann::json(*stats.stddev)
                                     : nlohmann::json(nullptr);
        out << record.dump() << '\n';
      }
      nlohmann::ordered_json record;
      record["kind"] = "language";
      record["language"] = language;
      record["runs"] = agg.run_count;
      record["average"] = agg.average ? nlohmann::json(*agg.average)
                                      : nlohmann::json(nullptr);
      out << record.dump() << '\n';
    }
    return out.str();
  }

  for (const auto& [language, agg] : report.languages) {
    out << "Language: " << (language.empty() ? "(unspecified)" : language)
        << "  (runs: " << agg.run_count << ")\n";
    size_t width = 12;
    for (const auto& [construction, stats] : agg.constructions) {
      width = std::max(width, construction.size());
    }
    out << std::left << std::setw(static_cast<int>(width + 2)) << "construction"
        << std::right << std::setw(8) << "mean" << std::setw(8) << "std"
        << '\n';
    for (const auto& [construction, stats] : agg.constructions) {
      out << std::left << std::setw(static_cast<int>(width + 2)) << construction
          << std::right << std::setw(8) << cell(stats.mean) << std::setw(8)
          << cell(stats.stddev) << '\n';
    }
    out << std::left << std::setw(static_cast<int>(width + 2)) << "average"
        << std::right << std::setw(8) << cell(agg.average) << '\n'
        << '\n';
  }
  return out.str();
}

AggregateReport read_report_records(std::istream& source) {
  AggregateReport report;
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json record = nlohmann::json::parse(line);
      const std::string language = record.at("language").get<std::string>();
      LanguageAggregate& agg = report.languages[language];
      if (record.at("kind") == "language") {
        agg.run_count = record.at("runs").get<int>();
        if (!record.at("average").is_null()) {
          agg.average = record.at("average").get<double>();
        }
      } else {
        ConstructionStats stats;
        stats.samples = record.at("samples").get<int>();
        if (!record.at("mean").is_null()) {
          stats.mean = record.at("mean").get<double>();
        }
        if (!record.at("std").is_null()) {
          stats.stddev = record.at("std").get<double>();
        }
        agg.constructions[record.at("construction_id").get<std::string>()] =
            stats;
      }
    } catch (const nlohmann::json::exception& e) {
      throw MetricsError("malformed report record at line " +
                         std::to_string(line_no) + ": " + e.what());
    }
  }
  return report;
}

std::size_t write_eval_records(const RunResults& run, std::ostream& sink) {
  std::size_t bytes = 0;
  for (const auto& [construction, result] : run.results) {
    nlohmann::ordered_json record;
    record["language"] = run.language;
    record["run_id"] = run.run_id;
    record["construction_id"] = construction;
    record["evaluated"] = result.evaluated;
    record["correct"] = result.correct;
    record["skipped"] = result.skipped;
    std::string line = record.dump() + "\n";
    sink << line;
    bytes += line.size();
  }
  if (!sink) throw MetricsError("write failure");
  return bytes;
}

void read_eval_records(std::istream& source, std::vector<RunResults>* into) {
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json record = nlohmann::json::parse(line);
      std::string language = record.at("language").get<std::string>();
      std::string run_id = record.at("run_id").get<std::string>();
      auto it = std::find_if(into->begin(), into->end(),
                             [&](const RunResults& r) {
                               return r.language == language &&
                                      r.run_id == run_id;
                             });
      if (it == into->end()) {
        into->push_back({run_id, language, {}});
        it = std::prev(into->end());
      }
      EvalResult result;
      result.construction_id =
          record.at("construction_id").get<std::string>();
      result.evaluated = record.at("evaluated").get<long long>();
      result.correct = record.at("correct").get<long long>();
      result.skipped = record.at("skipped").get<long long>();
      it->results[result.construction_id] = result;
    } catch (const nlohmann::json::exception& e) {
      throw MetricsError("malformed eval record at line " +
                         std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::map<std::string, ComplexityProfile> read_wals_file(std::istream& source) {
  std::map<std::string, ComplexityProfile> profiles;
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string language, feature_id, value_text;
    if (!std::getline(fields, language, '\t') ||
        !std::getline(fields, feature_id, '\t') ||
        !std::getline(fields, value_text)) {
      throw MetricsError("malformed WALS record at line " +
                         std::to_string(line_no));
    }
    double value = 0.0;
    try {
      size_t consumed = 0;
      value = std::stod(value_text, &consumed);
      if (consumed != value_text.size()) throw std::invalid_argument(value_text);
    } catch (const std::exception&) {
      throw MetricsError("malformed WALS value at line " +
                         std::to_string(line_no));
    }
    ComplexityProfile& profile = profiles[language];
    profile.language = language;
    profile.features.emplace_back(feature_id, value);
  }
  return profiles;
}

}  // namespace avg
