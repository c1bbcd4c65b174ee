#pragma once

// Aggregation across runs and languages: mean/standard deviation of
// accuracies, the morphological-complexity mean over normalized WALS
// feature values, and Spearman rank correlation.

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avg/scoring.hpp"

namespace avg {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunResults {
  std::string run_id;  // seed label
  std::string language;
  std::map<std::string, EvalResult> results;  // construction_id -> result

  bool operator==(const RunResults&) const = default;
};

struct ConstructionStats {
  int samples = 0;  // runs with a defined accuracy
  std::optional<double> mean;
  std::optional<double> stddev;  // sample (n-1) std; absent below 2 samples

  bool operator==(const ConstructionStats&) const = default;
};

struct LanguageAggregate {
  int run_count = 0;
  std::map<std::string, ConstructionStats> constructions;
  std::optional<double> average;  // unweighted mean over construction means

  bool operator==(const LanguageAggregate&) const = default;
};

struct AggregateReport {
  std::map<std::string, LanguageAggregate> languages;

  bool operator==(const AggregateReport&) const = default;
};

struct ComplexityProfile {
  std::string language;
  std::vector<std::pair<std::string, double>> features;  // value in [0,1]
};

// Mean of the normalized feature values.
double c_wals(const ComplexityProfile& profile);

// Pearson correlation of average ranks; ties share the mean rank.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Pre: every run of a language covers the same construction set.
AggregateReport aggregate_runs(const std::vector<RunResults>& runs);

enum class ReportFormat { table, records };

std::string render_report(const AggregateReport& report, ReportFormat format);
AggregateReport read_report_records(std::istream& source);

// Eval record lines carry language and run id so reports can regroup them.
std::size_t write_eval_records(const RunResults& run, std::ostream& sink);
void read_eval_records(std::istream& source, std::vector<RunResults>* into);

// WALS feature file: `language<TAB>feature_id<TAB>value` per line.
std::map<std::string, ComplexityProfile> read_wals_file(std::istream& source);

}  // namespace avg
