#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spfim/config.hpp"
#include "spfim/estimator.hpp"
#include "spfim/matrix.hpp"

namespace spfim {

// Variance of one diagonal entry of -H (1-based `entry`) under one method.
struct VarianceRow {
  std::size_t n = 0;
  std::size_t entry = 0;
  Method method = Method::Standard;
  double variance = 0.0;
  double std_error = 0.0;
  // independent variance / standard variance for this (n, entry).
  double ratio = 0.0;

  friend bool operator==(const VarianceRow&, const VarianceRow&) = default;
};

// Least-squares slope of log(ratio) against log(n) for one entry.
struct SlopeRow {
  std::size_t entry = 0;
  double slope = 0.0;

  friend bool operator==(const SlopeRow&, const SlopeRow&) = default;
};

struct TimingRow {
  std::size_t n = 0;
  Method method = Method::Standard;
  double seconds = 0.0;
  std::size_t replicates = 0;

  friend bool operator==(const TimingRow&, const TimingRow&) = default;
};

struct AccuracyRow {
  Method method = Method::Standard;
  double mean_error = 0.0;
  double seconds = 0.0;
  std::vector<double> errors;
  // Estimate whose error ranks `typical_rank` (1-based) in descending order.
  SymmetricMatrix typical;
  std::size_t typical_rank = 0;

  friend bool operator==(const AccuracyRow&, const AccuracyRow&) = default;
};

struct TradeoffRow {
  std::size_t M = 0;
  std::size_t N = 0;
  Method method = Method::Standard;
  std::size_t entry = 0;
  double variance = 0.0;
  double std_error = 0.0;

  friend bool operator==(const TradeoffRow&, const TradeoffRow&) = default;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::VarianceRatio;
  std::uint64_t seed = 0;
  std::string timestamp;
  std::map<std::string, std::string> config;
  std::vector<std::string> parameter_names;
  std::vector<std::string> warnings;

  std::vector<VarianceRow> variance;
  std::vector<SlopeRow> slopes;
  std::vector<TimingRow> timing;
  std::optional<SymmetricMatrix> truth;
  std::vector<AccuracyRow> accuracy;
  std::vector<TradeoffRow> tradeoff;

  // Wall time of a method at n, or 0 when absent.
  double seconds(std::size_t n, Method m) const;
  // standard seconds / independent seconds (the orientation of the
  // published timing table).
  double time_ratio_standard_over_independent(std::size_t n) const;
  // Mean error ratio independent / standard (accuracy experiments).
  double error_ratio_independent_over_standard() const;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

// Ratio with the zero-variance convention: 1 when both are zero.
double variance_ratio(double independent, double standard);

// Reference curves plotted next to the ratio-vs-n series.
inline constexpr double kReferenceLow = 3.5;
inline constexpr double kReferenceHigh = 13.0;

std::string to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

// Primary CSV table for the report kind (see README for the column layout).
std::string to_csv(const ExperimentReport& report);
// Ratio-vs-n series with the reference curves (variance ratio reports).
std::string curves_csv(const ExperimentReport& report);

// Parses the primary table of a CSV written by to_csv back into the rows it
// carries (variance, timing, accuracy summary or trade-off rows).
ExperimentReport report_from_csv(ExperimentKind kind, const std::string& text);

// Writes the report to `path` plus any auxiliary tables next to it.
// Returns the list of files written.
std::vector<std::string> write_report(const ExperimentReport& report, const std::string& path,
                                      OutputFormat format);

// Human-readable summary table.
std::string format_summary(const ExperimentReport& report);

}  // namespace spfim
