#pragma once

#include <cstddef>
#include <span>

#include "spfim/config.hpp"
#include "spfim/report.hpp"

namespace spfim {

// Per-diagonal-entry variance of -H at M = N = 1 for both methods, for each
// configured n; adds the log-log slope per entry when several n are given.
ExperimentReport run_variance_ratio(const ExperimentConfig& config);

// Same sweep as run_variance_ratio, reported as wall times per method and n.
ExperimentReport run_timing(const ExperimentConfig& config);

// Relative spectral error of estimate_fim against the Monte Carlo truth,
// over `replicates` independent estimates per method.
ExperimentReport run_accuracy(const ExperimentConfig& config);

// Variance of the diagonal of F_{M,N} for every divisor pair M * N = budget.
ExperimentReport run_mn_tradeoff(const ExperimentConfig& config);

ExperimentReport run_experiment(const ExperimentConfig& config);

// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace spfim
