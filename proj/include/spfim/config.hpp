#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "spfim/estimator.hpp"
#include "spfim/models.hpp"

namespace spfim {

enum class ExperimentKind { VarianceRatio, Timing, Accuracy, MNTradeoff };
enum class OutputFormat { Csv, Json };

std::string experiment_kind_name(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

struct ModelSpec {
  // spn | mixture | quadratic | gaussian
  std::string kind = "spn";
  std::vector<double> mu{0.0, 0.0, 0.0};
  // Packed upper triangle of Sigma.
  std::vector<double> sigma{2.0, 0.5, 0.5, 2.0, 0.5, 2.0};
  std::uint64_t noise_seed = 1;
  std::vector<double> mixture_theta{0.2, 0.0, 4.0, 1.0, 9.0};
  // Packed upper triangle of A.
  std::vector<double> quadratic_a{2.0, 0.0, 3.0};
  double gaussian_mean = 0.0;
  double gaussian_variance = 1.0;
  bool gaussian_known_variance = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::VarianceRatio;
  ModelSpec model;
  std::vector<std::size_t> n_values{30};
  std::size_t replicates = 100000;
  std::vector<Method> methods{Method::Standard, Method::IndependentPerturbation};
  // method and seed are overridden per run; M, N, c and the perturbation apply.
  EstimatorConfig estimator;
  // Fixed Hessian-estimate budget C = M * N for the M/N trade-off study.
  std::size_t budget = 16;
  std::size_t oracle_replicates = 1000000;
  std::uint64_t oracle_seed = 0;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string output;
  OutputFormat format = OutputFormat::Csv;

  // Throws ConfigError naming the offending field.
  void validate() const;
  // Flat "section.key" -> value view used for the report echo.
  std::map<std::string, std::string> echo() const;
};

// Parses the INI-style experiment file. Throws ConfigError with a
// field-level message on any problem (including a missing file).
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

std::shared_ptr<const Model> build_model(const ModelSpec& spec, std::size_t n);

}  // namespace spfim
