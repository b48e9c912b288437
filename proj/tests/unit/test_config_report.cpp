#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "spfim/config.hpp"
#include "spfim/errors.hpp"
#include "spfim/report.hpp"

namespace spfim {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void expect_config_error(const std::string& text, const std::string& field) {
  try {
    parse_config(text);
    FAIL() << "expected a ConfigError mentioning " << field;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
  }
}

TEST(Config, Defaults) {
  const auto cfg = parse_config("[experiment]\nkind = variance_ratio\n");
  EXPECT_EQ(cfg.kind, ExperimentKind::VarianceRatio);
  EXPECT_EQ(cfg.replicates, 100000u);
  EXPECT_EQ(cfg.n_values, std::vector<std::size_t>{30});
  EXPECT_EQ(cfg.model.kind, "spn");
  EXPECT_EQ(cfg.methods.size(), 2u);
  EXPECT_EQ(cfg.estimator.c, 1e-4);
  EXPECT_EQ(cfg.estimator.perturbation, PerturbationSpec::bernoulli());
  EXPECT_EQ(cfg.format, OutputFormat::Csv);

  const auto acc = parse_config("[experiment]\nkind = accuracy\n");
  EXPECT_EQ(acc.replicates, 50u);
  EXPECT_EQ(acc.model.kind, "mixture");
  EXPECT_EQ(acc.estimator.M, 2u);
  EXPECT_EQ(acc.estimator.N, 4000u);
  EXPECT_EQ(acc.oracle_replicates, 1000000u);
}

TEST(Config, FullFile) {
  const auto cfg = parse_config(R"(
# comment
[experiment]
kind = mn_tradeoff
seed = 99
workers = 3
replicates = 500
n = 10, 20
output = out/run.json
format = json
budget = 12

[model]
kind = spn
mu = 1, 2, 3
sigma = 2, 0.5, 0.5, 2, 0.5, 2
noise_seed = 4

[estimator]
method = independent
M = 2
N = 3
c = 0.001
perturbation = segmented_uniform
perturbation_a = 0.25
perturbation_b = 1.75

[oracle]
replicates = 1000
seed = 5
)");
  EXPECT_EQ(cfg.kind, ExperimentKind::MNTradeoff);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.workers, 3u);
  EXPECT_EQ(cfg.replicates, 500u);
  EXPECT_EQ(cfg.n_values, (std::vector<std::size_t>{10, 20}));
  EXPECT_EQ(cfg.output, "out/run.json");
  EXPECT_EQ(cfg.format, OutputFormat::Json);
  EXPECT_EQ(cfg.budget, 12u);
  EXPECT_EQ(cfg.model.mu, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(cfg.model.noise_seed, 4u);
  EXPECT_EQ(cfg.methods, std::vector<Method>{Method::IndependentPerturbation});
  EXPECT_EQ(cfg.estimator.M, 2u);
  EXPECT_EQ(cfg.estimator.N, 3u);
  EXPECT_EQ(cfg.estimator.c, 0.001);
  EXPECT_EQ(cfg.estimator.perturbation, PerturbationSpec::segmented_uniform(0.25, 1.75));
  EXPECT_EQ(cfg.oracle_replicates, 1000u);
  EXPECT_EQ(cfg.oracle_seed, 5u);
}

TEST(Config, OracleSeedDefaultsToExperimentSeed) {
  const auto cfg = parse_config("[experiment]\nkind = accuracy\nseed = 17\n");
  EXPECT_EQ(cfg.oracle_seed, 17u);
}

TEST(Config, FieldLevelErrors) {
  expect_config_error("[experiment]\nseed = 1\n", "experiment.kind");
  expect_config_error("[experiment]\nkind = bogus\n", "experiment.kind");
  expect_config_error("[experiment]\nkind = timing\nreplicates = 1\n", "experiment.replicates");
  expect_config_error("[experiment]\nkind = timing\nreplicates = many\n", "experiment.replicates");
  expect_config_error("[experiment]\nkind = timing\nn = 30, 0\n", "experiment.n");
  expect_config_error("[experiment]\nkind = timing\ncolour = red\n", "experiment.colour");
  expect_config_error("[experiment]\nkind = timing\n[extra]\nx = 1\n", "[extra]");
  expect_config_error("[experiment]\nkind = timing\n[estimator]\nc = -1\n", "estimator.c");
  expect_config_error("[experiment]\nkind = timing\n[estimator]\nM = 0\n", "estimator.M");
  expect_config_error("[experiment]\nkind = timing\n[estimator]\nmethod = fast\n",
                      "estimator.method");
  expect_config_error(
      "[experiment]\nkind = timing\n[estimator]\nperturbation = segmented_uniform\n"
      "perturbation_a = 0\n",
      "estimator.perturbation_a");
  expect_config_error("[experiment]\nkind = timing\n[model]\nkind = cubic\n", "model.kind");
  expect_config_error("[experiment]\nkind = timing\n[model]\nsigma = 1, 2\n", "model.sigma");
  expect_config_error("[experiment]\nkind = timing\n[model]\nkind = mixture\ntheta = 1, 0, 4, 1, 9\n",
                      "model");
  expect_config_error("[experiment]\nkind = timing\nformat = xml\n", "experiment.format");
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/missing.toml"), ConfigError);
}

TEST(Config, ExampleConfigsLoad) {
  for (const char* name : {"variance_ratio.ini", "timing.ini", "accuracy.ini", "mn_tradeoff.ini"}) {
    const std::string path = std::string(SPFIM_SOURCE_DIR) + "/configs/" + name;
    EXPECT_NO_THROW(load_config(path)) << path;
  }
}

TEST(Config, BuildModel) {
  ModelSpec spec;
  EXPECT_EQ(build_model(spec, 30)->parameter_dim(), 9u);
  spec.kind = "mixture";
  EXPECT_EQ(build_model(spec, 30)->parameter_dim(), 5u);
  spec.kind = "quadratic";
  EXPECT_EQ(build_model(spec, 1)->parameter_dim(), 2u);
  spec.kind = "gaussian";
  spec.gaussian_known_variance = true;
  EXPECT_EQ(build_model(spec, 5)->parameter_dim(), 1u);
  spec.kind = "other";
  EXPECT_THROW(build_model(spec, 5), ConfigError);
}

ExperimentReport sample_report(ExperimentKind kind) {
  ExperimentReport r;
  r.kind = kind;
  r.seed = 42;
  r.timestamp = "2026-01-01T00:00:00Z";
  r.config = {{"experiment.kind", experiment_kind_name(kind)}, {"model.kind", "spn"}};
  r.parameter_names = {"mu1", "mu2"};
  r.warnings = {"something to note"};
  r.variance = {{30, 1, Method::Standard, 8.25, 0.1, 0.125},
                {30, 1, Method::IndependentPerturbation, 1.03125, 0.01, 0.125},
                {30, 2, Method::Standard, 0.0, 0.0, 1.0},
                {30, 2, Method::IndependentPerturbation, 0.0, 0.0, 1.0}};
  r.slopes = {{1, -0.9876543210123}};
  r.timing = {{30, Method::Standard, 0.5, 1000}, {30, Method::IndependentPerturbation, 0.8, 1000}};
  r.truth = SymmetricMatrix::from_packed(std::vector<double>{1.0, 0.1, 2.0}, 2);
  AccuracyRow a;
  a.method = Method::Standard;
  a.mean_error = 0.0033;
  a.seconds = 1.25;
  a.errors = {0.003, 0.0036, std::numeric_limits<double>::infinity()};
  a.typical = SymmetricMatrix::from_packed(std::vector<double>{1.01, 0.11, 1.99}, 2);
  a.typical_rank = 2;
  r.accuracy = {a};
  a.method = Method::IndependentPerturbation;
  a.mean_error = 0.00063;
  r.accuracy.push_back(a);
  r.tradeoff = {{1, 16, Method::Standard, 1, 0.1 / 3.0, 1e-3},
                {16, 1, Method::Standard, 1, 0.2, 2e-3}};
  return r;
}

TEST(Report, VarianceRatioConvention) {
  EXPECT_EQ(variance_ratio(0.0, 0.0), 1.0);
  EXPECT_EQ(variance_ratio(1.0, 4.0), 0.25);
  EXPECT_TRUE(std::isinf(variance_ratio(1.0, 0.0)));
}

TEST(Report, JsonRoundTripIsExact) {
  const auto r = sample_report(ExperimentKind::Accuracy);
  EXPECT_EQ(report_from_json(to_json(r)), r);
}

TEST(Report, CsvHeaders) {
  const std::vector<std::pair<ExperimentKind, std::string>> headers{
      {ExperimentKind::VarianceRatio, "entry,method,variance,ratio,n,seed"},
      {ExperimentKind::Timing, "n,method,seconds,replicates,time_ratio_standard_over_independent,seed"},
      {ExperimentKind::Accuracy,
       "method,mean_relative_error,error_ratio_independent_over_standard,seconds,typical_rank,seed"},
      {ExperimentKind::MNTradeoff, "M,N,method,entry,variance,std_error,seed"}};
  for (const auto& [kind, header] : headers) {
    const std::string csv = to_csv(sample_report(kind));
    std::istringstream in(csv);
    std::string meta, first;
    std::getline(in, meta);
    std::getline(in, first);
    EXPECT_EQ(meta.rfind("# spfim ", 0), 0u);
    EXPECT_EQ(first, header);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
  }
}

TEST(Report, CsvRoundTripReproducesTableColumns) {
  for (auto kind : {ExperimentKind::VarianceRatio, ExperimentKind::Timing,
                    ExperimentKind::Accuracy, ExperimentKind::MNTradeoff}) {
    const auto r = sample_report(kind);
    const auto back = report_from_csv(kind, to_csv(r));
    EXPECT_EQ(back.seed, r.seed);
    EXPECT_EQ(back.timestamp, r.timestamp);
    // Re-emitting the parsed table gives the same bytes.
    ExperimentReport again = back;
    EXPECT_EQ(to_csv(again), to_csv(r)) << experiment_kind_name(kind);
    switch (kind) {
      case ExperimentKind::VarianceRatio:
        ASSERT_EQ(back.variance.size(), r.variance.size());
        for (std::size_t i = 0; i < r.variance.size(); ++i) {
          EXPECT_EQ(back.variance[i].variance, r.variance[i].variance);
          EXPECT_EQ(back.variance[i].ratio, r.variance[i].ratio);
        }
        break;
      case ExperimentKind::Timing: EXPECT_EQ(back.timing, r.timing); break;
      case ExperimentKind::MNTradeoff: EXPECT_EQ(back.tradeoff, r.tradeoff); break;
      case ExperimentKind::Accuracy:
        ASSERT_EQ(back.accuracy.size(), 2u);
        EXPECT_EQ(back.accuracy[1].mean_error, 0.00063);
        break;
    }
  }
}

TEST(Report, CurvesCarryReferenceLines) {
  const std::string csv = curves_csv(sample_report(ExperimentKind::VarianceRatio));
  EXPECT_NE(csv.find("n,entry,ratio,reference_3.5_over_n,reference_13_over_n\n"), std::string::npos);
  EXPECT_NE(csv.find("30,1,0.125,"), std::string::npos);
}

TEST(Report, WriteReportFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "spfim_report_test";
  std::filesystem::remove_all(dir);
  const auto r = sample_report(ExperimentKind::Accuracy);
  const auto files = write_report(r, (dir / "acc.csv").string(), OutputFormat::Csv);
  EXPECT_EQ(files.size(), 3u);
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f)) << f;
  EXPECT_NE(read_file((dir / "acc_matrices.csv").string()).find("truth,1,2,0.1"), std::string::npos);

  const auto json_files = write_report(r, (dir / "acc.json").string(), OutputFormat::Json);
  ASSERT_EQ(json_files.size(), 1u);
  EXPECT_EQ(report_from_json(read_file(json_files[0])), r);
  std::filesystem::remove_all(dir);
}

TEST(Report, SummaryMentionsWarnings) {
  const auto text = format_summary(sample_report(ExperimentKind::VarianceRatio));
  EXPECT_NE(text.find("warning: something to note"), std::string::npos);
  EXPECT_NE(text.find("mu1"), std::string::npos);
}

}  // namespace
}  // namespace spfim
