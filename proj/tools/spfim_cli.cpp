// spfim: runs one configured experiment and writes its report.
//
//   spfim --config experiments/variance_ratio.ini [--seed S] [--workers W]
//         [--out PATH] [--format csv|json]
//
// Exit status: 0 on success, 2 for a bad command line or configuration,
// 1 for a failure while running or writing the report.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spfim/spfim.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct ExperimentHandle {
  spfim_experiment* ptr = nullptr;
  ~ExperimentHandle() { spfim_experiment_free(ptr); }
};

struct ReportHandle {
  spfim_report* ptr = nullptr;
  ~ReportHandle() { spfim_report_free(ptr); }
};

std::string output_path(const std::optional<std::string>& cli_out, const char* config_out,
                        const std::string& config_path, spfim_format format) {
  const std::string ext = format == SPFIM_FORMAT_JSON ? ".json" : ".csv";
  std::filesystem::path path;
  if (cli_out) {
    path = *cli_out;
  } else if (config_out != nullptr) {
    path = config_out;
  } else {
    const char* dir = std::getenv("SPFIM_OUT_DIR");
    path = std::filesystem::path(dir ? dir : ".") / std::filesystem::path(config_path).stem();
  }
  if (path.extension() != ext) path += ext;
  return path.string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo Fisher information experiments (simultaneous perturbation)"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::optional<std::string> format_name;
  app.add_option("--config", config_path, "Experiment configuration file")->required();
  app.add_option("--seed", seed, "Override the experiment seed");
  app.add_option("--workers", workers, "Worker threads (0 = default; env SPFIM_WORKERS)");
  app.add_option("--out", out, "Report path (env SPFIM_OUT_DIR sets the default directory)");
  app.add_option("--format", format_name, "Report format")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  ExperimentHandle experiment;
  if (spfim_experiment_load(config_path.c_str(), &experiment.ptr) != SPFIM_OK) {
    std::cerr << "spfim: " << spfim_last_error() << "\n";
    return kExitConfig;
  }
  if (seed) spfim_experiment_set_seed(experiment.ptr, *seed);
  if (workers) spfim_experiment_set_workers(experiment.ptr, *workers);

  const char* config_out = nullptr;
  spfim_format format = SPFIM_FORMAT_CSV;
  spfim_experiment_output(experiment.ptr, &config_out, &format);
  if (format_name) format = *format_name == "json" ? SPFIM_FORMAT_JSON : SPFIM_FORMAT_CSV;
  const std::string path = output_path(out, config_out, config_path, format);

  ReportHandle report;
  if (spfim_experiment_run(experiment.ptr, &report.ptr) != SPFIM_OK) {
    std::cerr << "spfim: " << spfim_last_error() << "\n";
    return kExitRuntime;
  }
  if (spfim_report_write(report.ptr, path.c_str(), format) != SPFIM_OK) {
    std::cerr << "spfim: " << spfim_last_error() << "\n";
    return kExitRuntime;
  }

  std::size_t needed = 0;
  spfim_report_summary(report.ptr, nullptr, 0, &needed);
  std::vector<char> summary(needed);
  if (spfim_report_summary(report.ptr, summary.data(), summary.size(), &needed) == SPFIM_OK) {
    std::cout << summary.data();
  }
  std::cout << "report: " << path << "\n";
  return 0;
}
