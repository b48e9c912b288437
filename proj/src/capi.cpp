#include "spfim/spfim.h"

#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include "spfim/config.hpp"
#include "spfim/errors.hpp"
#include "spfim/estimator.hpp"
#include "spfim/experiment.hpp"
#include "spfim/models.hpp"
#include "spfim/oracle.hpp"
#include "spfim/report.hpp"

struct spfim_model {
  std::shared_ptr<const spfim::Model> impl;
};

struct spfim_experiment {
  spfim::ExperimentConfig config;
};

struct spfim_report {
  spfim::ExperimentReport impl;
};

namespace {

thread_local std::string g_last_error;

spfim_status fail(spfim_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
spfim_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SPFIM_OK;
  } catch (const spfim::ConfigError& e) {
    return fail(SPFIM_ERR_CONFIG, e.what());
  } catch (const spfim::DimensionError& e) {
    return fail(SPFIM_ERR_DIMENSION, e.what());
  } catch (const spfim::ValidationError& e) {
    return fail(SPFIM_ERR_VALIDATION, e.what());
  } catch (const spfim::NotPositiveDefiniteError& e) {
    return fail(SPFIM_ERR_NOT_POSITIVE_DEFINITE, e.what());
  } catch (const spfim::OracleError& e) {
    return fail(SPFIM_ERR_ORACLE, e.what());
  } catch (const spfim::ReplicateError& e) {
    return fail(SPFIM_ERR_REPLICATE, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(SPFIM_ERR_IO, e.what());
  } catch (const spfim::Error& e) {
    return fail(SPFIM_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(SPFIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SPFIM_ERR_INTERNAL, "unknown error");
  }
}

void copy_dense(const spfim::SymmetricMatrix& m, double* out) {
  const auto dense = m.to_dense();
  std::memcpy(out, dense.data(), dense.size() * sizeof(double));
}

spfim_status copy_string(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf == nullptr || cap < s.size() + 1) {
    return fail(SPFIM_ERR_BUFFER_TOO_SMALL, "buffer too small: need " + std::to_string(s.size() + 1));
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  g_last_error.clear();
  return SPFIM_OK;
}

#define SPFIM_REQUIRE(ptr)                                                  \
  do {                                                                      \
    if ((ptr) == nullptr) return fail(SPFIM_ERR_NULL_ARGUMENT, #ptr " is NULL"); \
  } while (0)

}  // namespace

extern "C" {

const char* spfim_version(void) { return "1.0.0"; }

const char* spfim_last_error(void) { return g_last_error.c_str(); }

const char* spfim_status_string(spfim_status status) {
  switch (status) {
    case SPFIM_OK: return "ok";
    case SPFIM_ERR_NULL_ARGUMENT: return "null argument";
    case SPFIM_ERR_CONFIG: return "configuration error";
    case SPFIM_ERR_DIMENSION: return "dimension error";
    case SPFIM_ERR_VALIDATION: return "validation error";
    case SPFIM_ERR_NOT_POSITIVE_DEFINITE: return "matrix not positive definite";
    case SPFIM_ERR_ORACLE: return "oracle failure";
    case SPFIM_ERR_REPLICATE: return "replicate failure";
    case SPFIM_ERR_IO: return "i/o error";
    case SPFIM_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case SPFIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

spfim_status spfim_model_spn(const double* mu, size_t d, const double* sigma_packed, size_t n,
                             uint64_t noise_seed, spfim_model** out) {
  SPFIM_REQUIRE(mu);
  SPFIM_REQUIRE(sigma_packed);
  SPFIM_REQUIRE(out);
  return guarded([&] {
    auto sigma = spfim::SymmetricMatrix::from_packed(
        {sigma_packed, spfim::SymmetricMatrix::packed_size(d)}, d);
    auto model = spfim::spn_model(std::vector<double>(mu, mu + d), std::move(sigma),
                                  spfim::signal_plus_noise_covariances(n, noise_seed, d));
    *out = new spfim_model{std::move(model)};
  });
}

spfim_status spfim_model_mixture(const double* theta, size_t n, spfim_model** out) {
  SPFIM_REQUIRE(theta);
  SPFIM_REQUIRE(out);
  return guarded([&] {
    *out = new spfim_model{spfim::mixture_model(std::vector<double>(theta, theta + 5), n)};
  });
}

spfim_status spfim_model_quadratic(const double* a_packed, size_t p, size_t n, spfim_model** out) {
  SPFIM_REQUIRE(a_packed);
  SPFIM_REQUIRE(out);
  return guarded([&] {
    auto a = spfim::SymmetricMatrix::from_packed({a_packed, spfim::SymmetricMatrix::packed_size(p)}, p);
    *out = new spfim_model{spfim::quadratic_model(std::move(a), n)};
  });
}

void spfim_model_free(spfim_model* model) { delete model; }

spfim_status spfim_model_parameter_dim(const spfim_model* model, size_t* p) {
  SPFIM_REQUIRE(model);
  SPFIM_REQUIRE(p);
  *p = model->impl->parameter_dim();
  return SPFIM_OK;
}

spfim_status spfim_model_nominal_theta(const spfim_model* model, double* theta, size_t len) {
  SPFIM_REQUIRE(model);
  SPFIM_REQUIRE(theta);
  const auto nominal = model->impl->nominal_theta();
  if (len != nominal.size()) return fail(SPFIM_ERR_DIMENSION, "theta buffer length mismatch");
  std::memcpy(theta, nominal.data(), nominal.size() * sizeof(double));
  return SPFIM_OK;
}

spfim_status spfim_estimate_fim(const spfim_model* model, const double* theta, size_t p,
                                const spfim_estimator_config* config, double* mean_out,
                                double* variance_out) {
  SPFIM_REQUIRE(model);
  SPFIM_REQUIRE(theta);
  SPFIM_REQUIRE(config);
  SPFIM_REQUIRE(mean_out);
  return guarded([&] {
    spfim::EstimatorConfig e;
    e.method = config->method == SPFIM_METHOD_INDEPENDENT ? spfim::Method::IndependentPerturbation
                                                          : spfim::Method::Standard;
    e.M = config->inner_m;
    e.N = config->outer_n;
    e.c = config->c;
    e.seed = config->seed;
    const auto est = spfim::estimate_fim(*model->impl, {theta, p}, e, config->workers);
    copy_dense(est.mean, mean_out);
    if (variance_out) copy_dense(est.entry_variance, variance_out);
  });
}

spfim_status spfim_mc_true_fim(const spfim_model* model, const double* theta, size_t p,
                               size_t replicates, uint64_t seed, size_t workers, double* fim_out) {
  SPFIM_REQUIRE(model);
  SPFIM_REQUIRE(theta);
  SPFIM_REQUIRE(fim_out);
  return guarded([&] {
    copy_dense(spfim::mc_true_fim(*model->impl, {theta, p}, replicates, seed, workers), fim_out);
  });
}

spfim_status spfim_analytic_fim(const spfim_model* model, const double* theta, size_t p,
                                double* fim_out) {
  SPFIM_REQUIRE(model);
  SPFIM_REQUIRE(theta);
  SPFIM_REQUIRE(fim_out);
  return guarded([&] {
    if (p != model->impl->parameter_dim()) throw spfim::DimensionError("theta length mismatch");
    auto fim = model->impl->analytic_fim({theta, p});
    if (!fim) throw spfim::ValidationError(model->impl->name() + " has no analytic FIM");
    copy_dense(*fim, fim_out);
  });
}

spfim_status spfim_spectral_norm(const double* dense, size_t p, double* out) {
  SPFIM_REQUIRE(dense);
  SPFIM_REQUIRE(out);
  return guarded([&] {
    *out = spfim::spectral_norm(spfim::SymmetricMatrix::from_dense_upper({dense, p * p}, p));
  });
}

spfim_status spfim_relative_spectral_error(const double* estimate, const double* truth, size_t p,
                                           double* out) {
  SPFIM_REQUIRE(estimate);
  SPFIM_REQUIRE(truth);
  SPFIM_REQUIRE(out);
  return guarded([&] {
    *out = spfim::relative_spectral_error(
        spfim::SymmetricMatrix::from_dense_upper({estimate, p * p}, p),
        spfim::SymmetricMatrix::from_dense_upper({truth, p * p}, p));
  });
}

spfim_status spfim_experiment_load(const char* path, spfim_experiment** out) {
  SPFIM_REQUIRE(path);
  SPFIM_REQUIRE(out);
  return guarded([&] { *out = new spfim_experiment{spfim::load_config(path)}; });
}

spfim_status spfim_experiment_parse(const char* text, spfim_experiment** out) {
  SPFIM_REQUIRE(text);
  SPFIM_REQUIRE(out);
  return guarded([&] { *out = new spfim_experiment{spfim::parse_config(text)}; });
}

void spfim_experiment_free(spfim_experiment* experiment) { delete experiment; }

spfim_status spfim_experiment_set_seed(spfim_experiment* experiment, uint64_t seed) {
  SPFIM_REQUIRE(experiment);
  // The oracle seed follows the experiment seed unless it was set apart.
  if (experiment->config.oracle_seed == experiment->config.seed) experiment->config.oracle_seed = seed;
  experiment->config.seed = seed;
  return SPFIM_OK;
}

spfim_status spfim_experiment_set_workers(spfim_experiment* experiment, size_t workers) {
  SPFIM_REQUIRE(experiment);
  experiment->config.workers = workers;
  return SPFIM_OK;
}

spfim_status spfim_experiment_output(const spfim_experiment* experiment, const char** path,
                                     spfim_format* format) {
  SPFIM_REQUIRE(experiment);
  if (path) *path = experiment->config.output.empty() ? nullptr : experiment->config.output.c_str();
  if (format) {
    *format = experiment->config.format == spfim::OutputFormat::Json ? SPFIM_FORMAT_JSON
                                                                     : SPFIM_FORMAT_CSV;
  }
  return SPFIM_OK;
}

spfim_status spfim_experiment_run(const spfim_experiment* experiment, spfim_report** out) {
  SPFIM_REQUIRE(experiment);
  SPFIM_REQUIRE(out);
  return guarded([&] { *out = new spfim_report{spfim::run_experiment(experiment->config)}; });
}

void spfim_report_free(spfim_report* report) { delete report; }

spfim_status spfim_report_write(const spfim_report* report, const char* path, spfim_format format) {
  SPFIM_REQUIRE(report);
  SPFIM_REQUIRE(path);
  return guarded([&] {
    spfim::write_report(report->impl, path,
                        format == SPFIM_FORMAT_JSON ? spfim::OutputFormat::Json
                                                    : spfim::OutputFormat::Csv);
  });
}

spfim_status spfim_report_summary(const spfim_report* report, char* buf, size_t cap,
                                  size_t* needed) {
  SPFIM_REQUIRE(report);
  return copy_string(spfim::format_summary(report->impl), buf, cap, needed);
}

spfim_status spfim_report_json(const spfim_report* report, char* buf, size_t cap, size_t* needed) {
  SPFIM_REQUIRE(report);
  return copy_string(spfim::to_json(report->impl), buf, cap, needed);
}

spfim_status spfim_report_warning_count(const spfim_report* report, size_t* count) {
  SPFIM_REQUIRE(report);
  SPFIM_REQUIRE(count);
  *count = report->impl.warnings.size();
  return SPFIM_OK;
}

const char* spfim_report_warning(const spfim_report* report, size_t index) {
  if (report == nullptr || index >= report->impl.warnings.size()) return nullptr;
  return report->impl.warnings[index].c_str();
}

}  // extern "C"
