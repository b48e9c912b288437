/* Smoke test of the C interface, compiled as C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "spfim/spfim.h"

static int failures = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s (last error: %s)\n", \
              __FILE__, __LINE__, #cond, spfim_last_error());         \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_quadratic(void) {
  const double a[3] = {2.0, 0.0, 3.0};
  spfim_model* model = NULL;
  size_t p = 0;
  double theta[2];
  double mean[4], var[4], fim[4];
  spfim_estimator_config cfg = {SPFIM_METHOD_INDEPENDENT, 1, 50, 1.0 / 8192.0, 3, 2};

  CHECK(spfim_model_quadratic(a, 2, 1, &model) == SPFIM_OK);
  CHECK(spfim_model_parameter_dim(model, &p) == SPFIM_OK && p == 2);
  CHECK(spfim_model_nominal_theta(model, theta, 2) == SPFIM_OK);
  CHECK(theta[0] == 1.0 && theta[1] == 2.0);
  CHECK(spfim_estimate_fim(model, theta, 2, &cfg, mean, var) == SPFIM_OK);
  CHECK(mean[0] == 2.0 && mean[3] == 3.0);
  CHECK(var[0] == 0.0 && var[3] == 0.0);
  CHECK(mean[1] == mean[2]);
  CHECK(spfim_analytic_fim(model, theta, 2, fim) == SPFIM_OK);
  CHECK(fim[0] == 2.0 && fim[1] == 0.0 && fim[3] == 3.0);
  CHECK(spfim_estimate_fim(model, theta, 3, &cfg, mean, var) == SPFIM_ERR_DIMENSION);
  CHECK(strlen(spfim_last_error()) > 0);
  spfim_model_free(model);
}

static void test_spn(void) {
  const double mu[3] = {0, 0, 0};
  const double sigma[6] = {2, 0.5, 0.5, 2, 0.5, 2};
  spfim_model* model = NULL;
  double theta[9], truth[81], est[81], err = 0.0;
  spfim_estimator_config cfg = {SPFIM_METHOD_STANDARD, 1, 2000, 1e-4, 11, 1};

  CHECK(spfim_model_spn(mu, 3, sigma, 10, 1, &model) == SPFIM_OK);
  CHECK(spfim_model_nominal_theta(model, theta, 9) == SPFIM_OK);
  CHECK(spfim_analytic_fim(model, theta, 9, truth) == SPFIM_OK);
  CHECK(spfim_estimate_fim(model, theta, 9, &cfg, est, NULL) == SPFIM_OK);
  CHECK(spfim_relative_spectral_error(est, truth, 9, &err) == SPFIM_OK);
  CHECK(err > 0.0 && err < 0.2);
  spfim_model_free(model);

  /* Sigma + P_1 must be positive definite. */
  {
    const double indefinite[6] = {-100, 0, 0, -100, 0, -100};
    model = NULL;
    CHECK(spfim_model_spn(mu, 3, indefinite, 1, 1, &model) == SPFIM_ERR_NOT_POSITIVE_DEFINITE);
    CHECK(model == NULL);
  }
}

static void test_mixture_and_norms(void) {
  const double theta[5] = {0.2, 0.0, 4.0, 1.0, 9.0};
  const double bad[5] = {1.5, 0.0, 4.0, 1.0, 9.0};
  const double dense[4] = {3.0, 1.0, 1.0, 3.0};
  spfim_model* model = NULL;
  double fim[25], norm = 0.0;

  CHECK(spfim_model_mixture(bad, 30, &model) == SPFIM_ERR_VALIDATION);
  CHECK(spfim_model_mixture(theta, 30, &model) == SPFIM_OK);
  CHECK(spfim_mc_true_fim(model, theta, 5, 500, 2, 1, fim) == SPFIM_OK);
  CHECK(fim[0] > 0.0 && fim[1] == fim[5]);
  CHECK(spfim_analytic_fim(model, theta, 5, fim) == SPFIM_ERR_VALIDATION);
  spfim_model_free(model);

  CHECK(spfim_spectral_norm(dense, 2, &norm) == SPFIM_OK);
  CHECK(fabs(norm - 4.0) < 1e-12);
  CHECK(spfim_spectral_norm(NULL, 2, &norm) == SPFIM_ERR_NULL_ARGUMENT);
}

static void test_experiment(void) {
  const char* text =
      "[experiment]\nkind = variance_ratio\nreplicates = 200\nn = 5\nseed = 4\n";
  spfim_experiment* exp = NULL;
  spfim_report* report = NULL;
  size_t needed = 0, count = 0;
  char small[4];
  char* buf;

  CHECK(spfim_experiment_load("/nonexistent/config.ini", &exp) == SPFIM_ERR_CONFIG);
  CHECK(spfim_experiment_parse("[experiment]\nkind = nope\n", &exp) == SPFIM_ERR_CONFIG);
  CHECK(spfim_experiment_parse(text, &exp) == SPFIM_OK);
  CHECK(spfim_experiment_set_workers(exp, 2) == SPFIM_OK);
  CHECK(spfim_experiment_set_seed(exp, 9) == SPFIM_OK);
  CHECK(spfim_experiment_run(exp, &report) == SPFIM_OK);

  CHECK(spfim_report_json(report, small, sizeof small, &needed) == SPFIM_ERR_BUFFER_TOO_SMALL);
  CHECK(needed > sizeof small);
  buf = (char*)malloc(needed);
  CHECK(spfim_report_json(report, buf, needed, &needed) == SPFIM_OK);
  CHECK(strstr(buf, "\"seed\": 9") != NULL);
  free(buf);

  CHECK(spfim_report_summary(report, NULL, 0, &needed) == SPFIM_ERR_BUFFER_TOO_SMALL);
  buf = (char*)malloc(needed);
  CHECK(spfim_report_summary(report, buf, needed, &needed) == SPFIM_OK);
  CHECK(strstr(buf, "variance_ratio") != NULL);
  free(buf);

  CHECK(spfim_report_warning_count(report, &count) == SPFIM_OK);
  CHECK(count >= 1);
  CHECK(spfim_report_warning(report, 0) != NULL);
  CHECK(spfim_report_warning(report, count) == NULL);

  spfim_report_free(report);
  spfim_experiment_free(exp);
}

int main(void) {
  CHECK(strlen(spfim_version()) > 0);
  CHECK(strcmp(spfim_status_string(SPFIM_OK), "ok") == 0);
  test_quadratic();
  test_spn();
  test_mixture_and_norms();
  test_experiment();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi smoke test passed\n");
  return 0;
}
