/* C interface to the qdent library. All handles are opaque; every call that
 * can fail returns a qdent_status and leaves a thread-local message readable
 * through qdent_last_error(). */
#ifndef QDENT_QDENT_H
#define QDENT_QDENT_H

#include <stddef.h>
#include <stdint.h>

#if defined(QDENT_BUILDING_LIBRARY)
#define QDENT_API __attribute__((visibility("default")))
#else
#define QDENT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes. */
typedef enum {
  QDENT_OK = 0,
  QDENT_ERROR_INTERNAL = 1,
  QDENT_ERROR_INVALID_INPUT = 2,
  QDENT_ERROR_DATA_CORRUPTION = 3,
  QDENT_ERROR_NUMERICAL = 4
} qdent_status;

typedef struct qdent_params qdent_params;
typedef struct qdent_state qdent_state;
typedef struct qdent_dataset qdent_dataset;

QDENT_API const char* qdent_version(void);
/* Message of the last failed call on this thread ("" if none). */
QDENT_API const char* qdent_last_error(void);

/* ---- cascade parameters ------------------------------------------------ */

QDENT_API qdent_status qdent_params_create(qdent_params** out);
/* JSON document with the keys of the cascade section of a config. */
QDENT_API qdent_status qdent_params_from_json(const char* json, qdent_params** out);
/* "qd1" or "qd2". */
QDENT_API qdent_status qdent_params_from_preset(const char* name, qdent_params** out);
QDENT_API void qdent_params_destroy(qdent_params* params);
QDENT_API qdent_status qdent_params_set_fss(qdent_params* params, double fss_ueV);
QDENT_API qdent_status qdent_params_set_k(qdent_params* params, double k);
QDENT_API qdent_status qdent_params_set_omega(qdent_params* params, double omega_deg);
QDENT_API qdent_status qdent_params_set_tau_ss(qdent_params* params, double tau_ss_ns);

QDENT_API qdent_status qdent_model_fidelity(double fss_ueV, double tau1_ps, double tau_ss_ns, double k,
                                            double* out);
QDENT_API qdent_status qdent_k_from_g2(double g2_x, double g2_xx, double* out);
QDENT_API qdent_status qdent_purcell_projected_fidelity(const qdent_params* params, double purcell_factor,
                                                        double* out);

/* ---- density matrices -------------------------------------------------- */

/* Row-major 4x4, basis HH, HV, VH, VV. */
QDENT_API qdent_status qdent_state_from_arrays(const double re[16], const double im[16], qdent_state** out);
QDENT_API qdent_status qdent_state_from_params(const qdent_params* params, qdent_state** out);
QDENT_API void qdent_state_destroy(qdent_state* state);
QDENT_API qdent_status qdent_state_get(const qdent_state* state, double re[16], double im[16]);

typedef struct {
  double fidelity;
  double concurrence;
  double largest_eigenvalue;
  double optimal_phase_fidelity;
} qdent_metrics;

QDENT_API qdent_status qdent_state_metrics(const qdent_state* state, qdent_metrics* out);
QDENT_API qdent_status qdent_fidelity_to_bell(const qdent_state* state, double omega_deg, double* out);

/* ---- datasets and reconstruction --------------------------------------- */

/* settings: "full36", "reduced6" or "minimal16". */
QDENT_API qdent_status qdent_dataset_simulate(const qdent_state* state, const char* settings,
                                              double pairs_per_setting, double hwp_retardance,
                                              double qwp_retardance, uint64_t seed, qdent_dataset** out);
QDENT_API qdent_status qdent_dataset_load(const char* path, qdent_dataset** out);
QDENT_API qdent_status qdent_dataset_save(const qdent_dataset* dataset, const char* path);
QDENT_API void qdent_dataset_destroy(qdent_dataset* dataset);
QDENT_API qdent_status qdent_dataset_size(const qdent_dataset* dataset, size_t* out);

typedef struct {
  int ideal_projectors; /* ignore the dataset's retardances */
  int multistart;
  uint64_t seed;
} qdent_reconstruct_params;

QDENT_API void qdent_reconstruct_params_init(qdent_reconstruct_params* params);
QDENT_API qdent_status qdent_reconstruct(const qdent_dataset* dataset, const qdent_reconstruct_params* params,
                                         qdent_state** out);

/* ---- batch commands ----------------------------------------------------- */

typedef void (*qdent_log_fn)(void* user, int is_warning, const char* line);

/* Shared by all commands. */
typedef struct {
  const char* output_dir; /* NULL: config, then $QDENT_OUTPUT_DIR, then "qdent-out" */
  int jobs;
  qdent_log_fn log;
  void* log_user;
} qdent_command_context;

typedef struct {
  const char* config_path;
  int has_seed;
  uint64_t seed;
} qdent_simulate_options;

typedef struct {
  const char* dataset_path;
  const char* config_path;
  const char* background_path;
  int has_seed;
  uint64_t seed;
  int mc_trials; /* < 0: config value or 100 */
  int ideal_projectors;
  int with_corrections;
} qdent_reconstruct_options;

typedef struct {
  const char* points_path;
  const char* config_path;
  int has_seed;
  uint64_t seed;
  int has_tau1;
  double tau1_ps;
  int has_k;
  double k;
  int fit_omega; /* < 0: config value */
  int mc_trials; /* < 0: config value or 200 */
} qdent_fit_options;

typedef struct {
  const char* dataset_path;
  const char* config_path;
  const char* background_path;
  int has_seed;
  uint64_t seed;
  int mc_trials; /* < 0: none */
} qdent_correct_options;

QDENT_API void qdent_command_context_init(qdent_command_context* context);
QDENT_API void qdent_simulate_options_init(qdent_simulate_options* options);
QDENT_API void qdent_reconstruct_options_init(qdent_reconstruct_options* options);
QDENT_API void qdent_fit_options_init(qdent_fit_options* options);
QDENT_API void qdent_correct_options_init(qdent_correct_options* options);

QDENT_API qdent_status qdent_cmd_simulate(const qdent_simulate_options* options, const qdent_command_context* context);
QDENT_API qdent_status qdent_cmd_reconstruct(const qdent_reconstruct_options* options,
                                             const qdent_command_context* context);
QDENT_API qdent_status qdent_cmd_fit(const qdent_fit_options* options, const qdent_command_context* context);
QDENT_API qdent_status qdent_cmd_correct(const qdent_correct_options* options, const qdent_command_context* context);
QDENT_API qdent_status qdent_cmd_report(const char* run_dir, const qdent_command_context* context);

#ifdef __cplusplus
}
#endif

#endif
