/* fredlab: Fredholm and Z2 indices of lattice insulators. C interface. */
#ifndef FREDLAB_FREDLAB_H
#define FREDLAB_FREDLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FREDLAB_API __declspec(dllexport)
#else
#define FREDLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fredlab_status {
  FREDLAB_OK = 0,
  FREDLAB_E_INVALID_ARGUMENT = 1,
  FREDLAB_E_RANGE = 2,
  FREDLAB_E_GEOMETRY_MISMATCH = 3,
  FREDLAB_E_CONFIGURATION = 4,
  FREDLAB_E_GAP_VIOLATION = 5,
  FREDLAB_E_NOT_HERMITIAN = 6,
  FREDLAB_E_NUMERICAL_INTEGRITY = 7,
  FREDLAB_E_AMBIGUOUS = 8,
  FREDLAB_E_NOT_CONVERGED = 9,
  FREDLAB_E_IO = 10,
  FREDLAB_E_SCHEMA = 11,
  FREDLAB_E_INTERNAL = 99
} fredlab_status;

/* selfcheck mutation fixtures */
enum {
  FREDLAB_FAULT_FLIP_FLUX_SIGN = 1u,
  FREDLAB_FAULT_FLIP_STEP_CONVENTION = 2u
};

typedef enum fredlab_chern_route {
  FREDLAB_ROUTE_FLUX = 0,
  FREDLAB_ROUTE_CORNER = 1,
  FREDLAB_ROUTE_KUBO = 2
} fredlab_chern_route;

typedef struct fredlab_config fredlab_config;
typedef struct fredlab_result fredlab_result;
typedef struct fredlab_operator fredlab_operator;

FREDLAB_API const char* fredlab_version(void);
FREDLAB_API const char* fredlab_status_name(fredlab_status status);
/* message of the last failed call on this thread; empty after a success */
FREDLAB_API const char* fredlab_last_error(void);

/* configuration */
FREDLAB_API fredlab_status fredlab_config_default(const char* experiment, fredlab_config** out);
FREDLAB_API fredlab_status fredlab_config_parse(const char* text, fredlab_config** out);
FREDLAB_API fredlab_status fredlab_config_load(const char* path, fredlab_config** out);
FREDLAB_API fredlab_status fredlab_config_set_experiment(fredlab_config* config, const char* experiment);
/* comma separated, e.g. "1,2,3" */
FREDLAB_API fredlab_status fredlab_config_set_seeds(fredlab_config* config, const char* seeds);
FREDLAB_API fredlab_status fredlab_config_set_workers(fredlab_config* config, int workers);
FREDLAB_API fredlab_status fredlab_config_set_output_dir(fredlab_config* config, const char* dir);
FREDLAB_API const char* fredlab_config_output_dir(const fredlab_config* config);
/* 16 hex digits plus terminator */
FREDLAB_API fredlab_status fredlab_config_hash(const fredlab_config* config, char out[17]);
FREDLAB_API void fredlab_config_free(fredlab_config* config);

/* experiments */
FREDLAB_API fredlab_status fredlab_run(const fredlab_config* config, fredlab_result** out);
/* config may be NULL; fault_flags is a mask of FREDLAB_FAULT_* */
FREDLAB_API fredlab_status fredlab_selfcheck(const fredlab_config* config, unsigned fault_flags, fredlab_result** out);
/* 0 converged and warning free, 2 warnings or unconverged samples, 1 errors */
FREDLAB_API int fredlab_result_exit_code(const fredlab_result* result);
FREDLAB_API const char* fredlab_result_json(const fredlab_result* result);
FREDLAB_API const char* fredlab_result_csv(const fredlab_result* result);
FREDLAB_API const char* fredlab_result_timing_json(const fredlab_result* result);
FREDLAB_API const char* fredlab_result_summary(const fredlab_result* result);
/* dir NULL: the configured output directory */
FREDLAB_API fredlab_status fredlab_result_write(const fredlab_result* result, const char* dir);
FREDLAB_API void fredlab_result_free(fredlab_result* result);

/* operators; family is "qwz", "bhz" or "atomic-trivial" */
FREDLAB_API fredlab_status fredlab_operator_build_bulk(const char* family, double mass, double disorder_amplitude,
                                                       uint64_t seed, int side, int periodic, fredlab_operator** out);
FREDLAB_API fredlab_status fredlab_operator_load(const char* path, fredlab_operator** out);
FREDLAB_API fredlab_status fredlab_operator_save(const fredlab_operator* op, const char* path);
FREDLAB_API size_t fredlab_operator_dim(const fredlab_operator* op);
FREDLAB_API fredlab_status fredlab_operator_element(const fredlab_operator* op, size_t row, size_t col, double* re,
                                                    double* im);
FREDLAB_API fredlab_status fredlab_operator_fermi_projection(const fredlab_operator* h, double mu,
                                                             fredlab_operator** out);
/* P U* P + 1 - P for a projection P */
FREDLAB_API fredlab_status fredlab_operator_flux_operator(const fredlab_operator* p, fredlab_operator** out);
FREDLAB_API void fredlab_operator_free(fredlab_operator* op);

/* Chern index of a Fermi projection over the default flux disk; converged is 0 or 1 */
FREDLAB_API fredlab_status fredlab_index_chern(const fredlab_operator* p, fredlab_chern_route route, double* raw,
                                               long* value, int* converged);

#ifdef __cplusplus
}
#endif

#endif
