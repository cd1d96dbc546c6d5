#ifndef RHAM_RHAM_H
#define RHAM_RHAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(RHAM_BUILDING_LIBRARY)
#define RHAM_API __attribute__((visibility("default")))
#else
#define RHAM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rham_status {
  RHAM_OK = 0,
  RHAM_INVALID_ARGUMENT = 1,
  RHAM_PARSE_ERROR = 2,
  RHAM_VALIDATION_ERROR = 3,
  RHAM_FACTORIZATION_FAILURE = 4,
  RHAM_OUT_OF_RANGE = 5,
  RHAM_UNSUPPORTED = 6,
  RHAM_NON_FINITE = 7,
  RHAM_NOT_AUTONOMOUS = 8,
  RHAM_REFINEMENT_OVERFLOW = 9,
  RHAM_DEGENERATE_OVERLAP = 10,
  RHAM_IO_FAILURE = 11,
  RHAM_INTERNAL_ERROR = 99
} rham_status;

typedef struct rham_config rham_config;
typedef struct rham_hamiltonian rham_hamiltonian;

/* Message for the last failed call on this thread; "" after success. */
RHAM_API const char* rham_last_error(void);
RHAM_API const char* rham_status_name(rham_status status);
RHAM_API const char* rham_version(void);

/* Experiment configuration. `command` is a CLI subcommand name such as "intersections". */
RHAM_API rham_status rham_config_parse(const char* command, const char* text, rham_config** out);
RHAM_API rham_status rham_config_set(rham_config* config, const char* key, const char* value);
/* Writes the effective config into a malloc'd string released with rham_string_free. */
RHAM_API rham_status rham_config_serialize(const rham_config* config, char** out);
RHAM_API void rham_config_free(rham_config* config);

/* Runs the configured command, writing artifacts to its output directory.
   `summary` (optional) receives a malloc'd string. */
RHAM_API rham_status rham_run(const rham_config* config, char** summary);
RHAM_API void rham_string_free(char* s);

/* Draws the `index`-th Hamiltonian for regularity index `regularity_index` of `config`. */
RHAM_API rham_status rham_hamiltonian_sample(const rham_config* config, size_t regularity_index,
                                             uint64_t index, rham_hamiltonian** out);
RHAM_API void rham_hamiltonian_free(rham_hamiltonian* h);
RHAM_API rham_status rham_hamiltonian_value(const rham_hamiltonian* h, double t, double x,
                                            double y, double* out);
/* out[0], out[1] = X_H(t, x, y). */
RHAM_API rham_status rham_hamiltonian_vector_field(const rham_hamiltonian* h, double t, double x,
                                                   double y, double* out);
RHAM_API rham_status rham_hamiltonian_osc(const rham_hamiltonian* h, int spatial_grid,
                                          int time_grid, double* out);
/* Time-one map of a point; out receives the reduced point. */
RHAM_API rham_status rham_hamiltonian_flow(const rham_hamiltonian* h, double x, double y,
                                           int steps, double* out);
RHAM_API rham_status rham_gaussian_dimension(const rham_config* config, size_t* out);

#ifdef __cplusplus
}
#endif

#endif
