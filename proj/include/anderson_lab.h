#ifndef ANDERSON_LAB_H
#define ANDERSON_LAB_H

/* C interface to the Anderson localization laboratory. Configurations are
 * opaque handles; every entry point reports through status codes and the
 * thread-local error string, never by throwing across the boundary. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum anderson_lab_status {
    ANDERSON_LAB_OK = 0,
    ANDERSON_LAB_CONFIG_ERROR = 1,
    ANDERSON_LAB_NUMERIC_ERROR = 2,
    ANDERSON_LAB_CHECK_FAILURE = 3,
    ANDERSON_LAB_INVALID_ARGUMENT = 4
} anderson_lab_status;

/* Opaque parsed experiment configuration. */
typedef struct anderson_lab_config anderson_lab_config;

/* Library version, e.g. "0.1.0". Owned by the library. */
const char* anderson_lab_version(void);

/* Explanation of the most recent failure on the calling thread; empty
 * string when the last call succeeded. Owned by the library. */
const char* anderson_lab_last_error(void);

/* Parses configuration text into a new handle stored in *out_config. On
 * ANDERSON_LAB_CONFIG_ERROR the full problem list, one per line with line
 * numbers, is available from anderson_lab_last_error(). */
anderson_lab_status anderson_lab_config_parse(const char* text,
                                              anderson_lab_config** out_config);

void anderson_lab_config_free(anderson_lab_config* config);

/* Experiment name, e.g. "spectrum". Owned by the library. NULL if config
 * is NULL. */
const char* anderson_lab_config_kind(const anderson_lab_config* config);

anderson_lab_status anderson_lab_config_set_seed(anderson_lab_config* config, uint64_t seed);

/* Canonical text form of the configuration; parseable by
 * anderson_lab_config_parse. Free with anderson_lab_string_free. Returns
 * NULL on invalid input. */
char* anderson_lab_config_serialize(const anderson_lab_config* config);

void anderson_lab_string_free(char* text);

/* Runs the experiment, writing a manifest, a results table, and the
 * experiment's data files under out_dir. workers <= 1 runs serially; the
 * written bytes never depend on the worker count. */
anderson_lab_status anderson_lab_run(const anderson_lab_config* config, const char* out_dir,
                                     int workers);

/* Runs the built-in acceptance battery. Each finished check is reported as
 * one text line through on_line (when non-null). A check documented as out
 * of reach at desk scale may report FAIL without affecting the status;
 * out_unexpected (when non-null) receives the count of genuine failures and
 * the return value is ANDERSON_LAB_CHECK_FAILURE iff that count is nonzero. */
typedef void (*anderson_lab_line_fn)(const char* line, void* user_data);
anderson_lab_status anderson_lab_verify(anderson_lab_line_fn on_line, void* user_data,
                                        int workers, int* out_unexpected);

#ifdef __cplusplus
}
#endif

#endif /* ANDERSON_LAB_H */
