/* C interface to the nonstop simulation library.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * fallible call returns an nst_status; on failure the message is available
 * from nst_last_error() on the same thread until the next call. Strings
 * returned through char** must be released with nst_string_free. */
#ifndef NONSTOP_NONSTOP_H_
#define NONSTOP_NONSTOP_H_

#include <stddef.h>

#if defined(NONSTOP_BUILDING_LIBRARY)
#define NST_API __attribute__((visibility("default")))
#else
#define NST_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nst_status {
  NST_OK = 0,
  NST_ERR_INVALID_ARGUMENT = 1,
  NST_ERR_PARSE = 2,
  NST_ERR_VALIDATION = 3,
  NST_ERR_SIMULATION = 4,
  NST_ERR_OPTIMIZER_BUDGET = 5,
  NST_ERR_IO = 6,
  NST_ERR_INTERNAL = 7
} nst_status;

typedef struct nst_config nst_config;
typedef struct nst_result nst_result;
typedef struct nst_comparison nst_comparison;

NST_API const char* nst_version(void);
NST_API const char* nst_last_error(void);
NST_API const char* nst_status_name(nst_status status);
NST_API void nst_string_free(char* s);

/* Scenario configuration. `source` names the text in error messages and
 * may be NULL. Overrides are "dotted.key=value" and are revalidated
 * immediately; a failed override leaves the config unchanged. */
NST_API nst_status nst_config_default(nst_config** out);
NST_API nst_status nst_config_load(const char* path, nst_config** out);
NST_API nst_status nst_config_parse(const char* text, const char* source, nst_config** out);
NST_API nst_status nst_config_override(nst_config* config, const char* assignment);
NST_API nst_status nst_config_to_yaml(const nst_config* config, char** out);
NST_API nst_status nst_config_name(const nst_config* config, char** out);
NST_API void nst_config_free(nst_config* config);

/* Runs the closed loop. A run that aborts still yields a result;
 * nst_result_exit_code reports 0, 3 (aborted) or 4 (optimizer fallback
 * budget exhausted). */
NST_API nst_status nst_run(const nst_config* config, nst_result** out);
NST_API int nst_result_exit_code(const nst_result* result);
NST_API nst_status nst_result_trace_csv(const nst_result* result, char** out);
NST_API nst_status nst_result_summary_json(const nst_result* result, char** out);
NST_API nst_status nst_result_write(const nst_result* result, const char* dir);
NST_API void nst_result_free(nst_result* result);

/* Runs the scenario with the optimizer off and on. */
NST_API nst_status nst_compare(const nst_config* config, nst_comparison** out);
NST_API int nst_comparison_exit_code(const nst_comparison* comparison);
NST_API nst_status nst_comparison_table(const nst_comparison* comparison, char** out);
NST_API nst_status nst_comparison_json(const nst_comparison* comparison, char** out);
NST_API nst_status nst_comparison_write(const nst_comparison* comparison, const char* dir);
NST_API void nst_comparison_free(nst_comparison* comparison);

#ifdef __cplusplus
}
#endif

#endif /* NONSTOP_NONSTOP_H_ */
