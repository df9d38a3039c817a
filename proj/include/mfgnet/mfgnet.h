#ifndef MFGNET_H
#define MFGNET_H

#include <stdint.h>

#if defined(MFGNET_BUILDING_LIBRARY)
#define MFGNET_API __attribute__((visibility("default")))
#else
#define MFGNET_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mfgnet_status {
    MFGNET_OK = 0,
    MFGNET_INVALID_ARGUMENT = 1,
    MFGNET_PARSE = 2,
    MFGNET_VALIDATION = 3,
    MFGNET_SOLVE = 4,
    MFGNET_IO = 5,
    MFGNET_NOT_CONVERGED = 6,
    MFGNET_INTERNAL = 7
} mfgnet_status;

typedef struct mfgnet_network mfgnet_network;
typedef struct mfgnet_config mfgnet_config;
typedef struct mfgnet_report mfgnet_report;

/* Zero-initialize, then set what is needed. Fields with has_* = 0 keep the config value. */
typedef struct mfgnet_run_options {
    const char* out_dir; /* NULL or "" writes no files */
    int has_seed;
    uint64_t seed;
    int has_threads;
    int threads;
    int has_k;
    int k;
} mfgnet_run_options;

MFGNET_API const char* mfgnet_version(void);
MFGNET_API const char* mfgnet_status_name(mfgnet_status status);
/* Message of the last failed call on this thread; "" if none. */
MFGNET_API const char* mfgnet_last_error(void);
/* 0 error, 1 warn, 2 info, 3 debug. */
MFGNET_API void mfgnet_set_log_level(int level);

MFGNET_API mfgnet_status mfgnet_network_load(const char* path, mfgnet_network** out);
MFGNET_API mfgnet_status mfgnet_network_parse(const char* json, mfgnet_network** out);
MFGNET_API void mfgnet_network_free(mfgnet_network* net);
MFGNET_API int mfgnet_network_vertex_count(const mfgnet_network* net);
MFGNET_API int mfgnet_network_edge_count(const mfgnet_network* net);
/* MFGNET_OK if admissible, MFGNET_VALIDATION otherwise; details in mfgnet_last_error(). */
MFGNET_API mfgnet_status mfgnet_network_validate(const mfgnet_network* net);
/* Oriented copy with artificial midpoint vertices where needed. */
MFGNET_API mfgnet_status mfgnet_network_normalize(const mfgnet_network* net, mfgnet_network** out);

MFGNET_API mfgnet_status mfgnet_config_load(const char* path, mfgnet_config** out);
MFGNET_API mfgnet_status mfgnet_config_parse(const char* json, mfgnet_config** out);
MFGNET_API void mfgnet_config_free(mfgnet_config* cfg);

/* Runs validate, solve-fp, solve-hjb, solve-mfg, eig, simulate or check. cfg and opts may be
 * NULL. A report is returned whenever the run completed, even if its checks failed
 * (status MFGNET_VALIDATION or MFGNET_NOT_CONVERGED). */
MFGNET_API mfgnet_status mfgnet_run(const char* command, const mfgnet_network* net,
                                    const mfgnet_config* cfg, const mfgnet_run_options* opts,
                                    mfgnet_report** out);

MFGNET_API int mfgnet_report_passed(const mfgnet_report* report);
MFGNET_API const char* mfgnet_report_text(const mfgnet_report* report);
MFGNET_API const char* mfgnet_report_json(const mfgnet_report* report);
MFGNET_API void mfgnet_report_free(mfgnet_report* report);

#ifdef __cplusplus
}
#endif

#endif
