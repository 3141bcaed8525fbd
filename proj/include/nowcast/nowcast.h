#ifndef NOWCAST_NOWCAST_H
#define NOWCAST_NOWCAST_H

#include <stddef.h>
#include <stdint.h>

#if defined(NC_BUILDING_LIBRARY)
#define NC_API __attribute__((visibility("default")))
#else
#define NC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nc_status {
    NC_OK = 0,
    NC_VALIDATION = 1, /* malformed or inconsistent input */
    NC_INFEASIBLE = 2, /* calibration targets cannot be met */
    NC_IO = 3,         /* missing or unwritable file */
    NC_DOMAIN = 4,     /* argument outside an operation's domain */
    NC_ARGUMENT = 5,   /* null pointer or bad enum passed to the API */
    NC_INTERNAL = 6
} nc_status;

typedef struct nc_population nc_population;

/* Inputs of a run or validation. Strings may be NULL where noted. */
typedef struct nc_run_config {
    const char *scenario;       /* scenario file */
    const char *population_dir; /* NULL to use synth_config */
    const char *synth_config;   /* NULL to use population_dir; "" for defaults */
    const char *data_dir;       /* NULL for the built-in data directory */
    const char *policy_dir;     /* NULL for data_dir/policy */
    const char *out_dir;        /* required by nc_run */
    int has_seed;               /* nonzero to override the scenario seed */
    uint64_t seed;
    unsigned threads;           /* 0 for all cores */
} nc_run_config;

/* Message of the last failed call on this thread, "" after a success. */
NC_API const char *nc_last_error(void);
NC_API const char *nc_version(void);
NC_API const char *nc_default_data_dir(void);
/* Frees strings returned through char** out-parameters. */
NC_API void nc_string_free(char *text);

NC_API nc_status nc_population_load(const char *dir, nc_population **out);
/* config_path NULL or "" for the generator defaults. */
NC_API nc_status nc_population_generate(const char *config_path, uint64_t seed, nc_population **out);
NC_API nc_status nc_population_save(const nc_population *population, const char *dir);
NC_API nc_status nc_population_counts(const nc_population *population, size_t *households, size_t *persons);
NC_API void nc_population_free(nc_population *population);

/* Weekly amount in cents paid by instrument "pup", "ceib", "twss" or "ewss"
 * for weekly earnings (euros) on an ISO date. ceib with earnings 0 pays
 * the top band. */
NC_API nc_status nc_schedule_rate(const char *policy_dir, const char *instrument, double weekly_earnings,
                                  const char *date, int64_t *cents);

/* Loads every input without simulating. On NC_VALIDATION *report lists
 * every problem, one per line. */
NC_API nc_status nc_validate(const nc_run_config *config, char **report);
/* Runs the scenario and writes the tables and manifest.json to out_dir. */
NC_API nc_status nc_run(const nc_run_config *config);
/* Effective configuration with defaults, in key = value form. */
NC_API nc_status nc_print_config(const nc_run_config *config, char **text);

/* Fits a seed matrix (CSV: label column then one column per category) to
 * row and column targets (CSV: label,target). *csv receives the fitted
 * matrix. */
NC_API nc_status nc_ipf_files(const char *seed_path, const char *row_targets_path, const char *col_targets_path,
                              double tolerance, int max_iterations, char **csv, int *iterations);

#ifdef __cplusplus
}
#endif

#endif
