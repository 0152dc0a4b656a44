#ifndef GBID_H
#define GBID_H

/* C interface of the grey-box NARX identification library.
 *
 * Every call returns a gbid_status. On failure the message of the last error on the
 * calling thread is available from gbid_last_error() until the next call on that thread.
 * Strings returned through char** are owned by the caller and released with gbid_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define GBID_API __declspec(dllexport)
#else
#  define GBID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gbid_status {
    GBID_OK = 0,
    GBID_ERR_CONFIG = 2,
    GBID_ERR_DATA = 3,
    GBID_ERR_NUMERICAL = 4,
    GBID_ERR_INTERNAL = 5
} gbid_status;

typedef struct gbid_pool gbid_pool;
typedef struct gbid_model gbid_model;

GBID_API const char* gbid_version(void);
GBID_API const char* gbid_last_error(void);
GBID_API void gbid_string_free(char* s);

/* Term pools. prune is "clusters", "linear-only" or "none"; NULL means "none". */
GBID_API size_t gbid_term_count(int n_u, int n_y, int n_l);
GBID_API gbid_status gbid_pool_create(int n_u, int n_y, int n_l, const char* prune, gbid_pool** out);
GBID_API size_t gbid_pool_size(const gbid_pool* pool);
GBID_API gbid_status gbid_pool_term(const gbid_pool* pool, size_t index, char** out);
GBID_API gbid_status gbid_pool_to_json(const gbid_pool* pool, char** out);
GBID_API void gbid_pool_free(gbid_pool* pool);

/* Models. Reference names: M1, M2, M3, M4, OFR, OFR-EA. */
GBID_API gbid_status gbid_model_reference(const char* name, gbid_model** out);
GBID_API gbid_status gbid_model_from_json(const char* json, gbid_model** out);
GBID_API gbid_status gbid_model_to_json(const gbid_model* model, char** out);
GBID_API size_t gbid_model_term_count(const gbid_model* model);
/* Writes min(capacity, n_l + 1) coefficients a_0.. and stores the full count in *count. */
GBID_API gbid_status gbid_model_static_coefficients(const gbid_model* model, double* out, size_t capacity,
                                                    size_t* count);
/* Free-run simulation seeded with y[0..max_lag). y_hat must hold n values. */
GBID_API gbid_status gbid_model_free_run(const gbid_model* model, const double* u, const double* y, size_t n,
                                         double* y_hat);
GBID_API void gbid_model_free(gbid_model* model);

/* Decision making. Objective arrays are row-major, three values (xi, E, E_static) per entry. */
GBID_API gbid_status gbid_priority_weights(const int* rankings, size_t n, double intensity, double* weights);
GBID_API gbid_status gbid_mmd_select(const double* objectives, size_t n, size_t* selected);
GBID_API gbid_status gbid_mtd_select(const double* objectives, size_t n, const double* weights, size_t* selected);
GBID_API gbid_status gbid_set_coverage(const double* a, size_t n_a, const double* b, size_t n_b, double* coverage);

/* Pipeline commands. Integer overrides below zero are ignored; a NULL or empty out_dir
 * selects runs/<timestamp>-<hash>. The summary is a JSON document. */
typedef struct gbid_options {
    const char* config_path;
    const char* out_dir;
    int64_t seed;
    int64_t runs;
    int64_t budget;
    int64_t jobs;
} gbid_options;

GBID_API void gbid_options_init(gbid_options* options);
GBID_API gbid_status gbid_cmd_generate_data(const gbid_options* options, char** summary);
GBID_API gbid_status gbid_cmd_identify(const gbid_options* options, char** summary);
/* rankings is a comma list such as "3,1,2"; NULL keeps the MTD specs of the identify config. */
GBID_API gbid_status gbid_cmd_select(const gbid_options* options, const char* archive_dir, const char* rankings,
                                     double intensity, char** summary);
/* data_path may be NULL to regenerate the dataset from the config. */
GBID_API gbid_status gbid_cmd_validate(const gbid_options* options, const char* model_path, const char* data_path,
                                       char** summary);
GBID_API gbid_status gbid_cmd_coverage(const gbid_options* options, const char* archive_a, const char* archive_b,
                                       char** summary);

#ifdef __cplusplus
}
#endif

#endif
