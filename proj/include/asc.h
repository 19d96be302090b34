/* asc — approximate spectral clustering with growing-neural-gas graphs.
 *
 * C interface to the shared library. All functions return ASC_OK (0) on
 * success or a nonzero error code; asc_last_error() gives the detail message
 * for the most recent failure on the calling thread. Objects returned through
 * out-parameters are owned by the caller and released with the matching
 * _destroy/_free function.
 */

#ifndef ASC_H
#define ASC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum asc_status {
  ASC_OK = 0,
  ASC_ERR_INVALID_ARGUMENT = 1,
  ASC_ERR_DIMENSION_MISMATCH = 2,
  ASC_ERR_IO = 3,
  ASC_ERR_PARSE = 4,
  ASC_ERR_NUMERIC = 5,
  ASC_ERR_INTERNAL = 6
} asc_status;

typedef struct asc_config asc_config;
typedef struct asc_result asc_result;

const char* asc_version(void);
const char* asc_status_name(int code);

/* Message and pipeline stage of the calling thread's most recent error.
 * Both return "" when the last call succeeded. */
const char* asc_last_error(void);
const char* asc_last_error_stage(void);

/* ---- configuration ----------------------------------------------------- */

/* A config starts with the library defaults. Fields are read and written as
 * JSON (the schema ships in schemas/config.schema.json); asc_config_update
 * merges the given fields into the current state. */
asc_config* asc_config_create(void);
void asc_config_destroy(asc_config* config);
int asc_config_update(asc_config* config, const char* json_text);
int asc_config_to_json(const asc_config* config, char** out_json);

void asc_string_free(char* text);

/* ---- synthetic data ---------------------------------------------------- */

/* kind: "rings" | "blobs" | "rings_with_noise"; params_json may be NULL or a
 * JSON object with generator parameters. Writes x,y,label rows. */
int asc_generate_points(const char* kind, const char* params_json, int64_t seed,
                        const char* out_csv_path);

/* ---- pipelines ---------------------------------------------------------- */

/* Clusters a CSV of points (optional header, optional trailing label column)
 * and writes any artifacts configured in the config's output paths. */
int asc_cluster_points_file(const char* points_csv_path, const asc_config* config,
                            asc_result** out_result);

/* Same pipeline over an in-memory row-major array of n points x dim. */
int asc_cluster_points(const double* points, size_t count, size_t dim, const asc_config* config,
                       asc_result** out_result);

/* Segments a PNG or binary PPM (P6) image. */
int asc_segment_image_file(const char* image_path, const asc_config* config,
                           asc_result** out_result);

/* ---- results ------------------------------------------------------------ */

void asc_result_destroy(asc_result* result);
int asc_result_report_json(const asc_result* result, char** out_json);
int asc_result_chosen_k(const asc_result* result);

/* Per-point (cluster) or per-pixel (segment) labels. */
size_t asc_result_label_count(const asc_result* result);
int asc_result_copy_labels(const asc_result* result, int32_t* out, size_t capacity);

/* Image dimensions of a segmentation result; width = height = 0 for point runs. */
int asc_result_image_size(const asc_result* result, int32_t* out_width, int32_t* out_height);

/* ---- evaluation ---------------------------------------------------------- */

/* Compares two labelings loaded from files (.csv label grids, or .png/.ppm
 * images whose distinct colors are treated as segment labels). metrics_csv is
 * a comma-separated subset of f,covering,pri,vi,accuracy — NULL or "" selects
 * every metric applicable to the inputs. Returns a JSON document. */
int asc_evaluate_files(const char* pred_path, const char* gt_path, const char* metrics_csv,
                       char** out_json);

int asc_evaluate_labels(const int32_t* pred, const int32_t* gt, size_t count,
                        const char* metrics_csv, char** out_json);

/* ---- seed sweeps --------------------------------------------------------- */

/* Runs the point pipeline for `runs` consecutive seeds starting at base_seed
 * (jobs > 1 runs them concurrently) and returns the aggregate JSON document.
 * When the CSV carries a label column, best-match accuracy is aggregated. */
int asc_sweep_points_file(const char* points_csv_path, const asc_config* config, int64_t base_seed,
                          int runs, int jobs, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* ASC_H */
