/* lupi - learning using privileged information: detection models trained on
 * features that are unavailable at run-time.
 *
 * C API over the C++ core. All objects are opaque handles created and
 * destroyed by this library; every fallible call returns a lupi_status and
 * leaves a human-readable message in lupi_last_error() on failure.
 * Row-major double buffers are used for all matrix arguments.
 */
#ifndef LUPI_H
#define LUPI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lupi_status {
    LUPI_OK = 0,
    LUPI_ERR_INVALID_ARG = 1, /* bad parameters / usage */
    LUPI_ERR_DATA = 2,        /* unparsable or inconsistent data */
    LUPI_ERR_IO = 3,          /* missing or unwritable files */
    LUPI_ERR_NUMERIC = 4      /* solver or training failure */
} lupi_status;

/* Thread-local message describing the most recent failure in this thread. */
const char* lupi_last_error(void);

typedef struct lupi_dataset lupi_dataset;
typedef struct lupi_model lupi_model;

/* ------------------------------------------------------------------ */
/* datasets                                                            */

/* Delimiter-separated table + sidecar schema (header name = role, with
 * roles standard/privileged/label/ignore). */
lupi_status lupi_dataset_load(const char* data_path, const char* schema_path,
                              lupi_dataset** out);

/* scenario: "gauss2d" or "latent-lupi". */
lupi_status lupi_dataset_synth(const char* scenario, int n, double noise_std_standard,
                               double noise_std_privileged, double outlier_fraction,
                               uint64_t seed, lupi_dataset** out);

lupi_status lupi_dataset_save(const lupi_dataset* ds, const char* data_path,
                              const char* schema_path);

lupi_status lupi_dataset_dims(const lupi_dataset* ds, int* n_rows, int* n_standard,
                              int* n_privileged, int* n_classes);

/* Copies the standard block (n_rows x n_standard, row-major) into buf. */
lupi_status lupi_dataset_standard(const lupi_dataset* ds, double* buf, size_t buf_len);
lupi_status lupi_dataset_privileged(const lupi_dataset* ds, double* buf, size_t buf_len);
/* Labels in dataset encoding: -1/+1 binary, class index otherwise. */
lupi_status lupi_dataset_labels(const lupi_dataset* ds, int* buf, size_t buf_len);

void lupi_dataset_free(lupi_dataset* ds);

/* ------------------------------------------------------------------ */
/* training                                                            */

typedef enum lupi_kernel_family {
    LUPI_KERNEL_LINEAR = 0,
    LUPI_KERNEL_POLYNOMIAL = 1,
    LUPI_KERNEL_RBF = 2
} lupi_kernel_family;

typedef struct lupi_kernel {
    int family;   /* lupi_kernel_family */
    int degree;   /* polynomial */
    double gamma; /* rbf width / polynomial scale */
    double coef0; /* polynomial offset */
} lupi_kernel;

/* Soft-margin SVM on the standard block; use_complete != 0 appends the
 * privileged columns (the complete-set baseline, which then needs them at
 * prediction time too). */
lupi_status lupi_train_svm(const lupi_dataset* ds, lupi_kernel kernel, double C,
                           int use_complete, lupi_model** out);

/* SVM+ (model influence). Prediction uses standard features only. */
lupi_status lupi_train_svmplus(const lupi_dataset* ds, lupi_kernel kernel_standard,
                               lupi_kernel kernel_privileged, double kappa, double gamma,
                               double C, double tol, lupi_model** out);

/* Knowledge transfer: mapping_kind 0 = regression, 1 = similarity. */
lupi_status lupi_train_kt(const lupi_dataset* ds, int mapping_kind, int max_degree,
                          int k_neighbors, int top_p_columns, lupi_kernel downstream_kernel,
                          double C, lupi_model** out);

/* Generalized distillation: teacher on privileged features, student on
 * standard features against the lambda-weighted hard/soft objective. */
lupi_status lupi_train_distill(const lupi_dataset* ds, const int* hidden_sizes, int n_hidden,
                               double temperature, double lambda, int epochs, int batch_size,
                               double learning_rate, uint64_t seed, lupi_model** out);

/* ------------------------------------------------------------------ */
/* models                                                              */

/* rows: n_rows x n_cols row-major. labels_out: n_rows ints. raw_out may be
 * NULL; when given it receives the raw decision value per row (margin or
 * binary logit difference). */
lupi_status lupi_model_predict(const lupi_model* model, const double* rows, int n_rows,
                               int n_cols, int* labels_out, double* raw_out);

lupi_status lupi_model_input_dim(const lupi_model* model, int* dim);

/* Writes the kind ("svm", "svmplus", "kt", "distill", "net") into buf. */
lupi_status lupi_model_kind(const lupi_model* model, char* buf, size_t buf_len);

lupi_status lupi_model_save(const lupi_model* model, const char* path);
lupi_status lupi_model_load(const char* path, lupi_model** out);

void lupi_model_free(lupi_model* model);

/* ------------------------------------------------------------------ */
/* pipelines (the CLI entry points)                                    */

/* Runs the experiment described by a flat key-value config file: trains the
 * configured approach and its standard-set baseline under seeded stratified
 * cross-validation, writes report.csv, summary.txt and the final models
 * into the config's output directory (or out_dir_override when non-NULL).
 * The human-readable summary is returned through summary_out. */
lupi_status lupi_run_experiment(const char* config_path, const char* out_dir_override,
                                int jobs, char** summary_out);

/* Greedy privileged-feature selection; returns the report text. */
lupi_status lupi_run_select(const char* config_path, char** report_out);

/* Decision-value dump over a regular nx x ny grid for a 2-D model:
 * CSV with header x,y,value. */
lupi_status lupi_boundary_grid(const lupi_model* model, double xmin, double xmax, double ymin,
                               double ymax, int nx, int ny, char** csv_out);

/* Frees strings returned through char** out-parameters. */
void lupi_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LUPI_H */
