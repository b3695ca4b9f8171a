#ifndef QPN_QPN_H
#define QPN_QPN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qpn_status {
  QPN_OK = 0,
  QPN_ERR_PARAMETER = 1,
  QPN_ERR_PARSE = 2,
  QPN_ERR_IO = 3,
  QPN_ERR_CAPABILITY = 4,
  QPN_ERR_TRUNCATION = 5,
  QPN_ERR_RESOLUTION = 6,
  QPN_ERR_COVERAGE = 7,
  QPN_ERR_ZERO_WEIGHT = 8,
  QPN_ERR_RANGE = 9,
  QPN_ERR_CONTRACT = 10,
  QPN_ERR_INTERNAL = 11
} qpn_status;

typedef struct qpn_filter qpn_filter;
typedef struct qpn_state qpn_state;
typedef struct qpn_process qpn_process;
typedef struct qpn_grid qpn_grid;
typedef struct qpn_dataset qpn_dataset;
typedef struct qpn_pnqd_table qpn_pnqd_table;

typedef enum qpn_layout { QPN_LAYOUT_SQUARE = 0, QPN_LAYOUT_RADIAL = 1 } qpn_layout;

typedef struct qpn_grid_spec {
  qpn_layout layout;
  double half_width; /* r_max for radial grids */
  int nx;
  int ny; /* 1 for radial grids */
} qpn_grid_spec;

typedef struct qpn_negativity {
  double min_value;
  double argmin_re, argmin_im;
  int has_significance;
  double significance;
  int nonclassical;
} qpn_negativity;

/* Message of the last failed call on this thread ("" if none). */
const char* qpn_last_error(void);
const char* qpn_status_name(qpn_status s);
const char* qpn_version(void);
/* Frees strings returned through char** out-parameters. */
void qpn_string_free(char* s);

/* Filters */
qpn_status qpn_filter_build(double width, double tol, qpn_filter** out);
void qpn_filter_free(qpn_filter* f);
qpn_status qpn_filter_b_max(const qpn_filter* f, double* out);
qpn_status qpn_filter_value(const qpn_filter* f, double b, double* out);
qpn_status qpn_filter_fourier(const qpn_filter* f, const double* r, size_t n, double* out);
qpn_status qpn_filter_write(const qpn_filter* f, const char* path);

/* States and processes, built from text descriptors */
qpn_status qpn_state_parse(const char* descriptor, qpn_state** out);
void qpn_state_free(qpn_state* s);
qpn_status qpn_state_describe(const qpn_state* s, char** out);
qpn_status qpn_state_mean_photon_number(const qpn_state* s, double* out);

qpn_status qpn_process_parse(const char* descriptor, qpn_process** out);
void qpn_process_free(qpn_process* p);
/* Normalized output for a coherent input and the unnormalized trace. */
qpn_status qpn_process_apply(const qpn_process* p, double alpha_re, double alpha_im, qpn_state** out, double* weight);
qpn_status qpn_process_weight(const qpn_process* p, double a, double* out);
qpn_status qpn_fixed_point_check(const qpn_process* p, double nbar, int cutoff, double* trace_distance);
qpn_status qpn_classicality_threshold(double nbar, double* gt);

/* Grids. Specs are `square:hw=4,n=81` (or nx=,ny=) and `radial:r=3,n=61`. */
qpn_status qpn_grid_spec_parse(const char* text, qpn_grid_spec* out);
qpn_status qpn_nqd_direct(const qpn_state* s, const qpn_filter* f, const qpn_grid_spec* g, qpn_grid** out);
qpn_status qpn_pnqd_direct(const qpn_process* p, double alpha_re, double alpha_im, const qpn_filter* f,
                           const qpn_grid_spec* g, qpn_grid** out);
qpn_status qpn_pnqd_phase_randomized(const qpn_process* p, double a, const qpn_filter* f, const qpn_grid_spec* g,
                                     qpn_grid** out);
qpn_status qpn_grid_read(const char* path, qpn_grid** out);
qpn_status qpn_grid_write(const qpn_grid* g, const char* path);
void qpn_grid_free(qpn_grid* g);
size_t qpn_grid_size(const qpn_grid* g);
qpn_status qpn_grid_spec_of(const qpn_grid* g, qpn_grid_spec* out);
qpn_status qpn_grid_point(const qpn_grid* g, size_t i, double* re, double* im);
/* Borrowed arrays of qpn_grid_size() entries; NULL when the column is absent. */
const double* qpn_grid_values(const qpn_grid* g);
const double* qpn_grid_stat_err(const qpn_grid* g);
const double* qpn_grid_sys_err(const qpn_grid* g);
qpn_status qpn_grid_mass(const qpn_grid* g, double* out);
qpn_status qpn_grid_source(const qpn_grid* g, char** out);
qpn_status qpn_grid_negativity(const qpn_grid* g, double threshold, qpn_negativity* out);

/* Homodyne datasets */
qpn_status qpn_default_phases(int k, double* out);
/* alpha_tag: NULL or two doubles (re, im). */
qpn_status qpn_dataset_simulate(const qpn_state* s, const double* phases, size_t n_phases, size_t n_per_phase,
                                double eta, uint64_t seed, const double* alpha_tag, qpn_dataset** out);
qpn_status qpn_dataset_read(const char* path, qpn_dataset** out);
qpn_status qpn_dataset_write(const qpn_dataset* d, const char* path);
void qpn_dataset_free(qpn_dataset* d);
size_t qpn_dataset_size(const qpn_dataset* d);
qpn_status qpn_dataset_sample(const qpn_dataset* d, size_t i, double* x, double* phi);
qpn_status qpn_dataset_eta(const qpn_dataset* d, double* out);

/* Pattern-function estimation */
qpn_status qpn_pattern_fn(double x, double phi, double beta_re, double beta_im, const qpn_filter* f, double* out);
qpn_status qpn_sample_nqd(const qpn_dataset* d, const qpn_grid_spec* g, double width, double tol,
                          int phase_randomized, int remove_eta, qpn_grid** out);
qpn_status qpn_pnqd_sample(const qpn_dataset* const* datasets, size_t n, const qpn_grid_spec* g, double width,
                           double tol, int phase_randomized, qpn_pnqd_table** out);
qpn_status qpn_pnqd_table_write(const qpn_pnqd_table* t, const char* dir, const char* stem, char** index_path);
qpn_status qpn_pnqd_table_read(const char* index_path, qpn_pnqd_table** out);
void qpn_pnqd_table_free(qpn_pnqd_table* t);
size_t qpn_pnqd_table_size(const qpn_pnqd_table* t);

/* Output prediction. The process weight enters through its descriptor. */
qpn_status qpn_predict(const qpn_pnqd_table* t, const char* input, const qpn_process* p, qpn_grid** out);
qpn_status qpn_parseval(const qpn_process* p, const qpn_state* input, const qpn_filter* f, const qpn_grid_spec* g,
                        qpn_grid** out);

/* Recipes: name is fig1..fig5 or custom; overrides is NULL or a JSON object. */
qpn_status qpn_recipe_run(const char* name, const char* overrides, const char* out_dir, char** manifest);

#ifdef __cplusplus
}
#endif

#endif
