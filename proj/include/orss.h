/* orss — online row sampling for spectral approximation.
 *
 * C interface of the shared library. All functions return orss_status;
 * ORSS_OK is 0 and orss_last_error() describes the most recent failure on
 * the calling thread. Buffers returned through double** are allocated by the
 * library and must be released with orss_free().
 *
 * Rows are always row-major double arrays of a fixed dimension d. Kept-row
 * buffers and files store rows with the 1/sqrt(p) rescale already applied;
 * the per-row weight (the applied rescale) is carried alongside for audit.
 */
#ifndef ORSS_H
#define ORSS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum orss_status {
  ORSS_OK = 0,
  ORSS_ERR_INVALID_ARGUMENT = 1,
  ORSS_ERR_DIMENSION_MISMATCH = 2,
  ORSS_ERR_NONFINITE = 3,
  ORSS_ERR_IO = 4,
  ORSS_ERR_PARSE = 5,
  ORSS_ERR_INVARIANT = 6,
  ORSS_ERR_UNKNOWN = 7
} orss_status;

typedef enum orss_algorithm {
  ORSS_ALGO_ONLINE = 0,
  ORSS_ALGO_SLIM = 1,
  ORSS_ALGO_BSS = 2,
  ORSS_ALGO_OFFLINE = 3
} orss_algorithm;

/* Per-row sampling outcome. kept rows satisfy rescale = 1/sqrt(probability);
 * probability 1 always keeps, probability 0 (a zero row) always discards. */
typedef struct orss_decision {
  int32_t kept;
  double probability;
  double rescale;
  double score_used;
} orss_decision;

typedef struct orss_summary {
  int64_t rows_seen;
  int64_t rows_kept;
  double sum_scores;
  int64_t peak_working_rows;
} orss_summary;

typedef struct orss_certificate {
  double min_eig;
  double max_eig;
  double eps;
  double delta;
  int32_t passed;
  int64_t kept_rows;
  double bound_rows;
} orss_certificate;

const char* orss_version(void);

/* Human-readable detail for the most recent error on this thread. */
const char* orss_last_error(void);

const char* orss_status_name(orss_status status);

void orss_free(void* ptr);

/* ---- streaming samplers -------------------------------------------------
 * init/step/finish interface. Decisions are irrevocable; kept rows can be
 * reconstructed by the caller as row * rescale, or retrieved at the end when
 * buffering is enabled (it is on by default; disable it for pure streaming).
 * The offline baseline needs the whole matrix and lives in orss_offline_run.
 */
typedef struct orss_sampler orss_sampler;

orss_status orss_sampler_create(orss_algorithm algorithm, int32_t d,
                                double eps, double delta, uint64_t seed,
                                orss_sampler** out_sampler);
orss_status orss_sampler_set_buffering(orss_sampler* sampler, int32_t enabled);
orss_status orss_sampler_step(orss_sampler* sampler, const double* row,
                              int32_t d, orss_decision* out_decision);
/* Scores a block against the kept state frozen at the block boundary using a
 * random-sign sketch of sketch_dim columns (exact when sketch_dim >= d),
 * then samples each row with the resulting probabilities. out_decisions must
 * hold block_len entries. Online algorithm only. */
orss_status orss_sampler_step_block(orss_sampler* sampler, const double* rows,
                                    int64_t block_len, int32_t d,
                                    int32_t sketch_dim,
                                    orss_decision* out_decisions);
orss_status orss_sampler_summary(const orss_sampler* sampler,
                                 orss_summary* out_summary);
int64_t orss_sampler_kept_count(const orss_sampler* sampler);
/* Copies buffered kept rows (rescale applied) and weights; out_rows needs
 * kept_count * d doubles, out_weights kept_count doubles (either may be
 * NULL to skip). */
orss_status orss_sampler_copy_kept(const orss_sampler* sampler,
                                   double* out_rows, double* out_weights);
void orss_sampler_destroy(orss_sampler* sampler);

/* One-shot independent-sampling baseline over a full matrix. */
orss_status orss_offline_run(const double* rows, int64_t n, int32_t d,
                             double eps, double delta, uint64_t seed,
                             double** out_kept_rows, double** out_weights,
                             int64_t* out_kept, orss_summary* out_summary);

/* ---- scores and verification ------------------------------------------- */

typedef enum orss_score_mode {
  ORSS_SCORES_ONLINE = 0,    /* row i against rows 1..i-1 */
  ORSS_SCORES_INCLUSIVE = 1, /* row i against rows 1..i */
  ORSS_SCORES_OFFLINE = 2    /* every row against the full matrix */
} orss_score_mode;

/* out_scores must hold n doubles; out_sum and out_spectral_norm_sq may be
 * NULL. Scores are ridge leverage scores at the given lambda, clamped to 1. */
orss_status orss_ridge_scores(const double* rows, int64_t n, int32_t d,
                              double lambda, orss_score_mode mode,
                              double* out_scores, double* out_sum,
                              double* out_spectral_norm_sq);

/* Deterministic bound 2 d ln(1 + spectral_norm_sq / lambda). */
orss_status orss_score_sum_bound(int32_t d, double spectral_norm_sq,
                                 double lambda, double* out_bound);

/* Sandwich certificate for kept rows (rescale applied) against the original
 * matrix. */
orss_status orss_certify(const double* original_rows, int64_t n, int32_t d,
                         const double* kept_rows, int64_t kept, double eps,
                         double delta, orss_certificate* out_certificate);

/* ---- generators --------------------------------------------------------- */

orss_status orss_gen_gaussian(int64_t n, int32_t d, uint64_t seed,
                              double** out_rows);

/* Complete-graph incidence stream: `copies` cliques on d vertices, edges in
 * lexicographic order, edge weight base_weight doubling per copy when
 * `doubling` is nonzero. Writes copies * d * (d-1) / 2 rows. */
orss_status orss_gen_cliques(int32_t d, int32_t copies, double base_weight,
                             int32_t doubling, double** out_rows,
                             int64_t* out_n);

/* base_weight = delta / (d * eps): first copy's Laplacian has all nonzero
 * eigenvalues equal to delta / eps. */
orss_status orss_clique_base_weight(int32_t d, double eps, double delta,
                                    double* out_weight);

orss_status orss_permute(const double* rows, int64_t n, int32_t d,
                         uint64_t seed, double** out_rows);

/* ---- row files -----------------------------------------------------------
 * Text: header "d=<int>", one comma-separated row per line (trailing weight
 * field on weighted files). Binary: magic "ORSS", u32 version=1, u32 d,
 * little-endian f64 rows row-major, weighted files append one f64 weight per
 * row after the row section.
 */
typedef enum orss_format {
  ORSS_FORMAT_AUTO = 0, /* write: by extension (.csv/.txt text); read: sniffed */
  ORSS_FORMAT_TEXT = 1,
  ORSS_FORMAT_BINARY = 2
} orss_format;

orss_status orss_write_rows(const char* path, orss_format format,
                            const double* rows, int64_t n, int32_t d,
                            const double* weights /* NULL for none */);

/* with_weights tells the binary reader whether the trailing weight section is
 * present; text files are self-describing. out_weights may be NULL. */
orss_status orss_read_rows(const char* path, int32_t with_weights,
                           double** out_rows, int64_t* out_n, int32_t* out_d,
                           double** out_weights);

/* Streaming reader: rows surface one at a time in O(d) memory. */
typedef struct orss_reader orss_reader;
orss_status orss_reader_open(const char* path, int32_t with_weights,
                             orss_reader** out_reader, int32_t* out_d);
/* *out_has_row is 1 and `row` is filled while rows remain, else 0.
 * out_weight may be NULL. */
orss_status orss_reader_next(orss_reader* reader, double* row,
                             double* out_weight, int32_t* out_has_row);
void orss_reader_close(orss_reader* reader);

/* Streaming writer counterpart. */
typedef struct orss_writer orss_writer;
orss_status orss_writer_open(const char* path, orss_format format, int32_t d,
                             int32_t with_weights, orss_writer** out_writer);
orss_status orss_writer_row(orss_writer* writer, const double* row,
                            double weight);
/* Flushes, closes and destroys the writer (also on failure). */
orss_status orss_writer_close(orss_writer* writer);

#ifdef __cplusplus
}
#endif

#endif /* ORSS_H */
