/*
 * mmbridge — cross-modal associative memory bridge, C API.
 *
 * A pair of modality-specific key/value memories is trained end to end so
 * that target-modality features can be recalled from memory using only
 * source-modality input. This header is the stable shared-library surface:
 * opaque handles, status codes, and UTF-8 JSON/CSV strings. Every string
 * returned through a char** out-parameter is heap-allocated and must be
 * released with mmb_string_free().
 *
 * Thread safety: handles are immutable after creation and may be shared
 * across threads for reads; creation/destruction of a handle must not race
 * with its use. mmb_last_error() is thread-local.
 */

#ifndef MMBRIDGE_H
#define MMBRIDGE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmb_status {
  MMB_OK = 0,
  MMB_ERR_VALIDATION = 1, /* bad config, arguments, or incompatible inputs */
  MMB_ERR_NUMERIC = 2,    /* non-finite values, failed numeric checks */
  MMB_ERR_IO = 3,         /* unreadable/unwritable or corrupted files */
  MMB_ERR_INTERNAL = 4
} mmb_status;

/* One dataset split (train or test) with its embedded config echo. */
typedef struct mmb_dataset mmb_dataset;
/* Trained parameters plus the effective config they were trained under. */
typedef struct mmb_model mmb_model;

const char* mmb_version(void);

/* Message for the most recent failing call on this thread; empty string if
 * none. The pointer stays valid until the next failing call. */
const char* mmb_last_error(void);

void mmb_string_free(char* s);

/* Validates base_json (NULL or empty means all defaults), applies
 * overrides_json on top (may be NULL), rejects unknown keys, and returns
 * the fully-populated effective config document. */
mmb_status mmb_config_resolve(const char* base_json, const char* overrides_json,
                              char** effective_json_out);

/* ---- datasets ------------------------------------------------------- */

mmb_status mmb_dataset_generate(const char* effective_config_json,
                                mmb_dataset** train_out, mmb_dataset** test_out);

mmb_status mmb_dataset_save(const mmb_dataset* dataset, const char* path);

mmb_status mmb_dataset_open(const char* path, mmb_dataset** out);

void mmb_dataset_close(mmb_dataset* dataset);

/* JSON summary of a train/test pair: sizes, spec echo, and the
 * nearest-centroid oracle accuracy of each raw modality. */
mmb_status mmb_dataset_summary(const mmb_dataset* train, const mmb_dataset* test,
                               char** json_out);

/* ---- training ------------------------------------------------------- */

/* Runs the end-to-end training loop. checkpoint_path and metrics_csv_path
 * are written when non-NULL. progress != 0 prints one line per epoch to
 * stderr. Returns a JSON run summary (final losses and accuracies). */
mmb_status mmb_train(const char* effective_config_json, const mmb_dataset* train,
                     const mmb_dataset* test, const char* checkpoint_path,
                     const char* metrics_csv_path, int progress,
                     char** summary_json_out);

/* ---- models and evaluation ------------------------------------------ */

mmb_status mmb_model_open(const char* checkpoint_path, mmb_model** out);

void mmb_model_close(mmb_model* model);

/* Effective config the model was trained under. */
mmb_status mmb_model_config(const mmb_model* model, char** config_json_out);

/* mode is "recall", "oracle", or "baseline". Recall mode reads no
 * target-modality data. Any of the three out-parameters may be NULL. */
mmb_status mmb_evaluate(const mmb_model* model, const mmb_dataset* data,
                        const char* mode, char** report_json_out,
                        char** report_text_out, char** report_csv_out);

/* Addressing-vector similarity study over at most max_per_class probes per
 * class: same-class vs cross-class per-step cosine means, plus the per-pair
 * listing as CSV. */
mmb_status mmb_analyze(const mmb_model* model, const mmb_dataset* data,
                       int max_per_class, char** report_text_out,
                       char** pairs_csv_out);

/* ---- slot-count ablation -------------------------------------------- */

/* slots_csv like "0,16,32,64", seeds_csv like "0,1,2". Trains one model per
 * (slots, seed) and reports seed-mean accuracy per slot count. */
mmb_status mmb_ablate(const char* effective_config_json, const mmb_dataset* train,
                      const mmb_dataset* test, const char* slots_csv,
                      const char* seeds_csv, int progress,
                      char** table_text_out, char** table_csv_out);

/* ---- gradient checks ------------------------------------------------- */

/* Finite-difference validation of every loss path. all_passed_out receives
 * 1 when every case meets the 1e-4 relative-error tolerance. */
mmb_status mmb_gradcheck(uint64_t seed, int num_seeds, int max_dim,
                         char** report_text_out, int* all_passed_out);

#ifdef __cplusplus
}
#endif

#endif /* MMBRIDGE_H */
