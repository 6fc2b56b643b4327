#ifndef SENSEGAN_H
#define SENSEGAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum SgStatus {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_POINTER = 1,
  SG_STATUS_INVALID_INPUT = 2,
  SG_STATUS_SHAPE_MISMATCH = 3,
  SG_STATUS_MALFORMED_FILE = 4,
  SG_STATUS_CONFIG = 5,
  SG_STATUS_IO = 6,
  SG_STATUS_PANIC = 7,
} SgStatus;

typedef enum SgClassifierKind {
  SG_CLASSIFIER_KIND_RANDOM_FOREST = 0,
  SG_CLASSIFIER_KIND_SVM_RBF = 1,
} SgClassifierKind;

// A trained spectrum-sensing classifier.
typedef struct SgClassifier SgClassifier;

// A labeled set of received frames.
typedef struct SgDataset SgDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL if none. The
// pointer stays valid until the next failing call on the same thread.
const char *sg_last_error(void);

// Library version as a static NUL-terminated string.
const char *sg_version(void);

// Generates `n_samples` frames with the default OFDM settings, alternating
// labels 0 and 1, through a Rayleigh channel with `n_taps` taps of total
// variance `variance` at `snr_db`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum SgStatus sg_dataset_generate(size_t n_samples,
                                  double snr_db,
                                  double variance,
                                  size_t n_taps,
                                  uint64_t seed,
                                  struct SgDataset **out);

// Reads a SIQD file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum SgStatus sg_dataset_read(const char *path, struct SgDataset **out);

// Writes a SIQD file atomically.
//
// # Safety
// `ds` must be a live dataset handle; `path` a NUL-terminated string.
enum SgStatus sg_dataset_write(const struct SgDataset *ds, const char *path);

// Number of frames, or 0 for a null handle.
//
// # Safety
// `ds` must be null or a live dataset handle.
size_t sg_dataset_len(const struct SgDataset *ds);

// Real features per frame (interleaved I and Q), or 0 for a null handle.
//
// # Safety
// `ds` must be null or a live dataset handle.
size_t sg_dataset_feature_len(const struct SgDataset *ds);

// Copies the feature matrix, row-major, into `buf` of `len` doubles;
// `len` must equal frames times features.
//
// # Safety
// `ds` must be a live dataset handle; `buf` must hold `len` doubles.
enum SgStatus sg_dataset_features(const struct SgDataset *ds, double *buf, size_t len);

// Copies the labels (0 or 1) into `buf` of `len` bytes; `len` must equal
// the frame count.
//
// # Safety
// `ds` must be a live dataset handle; `buf` must hold `len` bytes.
enum SgStatus sg_dataset_labels(const struct SgDataset *ds, uint8_t *buf, size_t len);

// Releases a dataset. Null is ignored.
//
// # Safety
// `ds` must be null or a handle not yet freed.
void sg_dataset_free(struct SgDataset *ds);

// Trains a classifier with default hyperparameters.
//
// # Safety
// `ds` must be a live dataset handle; `out` must be writable.
enum SgStatus sg_classifier_train(enum SgClassifierKind kind,
                                  const struct SgDataset *ds,
                                  uint64_t seed,
                                  struct SgClassifier **out);

// Predicts labels for `rows` feature rows of width `cols` stored row-major
// in `features`, writing one byte per row to `labels`.
//
// # Safety
// `clf` must be a live handle; `features` must hold `rows * cols` doubles
// and `labels` `rows` bytes.
enum SgStatus sg_classifier_predict(const struct SgClassifier *clf,
                                    const double *features,
                                    size_t rows,
                                    size_t cols,
                                    uint8_t *labels);

// Fraction of `ds` the classifier labels correctly.
//
// # Safety
// `clf` and `ds` must be live handles; `out` must be writable.
enum SgStatus sg_classifier_accuracy(const struct SgClassifier *clf,
                                     const struct SgDataset *ds,
                                     double *out);

// Writes an SCLF file atomically.
//
// # Safety
// `clf` must be a live handle; `path` a NUL-terminated string.
enum SgStatus sg_classifier_save(const struct SgClassifier *clf, const char *path);

// Reads an SCLF file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum SgStatus sg_classifier_load(const char *path, struct SgClassifier **out);

// Releases a classifier. Null is ignored.
//
// # Safety
// `clf` must be null or a handle not yet freed.
void sg_classifier_free(struct SgClassifier *clf);

// Trains a CGAN on `train_ds` for `epochs` epochs, adds
// `round(synth_multiplier * n_train)` label-balanced synthetic rows, and
// scores a real-only and an augmented classifier on `test_ds`.
//
// # Safety
// `train_ds` and `test_ds` must be live handles; `baseline` and
// `augmented` must be writable.
enum SgStatus sg_augment(const struct SgDataset *train_ds,
                         const struct SgDataset *test_ds,
                         enum SgClassifierKind kind,
                         double synth_multiplier,
                         size_t epochs,
                         uint64_t seed,
                         double *baseline,
                         double *augmented);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SENSEGAN_H */
