#ifndef EPI_GHOST_H
#define EPI_GHOST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Resampling modes for [`eg_apply_ir`].
#define EG_IR_LITERAL 0

#define EG_IR_CENTERED_AVERAGE 1

typedef enum EgStatus {
  EG_STATUS_OK = 0,
  EG_STATUS_IO = 1,
  EG_STATUS_FORMAT = 2,
  EG_STATUS_CONFIG = 3,
  EG_STATUS_NUMERIC = 4,
  // A required pointer argument was null.
  EG_STATUS_NULL_POINTER = 5,
  // The caller's buffer is too small.
  EG_STATUS_BUFFER_TOO_SMALL = 6,
  // An internal panic was caught at the boundary.
  EG_STATUS_PANIC = 7,
} EgStatus;

// Real-valued magnitude image.
typedef struct EgImage EgImage;

// k-space, hybrid or image-domain samples with their acquisition metadata.
typedef struct EgKSpace EgKSpace;

// Simulation of a centered disk phantom. `xphase_poly` may be null when
// `xphase_len` is 0.
typedef struct EgSimParams {
  size_t size;
  double radius;
  double phase_even;
  const double *xphase_poly;
  size_t xphase_len;
  int64_t shift_even;
  double noise_sigma;
  uint32_t averages;
  uint64_t seed;
} EgSimParams;

// Signal and noise regions for GSR/SNR. Sizes are (height, width); the
// noise corner is 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right.
typedef struct EgRoi {
  size_t signal_row;
  size_t signal_col;
  size_t signal_height;
  size_t signal_width;
  uint8_t noise_corner;
  size_t noise_height;
  size_t noise_width;
} EgRoi;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread.
const char *eg_last_error(void);

// Library version as a static NUL-terminated string.
const char *eg_version(void);

// Builds k-space from `2 * n_cols * n_rows` interleaved doubles. `domain`
// is 0 (kx, ky), 1 (x, ky) or 2 (x, y).
//
// # Safety
// `data` must point to `2 * n_cols * n_rows` readable doubles and `out`
// must be writable.
enum EgStatus eg_kspace_new(size_t n_cols,
                            size_t n_rows,
                            const double *data,
                            uint8_t domain,
                            bool reversal_applied,
                            struct EgKSpace **out);

// # Safety
// `k` must be null or a handle from this library that is not used again.
void eg_kspace_free(struct EgKSpace *k);

// # Safety
// All pointers must be valid.
enum EgStatus eg_kspace_dims(const struct EgKSpace *k, size_t *n_cols, size_t *n_rows);

// Domain tag and reversal flag of `k`.
//
// # Safety
// All pointers must be valid.
enum EgStatus eg_kspace_info(const struct EgKSpace *k, uint8_t *domain, bool *reversal_applied);

// Copies samples as interleaved doubles; `len` counts doubles and must be
// at least `2 * n_cols * n_rows`.
//
// # Safety
// `out` must point to `len` writable doubles.
enum EgStatus eg_kspace_copy_data(const struct EgKSpace *k, double *out, size_t len);

// Reads an EPIK file and its metadata sidecar, if present.
//
// # Safety
// `path` must be a NUL-terminated string and `out` writable.
enum EgStatus eg_kspace_read(const char *path, struct EgKSpace **out);

// Writes an EPIK file and its metadata sidecar.
//
// # Safety
// `k` must be a valid handle and `path` a NUL-terminated string.
enum EgStatus eg_kspace_write(const struct EgKSpace *k, const char *path);

// Simulates imaging, reference and error-free scans. `out_truth` may be
// null.
//
// # Safety
// `params` must be valid, including `xphase_len` readable doubles at
// `xphase_poly`; output pointers must be writable.
enum EgStatus eg_simulate(const struct EgSimParams *params,
                          struct EgKSpace **out_formal,
                          struct EgKSpace **out_ref,
                          struct EgKSpace **out_truth);

// Reference-scan phase correction of the even lines.
//
// # Safety
// Handles must be valid and `out` writable.
enum EgStatus eg_correct_ref(const struct EgKSpace *formal,
                             const struct EgKSpace *reference,
                             struct EgKSpace **out);

// Peak-alignment correction. `delta_p` (may be null) receives the applied
// even-line shift.
//
// # Safety
// `formal` must be valid and `out` writable.
enum EgStatus eg_correct_pa(const struct EgKSpace *formal, struct EgKSpace **out, int64_t *delta_p);

// Interpolation and resampling along kx. `mode` is [`EG_IR_LITERAL`] or
// [`EG_IR_CENTERED_AVERAGE`].
//
// # Safety
// `k` must be valid and `out` writable.
enum EgStatus eg_apply_ir(const struct EgKSpace *k,
                          size_t interp_factor,
                          uint8_t mode,
                          size_t passes,
                          struct EgKSpace **out);

// Magnitude image of `k`, transforming whichever axes are still in
// frequency space.
//
// # Safety
// `k` must be valid and `out` writable.
enum EgStatus eg_reconstruct(const struct EgKSpace *k, struct EgImage **out);

// # Safety
// `img` must be null or a handle from this library that is not used again.
void eg_image_free(struct EgImage *img);

// # Safety
// All pointers must be valid.
enum EgStatus eg_image_dims(const struct EgImage *img, size_t *n_cols, size_t *n_rows);

// Copies pixels row-major; `len` must be at least `n_cols * n_rows`.
//
// # Safety
// `out` must point to `len` writable doubles.
enum EgStatus eg_image_copy_data(const struct EgImage *img, double *out, size_t len);

// Default ROIs for an image of the given size.
//
// # Safety
// `out` must be writable.
enum EgStatus eg_default_roi(size_t n_cols, size_t n_rows, struct EgRoi *out);

// # Safety
// All pointers must be valid.
enum EgStatus eg_gsr(const struct EgImage *img, const struct EgRoi *roi, double *out);

// SNR; a noise-free background yields positive infinity.
//
// # Safety
// All pointers must be valid.
enum EgStatus eg_snr(const struct EgImage *img, const struct EgRoi *roi, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPI_GHOST_H */
