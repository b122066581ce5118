#ifndef DIFFUSE_H
#define DIFFUSE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Embedding variant for [`diffuse_dm_embed`] and [`diffuse_db_embed`].
 */
typedef enum {
  /*
   DM: eigenvectors of P computed directly. DB: project onto the right eigenvectors of P.
   */
  DIFFUSE_VARIANT_PLAIN = 0,
  /*
   Eigenvectors obtained through the symmetric conjugate.
   */
  DIFFUSE_VARIANT_MODIFIED = 1,
} DiffuseVariant;

/*
 Result code of every call.
 */
typedef enum {
  DIFFUSE_STATUS_OK = 0,
  DIFFUSE_STATUS_NULL_POINTER = 1,
  DIFFUSE_STATUS_INVALID_INPUT = 2,
  DIFFUSE_STATUS_ZERO_DEGREE = 3,
  DIFFUSE_STATUS_CONVERGENCE_FAILURE = 4,
  DIFFUSE_STATUS_DEGENERATE_LEAD_VECTOR = 5,
  DIFFUSE_STATUS_NO_LINEAR_REGION = 6,
  DIFFUSE_STATUS_SMALL_EIGENVALUE = 7,
  DIFFUSE_STATUS_EMPTY_SELECTION = 8,
  DIFFUSE_STATUS_TOO_FEW_PIXELS = 9,
  DIFFUSE_STATUS_WINDOW_TOO_LARGE = 10,
  DIFFUSE_STATUS_BLOCK_TOO_SMALL = 11,
  DIFFUSE_STATUS_INVALID_PARTITION = 12,
  DIFFUSE_STATUS_HEADER_MISMATCH = 13,
  DIFFUSE_STATUS_SIZE_MISMATCH = 14,
  DIFFUSE_STATUS_BAD_MAGIC = 15,
  DIFFUSE_STATUS_IO = 16,
  DIFFUSE_STATUS_FORMAT = 17,
  DIFFUSE_STATUS_PANIC = 18,
} DiffuseStatus;

/*
 Hyper-spectral cube.
 */
typedef struct DiffuseCube DiffuseCube;

/*
 Sub-pixel detections.
 */
typedef struct DiffuseHits DiffuseHits;

/*
 One binary mask per frame.
 */
typedef struct DiffuseMasks DiffuseMasks;

/*
 Dense row-major matrix of doubles.
 */
typedef struct DiffuseMatrix DiffuseMatrix;

/*
 Label map of a segmentation.
 */
typedef struct DiffuseSegmentation DiffuseSegmentation;

/*
 Frame sequence.
 */
typedef struct DiffuseVideo DiffuseVideo;

/*
 Kernel scale and truncation.
 */
typedef struct {
  /*
   Kernel scale; 0 picks it from the data.
   */
  double epsilon;
  /*
   Truncation accuracy used when `eta` is 0.
   */
  double delta;
  /*
   Fixed number of eigenpairs, or 0 to derive it from `delta`.
   */
  size_t eta;
  /*
   Diffusion time (DM only).
   */
  uint32_t time;
  DiffuseVariant variant;
} DiffuseKernelParams;

/*
 Segmentation settings.
 */
typedef struct {
  DiffuseKernelParams kernel;
  size_t theta;
  uint16_t xi;
  size_t levels;
  bool drop_first_color;
} DiffuseWwgParams;

/*
 Sub-pixel detection settings.
 */
typedef struct {
  DiffuseKernelParams kernel;
  size_t alpha;
  double tau1;
  size_t tau2;
} DiffuseSubpixelParams;

/*
 Background-subtraction settings shared by the static and dynamic pipelines.
 */
typedef struct {
  size_t window;
  /*
   Slope threshold as a fraction of the histogram peak; used when `mu_absolute` is 0.
   */
  double mu_fraction;
  /*
   Absolute slope threshold per bin; 0 selects `mu_fraction`.
   */
  double mu_absolute;
  /*
   Odd moving-average width.
   */
  size_t smoothing;
  /*
   Kernel scale; 0 picks it from the first window.
   */
  double epsilon;
  size_t grid_rows;
  size_t grid_cols;
  size_t overlap;
  /*
   Dynamic pipeline only.
   */
  double stop_fraction;
  /*
   Dynamic pipeline only.
   */
  size_t max_iters;
} DiffuseVideoParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *diffuse_version(void);

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *diffuse_last_error(void);

DiffuseKernelParams diffuse_kernel_params_default(void);

DiffuseWwgParams diffuse_wwg_params_default(void);

DiffuseSubpixelParams diffuse_subpixel_params_default(void);

DiffuseVideoParams diffuse_video_params_default(void);

/*
 Copies `rows * cols` row-major values into a new matrix.

 # Safety
 `data` must point to `rows * cols` readable doubles and `out` must be writable.
 */
DiffuseStatus diffuse_matrix_new(size_t rows, size_t cols, const double *data, DiffuseMatrix **out);

/*
 # Safety
 `m` must be null or a live matrix handle.
 */
size_t diffuse_matrix_rows(const DiffuseMatrix *m);

/*
 # Safety
 `m` must be null or a live matrix handle.
 */
size_t diffuse_matrix_cols(const DiffuseMatrix *m);

/*
 Copies the row-major values into `buf`, which must hold `rows * cols` doubles.

 # Safety
 `m` must be a live matrix handle and `buf` must point to `len` writable doubles.
 */
DiffuseStatus diffuse_matrix_copy(const DiffuseMatrix *m, double *buf, size_t len);

/*
 # Safety
 `m` must be null or a handle not yet freed.
 */
void diffuse_matrix_free(DiffuseMatrix *m);

/*
 Kernel scale chosen for a point set (one point per row); `epsilon_out`
 receives the value.

 # Safety
 `points` must be a live matrix handle and `epsilon_out` writable.
 */
DiffuseStatus diffuse_choose_epsilon(const DiffuseMatrix *points, double *epsilon_out);

/*
 Diffusion-maps embedding of the rows of `points`; writes an `N x (eta - 1)` matrix.

 # Safety
 `points` and `params` must be valid; `out` must be writable.
 */
DiffuseStatus diffuse_dm_embed(const DiffuseMatrix *points,
                               const DiffuseKernelParams *params,
                               DiffuseMatrix **out);

/*
 Diffusion-bases embedding of the rows of `points`; writes an `N x eta` matrix.

 # Safety
 `points` and `params` must be valid; `out` must be writable.
 */
DiffuseStatus diffuse_db_embed(const DiffuseMatrix *points,
                               const DiffuseKernelParams *params,
                               DiffuseMatrix **out);

/*
 Cube from band-sequential values: band, then row, then column.

 # Safety
 `data` must point to `rows * cols * bands` readable floats and `out` must be writable.
 */
DiffuseStatus diffuse_cube_new(size_t rows,
                               size_t cols,
                               size_t bands,
                               const float *data,
                               DiffuseCube **out);

/*
 Loads a cube from its JSON header; the data file sits next to it with extension `.bsq`.

 # Safety
 `header` must be a NUL-terminated path and `out` writable.
 */
DiffuseStatus diffuse_cube_load(const char *header, DiffuseCube **out);

/*
 Writes `rows`, `cols` and `bands`; any pointer may be null.

 # Safety
 `cube` must be a live handle; non-null outputs must be writable.
 */
DiffuseStatus diffuse_cube_shape(const DiffuseCube *cube,
                                 size_t *rows,
                                 size_t *cols,
                                 size_t *bands);

/*
 # Safety
 `cube` must be null or a handle not yet freed.
 */
void diffuse_cube_free(DiffuseCube *cube);

/*
 Segments a cube.

 # Safety
 `cube` and `params` must be valid; `out` must be writable.
 */
DiffuseStatus diffuse_wwg(const DiffuseCube *cube,
                          const DiffuseWwgParams *params,
                          DiffuseSegmentation **out);

/*
 Re-segments the pixels with label `label` of `seg`; other pixels get label 0.

 # Safety
 `cube`, `seg` and `params` must be valid; `out` must be writable.
 */
DiffuseStatus diffuse_drilldown(const DiffuseCube *cube,
                                const DiffuseSegmentation *seg,
                                uint32_t label,
                                const DiffuseWwgParams *params,
                                DiffuseSegmentation **out);

/*
 Number of segments (labels run from 1 to this value; 0 marks unsegmented pixels).

 # Safety
 `seg` must be null or a live handle.
 */
size_t diffuse_segmentation_count(const DiffuseSegmentation *seg);

/*
 Copies the row-major label map into `buf`, which must hold `rows * cols` labels.

 # Safety
 `seg` must be a live handle and `buf` must point to `len` writable values.
 */
DiffuseStatus diffuse_segmentation_labels(const DiffuseSegmentation *seg,
                                          uint32_t *buf,
                                          size_t len);

/*
 # Safety
 `seg` must be null or a handle not yet freed.
 */
void diffuse_segmentation_free(DiffuseSegmentation *seg);

/*
 Detects single-pixel anomalies.

 # Safety
 `cube` and `params` must be valid; `out` must be writable.
 */
DiffuseStatus diffuse_subpixel(const DiffuseCube *cube,
                               const DiffuseSubpixelParams *params,
                               DiffuseHits **out);

/*
 # Safety
 `hits` must be null or a live handle.
 */
size_t diffuse_hits_count(const DiffuseHits *hits);

/*
 Position and isolated-layer count of detection `index`, in row-major order.

 # Safety
 `hits` must be a live handle; non-null outputs must be writable.
 */
DiffuseStatus diffuse_hits_get(const DiffuseHits *hits,
                               size_t index,
                               size_t *row,
                               size_t *col,
                               size_t *layers);

/*
 # Safety
 `hits` must be null or a handle not yet freed.
 */
void diffuse_hits_free(DiffuseHits *hits);

/*
 Video from `frames` frames of `channels` planes each, row-major, values in `[0, 255]`.

 # Safety
 `data` must point to `frames * channels * rows * cols` readable doubles and `out` must be writable.
 */
DiffuseStatus diffuse_video_new(size_t rows,
                                size_t cols,
                                size_t channels,
                                size_t frames,
                                const double *data,
                                DiffuseVideo **out);

/*
 Loads a frame directory (PGM/PPM files in name order) or a cube header (bands as frames).

 # Safety
 `source` must be a NUL-terminated path and `out` writable.
 */
DiffuseStatus diffuse_video_load(const char *source, DiffuseVideo **out);

/*
 # Safety
 `video` must be null or a handle not yet freed.
 */
void diffuse_video_free(DiffuseVideo *video);

/*
 Static-background subtraction; RGB input is converted to gray first.

 # Safety
 `video` and `params` must be valid; `out` must be writable.
 */
DiffuseStatus diffuse_sbsdb(const DiffuseVideo *video,
                            const DiffuseVideoParams *params,
                            DiffuseMasks **out);

/*
 Dynamic-background subtraction of RGB `rtd` trained on RGB `bgd`.

 # Safety
 `rtd`, `bgd` and `params` must be valid; `out` must be writable.
 */
DiffuseStatus diffuse_dbsdb(const DiffuseVideo *rtd,
                            const DiffuseVideo *bgd,
                            const DiffuseVideoParams *params,
                            DiffuseMasks **out);

/*
 # Safety
 `masks` must be null or a live handle.
 */
size_t diffuse_masks_count(const DiffuseMasks *masks);

/*
 Copies mask `index` (row-major, 1 = foreground) into `buf`, which must hold `rows * cols` bytes.

 # Safety
 `masks` must be a live handle and `buf` must point to `len` writable bytes.
 */
DiffuseStatus diffuse_masks_copy(const DiffuseMasks *masks, size_t index, uint8_t *buf, size_t len);

/*
 # Safety
 `masks` must be null or a handle not yet freed.
 */
void diffuse_masks_free(DiffuseMasks *masks);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIFFUSE_H */
