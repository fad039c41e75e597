#ifndef ERT_H
#define ERT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum ErtStatus {
  ERT_STATUS_OK = 0,
  ERT_STATUS_NULL_POINTER = 1,
  ERT_STATUS_INVALID_ARGUMENT = 2,
  ERT_STATUS_DOMAIN = 3,
  ERT_STATUS_GEOMETRY_MISMATCH = 4,
  ERT_STATUS_IO = 5,
  ERT_STATUS_FORMAT = 6,
  ERT_STATUS_BUFFER_TOO_SMALL = 7,
  ERT_STATUS_PANIC = 8,
} ErtStatus;

// Ramp filter apodization, passed as `uint32_t` in [`ErtReconstructConfig`].
typedef enum ErtWindow {
  ERT_WINDOW_RAM_LAK = 0,
  ERT_WINDOW_HANN = 1,
} ErtWindow;

// A scalar field on a uniform grid.
typedef struct ErtImage ErtImage;

// A phantom: weighted disk indicators, mirrored in `x2 = 0`.
typedef struct ErtPhantom ErtPhantom;

// Samples of the elliptical transform on a `(u, t)` grid.
typedef struct ErtSinogram ErtSinogram;

// Parameters of reduction, filtered backprojection and lift. `f` and `k`
// share a `size × size` grid over `[-1, 1]²`. `noise_ratio = 0` adds no noise.
typedef struct ErtReconstructConfig {
  uint32_t ntheta;
  uint32_t ns;
  double s_lo;
  double s_hi;
  uint32_t size;
  // An [`ErtWindow`] value.
  uint32_t window;
  double noise_ratio;
  uint64_t noise_seed;
} ErtReconstructConfig;

// Quadrature node rule: `fixed > 0` uses that many nodes, otherwise the
// count adapts to `t` so that node spacing stays near `pixel`.
typedef struct ErtNodes {
  uint32_t fixed;
  double pixel;
} ErtNodes;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next `ert_*` call on the same thread.
const char *ert_last_error(void);

// Library version as a static NUL-terminated string.
const char *ert_version(void);

// Defaults matching the reference experiment: 256 angles and offsets over
// `s ∈ [-1, 1]`, a 256² grid, Ram-Lak, no noise.
struct ErtReconstructConfig ert_reconstruct_config_default(void);

// `m(z) = (Ā z', a_n √(z_n − |z'|²))` for `z, x, a` of length `n`.
enum ErtStatus ert_forward_map(const double *a, size_t n, const double *z, double *x);

// `m⁻¹(x) = (Ā⁻¹ x', |A⁻¹ x|²)` for `x, z, a` of length `n`.
enum ErtStatus ert_inverse_map(const double *a, size_t n, const double *x, double *z);

// The four-disk reference phantom and its mirror image.
enum ErtStatus ert_phantom_paper(struct ErtPhantom **out_phantom);

// Phantom from `count` disks above the axis: `centers` holds `2·count`
// coordinates; mirrored copies are added.
enum ErtStatus ert_phantom_new(const double *centers,
                               const double *radii,
                               const double *values,
                               size_t count,
                               struct ErtPhantom **out_phantom);

// Phantom from JSON text: a list of `{center, radius, value}` disks or
// `{"disks": [...]}`.
enum ErtStatus ert_phantom_from_json(const char *json, struct ErtPhantom **out_phantom);

void ert_phantom_free(struct ErtPhantom *phantom);

enum ErtStatus ert_phantom_eval(const struct ErtPhantom *phantom,
                                double x1,
                                double x2,
                                double *value);

// `R f(u, t)` of a phantom by the `nodes`-point trapezoid rule.
enum ErtStatus ert_phantom_transform(const struct ErtPhantom *phantom,
                                     double a1,
                                     double a2,
                                     double u,
                                     double t,
                                     struct ErtNodes nodes,
                                     double *value);

// Pixel-center (or 4×4 supersampled) raster on a `size²` grid over `[-1, 1]²`.
enum ErtStatus ert_phantom_rasterize(const struct ErtPhantom *phantom,
                                     uint32_t size,
                                     bool supersample,
                                     struct ErtImage **out_image);

// Elliptical sinogram of a phantom on `nu` offsets in `[u_lo, u_hi]` and
// `nt` radii in `[t_lo, t_hi]`.
enum ErtStatus ert_sinogram_forward(const struct ErtPhantom *phantom,
                                    double a1,
                                    double a2,
                                    double u_lo,
                                    double u_hi,
                                    uint32_t nu,
                                    double t_lo,
                                    double t_hi,
                                    uint32_t nt,
                                    struct ErtNodes nodes,
                                    struct ErtSinogram **out_sinogram);

// Wraps caller data, `u`-major (`data[iu * nt + it]`), as a sinogram.
enum ErtStatus ert_sinogram_from_data(double a1,
                                      double a2,
                                      double u_lo,
                                      double u_hi,
                                      uint32_t nu,
                                      double t_lo,
                                      double t_hi,
                                      uint32_t nt,
                                      const double *data,
                                      size_t len,
                                      struct ErtSinogram **out_sinogram);

void ert_sinogram_free(struct ErtSinogram *sinogram);

enum ErtStatus ert_sinogram_dims(const struct ErtSinogram *sinogram, uint32_t *nu, uint32_t *nt);

// Copies the samples, `u`-major, into `buffer`.
enum ErtStatus ert_sinogram_data(const struct ErtSinogram *sinogram,
                                 double *buffer,
                                 size_t capacity,
                                 size_t *len);

// A copy of `sinogram` plus Gaussian noise of norm `ratio · ‖data‖`.
enum ErtStatus ert_sinogram_add_noise(const struct ErtSinogram *sinogram,
                                      double ratio,
                                      uint64_t seed,
                                      struct ErtSinogram **out_sinogram);

enum ErtStatus ert_sinogram_write(const struct ErtSinogram *sinogram, const char *file);

enum ErtStatus ert_sinogram_read(const char *file, struct ErtSinogram **out_sinogram);

// Reduction, filtered backprojection and lift from gridded data.
enum ErtStatus ert_reconstruct_sinogram(const struct ErtSinogram *sinogram,
                                        const struct ErtReconstructConfig *config,
                                        struct ErtImage **out_image);

// Reduction, filtered backprojection and lift with the transform of a
// phantom evaluated on demand at each reduction node.
enum ErtStatus ert_reconstruct_phantom(const struct ErtPhantom *phantom,
                                       double a1,
                                       double a2,
                                       struct ErtNodes nodes,
                                       const struct ErtReconstructConfig *config,
                                       struct ErtImage **out_image);

// The default band limit `π / median |Δ(t²)|` of a sinogram.
enum ErtStatus ert_default_band(const struct ErtSinogram *sinogram, double *band);

// Closed-form inversion with band limit `band` on a `size²` grid; `band ≤ 0`
// selects the default band.
enum ErtStatus ert_direct_invert(const struct ErtSinogram *sinogram,
                                 uint32_t size,
                                 double band,
                                 struct ErtImage **out_image);

void ert_image_free(struct ErtImage *image);

enum ErtStatus ert_image_dims(const struct ErtImage *image, uint32_t *nx, uint32_t *ny);

// Copies the pixels, row-major with `x2` increasing, into `buffer`.
enum ErtStatus ert_image_data(const struct ErtImage *image,
                              double *buffer,
                              size_t capacity,
                              size_t *len);

// `‖b − a‖ / ‖a‖` over all pixels; the grids must agree.
enum ErtStatus ert_image_relative_error(const struct ErtImage *a,
                                        const struct ErtImage *b,
                                        double *error);

enum ErtStatus ert_image_write(const struct ErtImage *image, const char *file);

enum ErtStatus ert_image_read(const char *file, struct ErtImage **out_image);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERT_H */
