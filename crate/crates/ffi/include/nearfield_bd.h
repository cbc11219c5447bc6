#ifndef NEARFIELD_BD_H
#define NEARFIELD_BD_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NfbStatus {
  NFB_STATUS_OK = 0,
  NFB_STATUS_NULL_POINTER = 1,
  NFB_STATUS_INVALID_PARAMETER = 2,
  NFB_STATUS_REACTIVE_NEAR_FIELD = 3,
  NFB_STATUS_DEGENERATE_PROJECTION = 4,
  NFB_STATUS_NUMERICAL_FAILURE = 5,
  NFB_STATUS_PANIC = 6,
} NfbStatus;

typedef enum NfbSizing {
  NFB_SIZING_ELEMENT_DIAGONAL = 0,
  NFB_SIZING_APERTURE_AREA = 1,
  NFB_SIZING_APERTURE_LENGTH = 2,
} NfbSizing;

// Opaque circular aperture.
typedef struct NfbCircArray NfbCircArray;

// Opaque rectangular array.
typedef struct NfbRectArray NfbRectArray;

// Characteristic distances of a rectangular array, meters.
typedef struct NfbDistances {
  double fraunhofer;
  double array_fraunhofer;
  double uniform_amplitude;
  double reactive_limit;
  double finite_bd_limit;
} NfbDistances;

// Half-power interval around a focus. `z_hi` is `INFINITY` when the depth
// is unbounded.
typedef struct NfbBeamDepth {
  double focus;
  double z_lo;
  double z_hi;
  double depth;
  double finite_limit;
  bool within_validity;
} NfbBeamDepth;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread. The pointer stays valid
// until the next failing call on the same thread.
const char *nfb_last_error(void);

// Static description of a status code.
const char *nfb_status_str(enum NfbStatus status);

// Creates a rectangular array. `value` is the fixed quantity selected by
// `sizing`, in meters or square meters.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum NfbStatus nfb_rect_array_new(size_t n_per_side,
                                  double eta,
                                  enum NfbSizing sizing,
                                  double value,
                                  double wavelength,
                                  struct NfbRectArray **out);

// # Safety
// `arr` must come from [`nfb_rect_array_new`] and not be used afterwards.
void nfb_rect_array_free(struct NfbRectArray *arr);

// # Safety
// `arr` must be a live handle and `out` writable.
enum NfbStatus nfb_rect_array_distances(const struct NfbRectArray *arr, struct NfbDistances *out);

// Creates a circular aperture. `reference_elements` sets the element count
// of the matched rectangular array whose element Fraunhofer distance is
// used as the distance unit; pass 0 for the default of 10⁴.
//
// # Safety
// `out` must be writable.
enum NfbStatus nfb_circ_array_new(double radius,
                                  double wavelength,
                                  size_t reference_elements,
                                  struct NfbCircArray **out);

// # Safety
// `circ` must come from [`nfb_circ_array_new`] and not be used afterwards.
void nfb_circ_array_free(struct NfbCircArray *circ);

// Fresnel integrals `C(x)` and `S(x)` with the `π t² / 2` kernel.
//
// # Safety
// `c` and `s` must be writable.
enum NfbStatus nfb_fresnel(double x, double *c, double *s);

// Half-power defocus parameter for aspect ratio `eta`.
//
// # Safety
// `out` must be writable.
enum NfbStatus nfb_a3db(double eta, double *out);

// Closed-form broadside gain at range `z` with focus `focus`
// (`INFINITY` for a far-field filter).
//
// # Safety
// `arr` must be a live handle and `out` writable.
enum NfbStatus nfb_rect_analytic_gain(const struct NfbRectArray *arr,
                                      double z,
                                      double focus,
                                      double *out);

// Closed-form gain for a transmitter at `(dist, azimuth, elevation)` with a
// broadside focus at `focus`.
//
// # Safety
// `arr` must be a live handle and `out` writable.
enum NfbStatus nfb_rect_analytic_gain_steered(const struct NfbRectArray *arr,
                                              double dist,
                                              double azimuth,
                                              double elevation,
                                              double focus,
                                              double *out);

// Exact normalized gain by element quadrature. The filter is focused at
// range `focus` in direction `(focus_azimuth, focus_elevation)`;
// `quadrature_order` points per element axis, refined until converged.
//
// # Safety
// `arr` must be a live handle and `out` writable.
enum NfbStatus nfb_rect_exact_gain(const struct NfbRectArray *arr,
                                   double dist,
                                   double azimuth,
                                   double elevation,
                                   double focus,
                                   double focus_azimuth,
                                   double focus_elevation,
                                   size_t quadrature_order,
                                   double *out);

// # Safety
// `arr` must be a live handle and `out` writable.
enum NfbStatus nfb_rect_beam_depth(const struct NfbRectArray *arr,
                                   double focus,
                                   struct NfbBeamDepth *out);

// Closed-form circular gain `sinc²(π l)`.
//
// # Safety
// `circ` must be a live handle and `out` writable.
enum NfbStatus nfb_circ_analytic_gain(const struct NfbCircArray *circ,
                                      double z,
                                      double focus,
                                      double *out);

// # Safety
// `circ` must be a live handle and `out` writable.
enum NfbStatus nfb_circ_beam_depth(const struct NfbCircArray *circ,
                                   double focus,
                                   struct NfbBeamDepth *out);

// Element Fraunhofer distance of the circular aperture's reference array.
//
// # Safety
// `circ` must be a live handle and `out` writable.
enum NfbStatus nfb_circ_fraunhofer_reference(const struct NfbCircArray *circ, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEARFIELD_BD_H */
