#ifndef YARDSTICK_H
#define YARDSTICK_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum YsShape {
  YS_SHAPE_BOX = 0,
  YS_SHAPE_GAUSSIAN = 1,
} YsShape;

typedef enum YsStatus {
  YS_STATUS_OK = 0,
  YS_STATUS_NULL_POINTER = 1,
  YS_STATUS_INVALID_ARGUMENT = 2,
  YS_STATUS_WRONG_YARDSTICK = 3,
  YS_STATUS_NUMERICAL_GUARD = 4,
  YS_STATUS_BUFFER_TOO_SMALL = 5,
  YS_STATUS_INTERNAL = 6,
} YsStatus;

typedef enum YsYardstick {
  YS_YARDSTICK_NEWTON_WIGNER = 0,
  YS_YARDSTICK_FIELD = 1,
} YsYardstick;

typedef struct YsDensity YsDensity;

typedef struct YsGrid YsGrid;

typedef struct YsPacket YsPacket;

/**
 * Model constants `m`, `c`, `λ`.
 */
typedef struct YsModel {
  double m;
  double c;
  double lambda;
} YsModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *ys_last_error(void);

/**
 * Default model constants (atomic units).
 */
struct YsModel ys_model_default(void);

/**
 * Periodic grid of `n` points on `[z_min, z_max)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum YsStatus ys_grid_new(size_t n, double z_min, double z_max, struct YsGrid **out);

/**
 * # Safety
 * `g` must come from `ys_grid_new` and not be used afterwards.
 */
void ys_grid_free(struct YsGrid *g);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live grid handle.
 */
size_t ys_grid_len(const struct YsGrid *g);

/**
 * # Safety
 * `g` must be a live handle; `buf` must hold `len` doubles.
 */
enum YsStatus ys_grid_positions(const struct YsGrid *g, double *buf, size_t len);

/**
 * Normalized Newton-Wigner packet with the given shape.
 *
 * # Safety
 * `g` must be a live grid handle and `out` a valid pointer.
 */
enum YsStatus ys_packet_new(const struct YsGrid *g,
                            enum YsShape shape,
                            double w,
                            double center,
                            struct YsModel model,
                            struct YsPacket **out);

/**
 * # Safety
 * `p` must be null or come from this library, and not be used afterwards.
 */
void ys_packet_free(struct YsPacket *p);

/**
 * # Safety
 * `p` must be a live packet handle.
 */
enum YsYardstick ys_packet_yardstick(const struct YsPacket *p);

/**
 * Free evolution to time `t`; writes a new handle.
 *
 * # Safety
 * `p` must be a live packet handle and `out` a valid pointer.
 */
enum YsStatus ys_packet_evolve(const struct YsPacket *p, double t, struct YsPacket **out);

/**
 * Re-expresses the state in the other yardstick.
 *
 * # Safety
 * `p` must be a live packet handle and `out` a valid pointer.
 */
enum YsStatus ys_packet_convert(const struct YsPacket *p,
                                enum YsYardstick target,
                                struct YsPacket **out);

/**
 * Newton-Wigner boost by velocity `v`. The result lives on a larger grid.
 *
 * # Safety
 * `p` must be a live packet handle and `out` a valid pointer.
 */
enum YsStatus ys_packet_boost(const struct YsPacket *p, double v, struct YsPacket **out);

/**
 * Position density `|ψ(z)|²`, optionally rescaled to unit integral.
 *
 * # Safety
 * `p` must be a live packet handle and `out` a valid pointer.
 */
enum YsStatus ys_packet_density(const struct YsPacket *p, bool normalize, struct YsDensity **out);

/**
 * # Safety
 * `d` must be null or come from this library, and not be used afterwards.
 */
void ys_density_free(struct YsDensity *d);

/**
 * # Safety
 * `d` must be null or a live density handle.
 */
size_t ys_density_len(const struct YsDensity *d);

/**
 * # Safety
 * `d` must be a live handle; `buf` must hold `len` doubles.
 */
enum YsStatus ys_density_values(const struct YsDensity *d, double *buf, size_t len);

/**
 * # Safety
 * `d` must be a live handle; `buf` must hold `len` doubles.
 */
enum YsStatus ys_density_positions(const struct YsDensity *d, double *buf, size_t len);

/**
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum YsStatus ys_density_integral(const struct YsDensity *d, double *out);

/**
 * Share of a normalized density outside `center ± (w + c|t|)`.
 *
 * # Safety
 * `d` must be a live handle and `out` a valid pointer.
 */
enum YsStatus ys_lightcone_fraction(const struct YsDensity *d,
                                    double center,
                                    double w,
                                    double t,
                                    double c,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YARDSTICK_H */
