#ifndef FUSEWAVE_H
#define FUSEWAVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum FwStatus {
  FW_STATUS_OK = 0,
  FW_STATUS_NULL_POINTER = 1,
  FW_STATUS_INVALID_ARGUMENT = 2,
  FW_STATUS_PARSE = 3,
  FW_STATUS_IO = 4,
  FW_STATUS_PRECONDITION = 5,
  FW_STATUS_NUMERIC = 6,
  FW_STATUS_PANIC = 7,
} FwStatus;

/*
 An ordered set of generators on a common grid.
 */
typedef struct FwGenerators FwGenerators;

/*
 A built wavelet.
 */
typedef struct FwWavelet FwWavelet;

/*
 Verification summary of a built wavelet.
 */
typedef struct FwWaveletReport {
  double periodization_residual;
  double v0_orthogonality_residual;
  double v1_membership_residual;
  double translate_gram_residual;
  double premise_residual;
  bool used_half_shift_shortcut;
  bool passed;
} FwWaveletReport;

/*
 Frame bounds and multiplicity summary.
 */
typedef struct FwFrameBounds {
  double lower;
  double upper;
  bool is_tight;
  bool is_normalized_tight;
  size_t max_multiplicity;
} FwFrameBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. Owned by the library.
 */
const char *fw_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *fw_version(void);

/*
 Builds the wavelet of a built-in analysis (`haar`, `db2`, `db4`,
 `shannon`). Zero for `grid_n`, `periods` or `depth` selects the default.

 # Safety
 `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FwStatus fw_wavelet_build(const char *name,
                               size_t grid_n,
                               size_t periods,
                               size_t depth,
                               struct FwWavelet **out);

/*
 # Safety
 `w` must come from `fw_wavelet_build` and not be used afterwards.
 */
void fw_wavelet_free(struct FwWavelet *w);

/*
 # Safety
 `w` must be a live handle and `report` a valid pointer.
 */
enum FwStatus fw_wavelet_report(const struct FwWavelet *w, struct FwWaveletReport *report);

/*
 `ψ̂(ξ)`.

 # Safety
 `w` must be a live handle; `re` and `im` valid pointers.
 */
enum FwStatus fw_wavelet_eval(const struct FwWavelet *w, double xi, double *re, double *im);

/*
 Number of grid points of the build.

 # Safety
 `w` must be a live handle or null (returns 0).
 */
size_t fw_wavelet_grid_len(const struct FwWavelet *w);

/*
 Set membership and multipliers at grid point `k`.

 # Safety
 `w` must be a live handle; output pointers valid.
 */
enum FwStatus fw_wavelet_sets_at(const struct FwWavelet *w,
                                 size_t k,
                                 bool *in_e,
                                 bool *in_f,
                                 double *f,
                                 double *g);

/*
 An empty generator set.

 # Safety
 `out` must be a valid pointer.
 */
enum FwStatus fw_generators_new(size_t grid_n, size_t periods, struct FwGenerators **out);

/*
 # Safety
 `set` must come from this library and not be used afterwards.
 */
void fw_generators_free(struct FwGenerators *set);

/*
 # Safety
 `set` must be a live handle or null (returns 0).
 */
size_t fw_generators_len(const struct FwGenerators *set);

/*
 Appends a piecewise-constant spectrum. `pieces` holds `count` records of
 four doubles `[a, b, re, im]`, each a constant on `[a, b)`.

 # Safety
 `set` must be a live handle and `pieces` must point to `4 * count` doubles.
 */
enum FwStatus fw_generators_add_piecewise(struct FwGenerators *set,
                                          const double *pieces,
                                          size_t count);

/*
 Generator `index` evaluated at `ξ`.

 # Safety
 `set` must be a live handle; `re` and `im` valid pointers.
 */
enum FwStatus fw_generators_eval(const struct FwGenerators *set,
                                 size_t index,
                                 double xi,
                                 double *re,
                                 double *im);

/*
 # Safety
 `set` must be a live handle and `bounds` a valid pointer.
 */
enum FwStatus fw_generators_frame_bounds(const struct FwGenerators *set,
                                         double tol,
                                         struct FwFrameBounds *bounds);

/*
 Canonical normalized tight generators, as a new handle.

 # Safety
 `set` must be a live handle and `out` a valid pointer.
 */
enum FwStatus fw_generators_tighten(const struct FwGenerators *set, struct FwGenerators **out);

/*
 Fuses generators `i` and `j` into a new handle; the fused generator takes
 position `i` (shifted down by one when `j < i`).

 # Safety
 `set` must be a live handle and `out` a valid pointer.
 */
enum FwStatus fw_generators_fuse(const struct FwGenerators *set,
                                 size_t i,
                                 size_t j,
                                 struct FwGenerators **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUSEWAVE_H */
