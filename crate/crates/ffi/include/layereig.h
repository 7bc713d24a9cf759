#ifndef LAYEREIG_H
#define LAYEREIG_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; 0 to 8 coincide with the `layereig` binary's exit codes.
 */
typedef enum LeStatus {
  LE_STATUS_OK = 0,
  LE_STATUS_GENERIC = 1,
  LE_STATUS_INVALID_SPEC = 2,
  LE_STATUS_REGION_OVERLAP = 3,
  LE_STATUS_NO_CONVERGENCE = 4,
  LE_STATUS_ASSUMPTION_VIOLATED = 5,
  LE_STATUS_K_TOO_LARGE = 6,
  LE_STATUS_NUMERICAL = 7,
  LE_STATUS_IO = 8,
  LE_STATUS_NULL_ARGUMENT = 9,
  LE_STATUS_BUFFER_TOO_SMALL = 10,
  LE_STATUS_OUT_OF_RANGE = 11,
  LE_STATUS_PANIC = 12,
} LeStatus;

typedef enum LeMeshKind {
  LE_MESH_KIND_EXP = 0,
  LE_MESH_KIND_SHISHKIN = 1,
  LE_MESH_KIND_UNIFORM = 2,
} LeMeshKind;

/**
 * Built-in coefficient choices; custom expressions go through
 * [`le_solve_expr`].
 */
typedef enum LePreset {
  /**
   * `a = exp(x)`, `b = x`.
   */
  LE_PRESET_EXP_X = 0,
  /**
   * `a = 1`, `b = 0`.
   */
  LE_PRESET_CONST_ONE = 1,
} LePreset;

typedef enum LeMethod {
  LE_METHOD_DENSE_REDUCE = 0,
  LE_METHOD_SHIFT_INVERT = 1,
} LeMethod;

/**
 * Opaque handle to a mesh.
 */
typedef struct LeMesh LeMesh;

/**
 * Opaque handle to a computed spectrum and its eigenfunctions.
 */
typedef struct LeSolution LeSolution;

typedef struct LeConfig {
  double epsilon;
  /**
   * Layer exponent; a value `<= 0` selects `sqrt(min a)`.
   */
  double beta;
  size_t p;
  size_t n;
  enum LeMeshKind mesh;
  enum LePreset preset;
  size_t modes;
  double tol;
  size_t max_iter;
  double shift;
  enum LeMethod method;
} LeConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *le_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *le_last_error(void);

/**
 * Writes the default configuration into `out`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `LeConfig`.
 */
enum LeStatus le_config_default(struct LeConfig *out);

/**
 * Solves with a built-in coefficient preset. On success `*out` receives a
 * handle to release with [`le_solution_free`].
 *
 * # Safety
 * `cfg` must point to a valid `LeConfig`; `out` must be writable.
 */
enum LeStatus le_solve(const struct LeConfig *cfg, struct LeSolution **out);

/**
 * Like [`le_solve`] with `a(x)` and `b(x)` given as expressions in `x`
 * (`cfg.preset` is ignored).
 *
 * # Safety
 * `cfg` must point to a valid `LeConfig`, `a_expr` and `b_expr` to
 * NUL-terminated strings; `out` must be writable.
 */
enum LeStatus le_solve_expr(const struct LeConfig *cfg,
                            const char *a_expr,
                            const char *b_expr,
                            struct LeSolution **out);

/**
 * Releases a solution; null is ignored.
 *
 * # Safety
 * `sol` must be null or a handle from this library not yet freed.
 */
void le_solution_free(struct LeSolution *sol);

/**
 * Number of computed eigenpairs, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t le_solution_num_modes(const struct LeSolution *sol);

/**
 * Number of free degrees of freedom, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t le_solution_dof(const struct LeSolution *sol);

/**
 * Copies the eigenvalues (ascending) into `out[0..num_modes]`.
 *
 * # Safety
 * `sol` must be a live handle and `out` writable for `len` doubles.
 */
enum LeStatus le_solution_eigenvalues(const struct LeSolution *sol, double *out, size_t len);

/**
 * Copies the relative residuals `||K u - lambda M u|| / ||K u||`.
 *
 * # Safety
 * `sol` must be a live handle and `out` writable for `len` doubles.
 */
enum LeStatus le_solution_residuals(const struct LeSolution *sol, double *out, size_t len);

/**
 * Evaluates derivative `deriv` (0, 1 or 2) of eigenfunction `mode`
 * (0-based) at `x` in [0, 1].
 *
 * # Safety
 * `sol` must be a live handle and `out` writable.
 */
enum LeStatus le_solution_eval(const struct LeSolution *sol,
                               size_t mode,
                               double x,
                               size_t deriv,
                               double *out);

/**
 * Builds a mesh; release it with [`le_mesh_free`].
 *
 * # Safety
 * `out` must be writable.
 */
enum LeStatus le_mesh_build(enum LeMeshKind kind,
                            double epsilon,
                            double beta,
                            size_t p,
                            size_t n,
                            struct LeMesh **out);

/**
 * Number of nodes (`N + 1`), or 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t le_mesh_num_nodes(const struct LeMesh *mesh);

/**
 * Copies the node coordinates.
 *
 * # Safety
 * `mesh` must be a live handle and `out` writable for `len` doubles.
 */
enum LeStatus le_mesh_nodes(const struct LeMesh *mesh, double *out, size_t len);

/**
 * Releases a mesh; null is ignored.
 *
 * # Safety
 * `mesh` must be null or a handle from this library not yet freed.
 */
void le_mesh_free(struct LeMesh *mesh);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAYEREIG_H */
