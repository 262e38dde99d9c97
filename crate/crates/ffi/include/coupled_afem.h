#ifndef COUPLED_AFEM_H
#define COUPLED_AFEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum CafStatus {
  CAF_STATUS_OK = 0,
  CAF_STATUS_NULL_POINTER = 1,
  CAF_STATUS_INVALID_ARGUMENT = 2,
  CAF_STATUS_MESH_ERROR = 3,
  CAF_STATUS_PROBLEM_ERROR = 4,
  CAF_STATUS_SOLVER_ERROR = 5,
  CAF_STATUS_IO_ERROR = 6,
  CAF_STATUS_PANIC = 7,
} CafStatus;

typedef struct CafMesh CafMesh;

typedef struct CafProblem CafProblem;

typedef struct CafRun CafRun;

/**
 * Parameters of the adaptive loop. `max_ndof == 0` means no cap.
 */
typedef struct CafRunOptions {
  double p;
  size_t iterations;
  size_t quad_degree;
  double tol;
  size_t max_picard;
  double mark_factor;
  size_t max_ndof;
} CafRunOptions;

/**
 * One row of the convergence history.
 */
typedef struct CafRecord {
  size_t iter;
  size_t ndof;
  double est_heat;
  double est_curl;
  double est_pressure;
  double est_total;
  size_t elements;
  size_t picard_iters;
} CafRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL terminated,
 * truncated to `len`). Returns the full message length in bytes.
 */
size_t caf_last_error_message(char *buf, size_t len);

/**
 * Builds a mesh from `nv` points (`xy`, interleaved) and `nt` counter-clockwise
 * triangles (`tris`, three vertex indices each).
 */
enum CafStatus caf_mesh_new(const double *xy,
                            size_t nv,
                            const size_t *tris,
                            size_t nt,
                            struct CafMesh **out);

/**
 * Criss-cross mesh of the unit square with `n x n` cells.
 */
enum CafStatus caf_mesh_unit_square(size_t n, struct CafMesh **out);

/**
 * Criss-cross mesh of the L-shape `(-1,1)^2 \ [0,1) x (-1,0]`; `n` must be even.
 */
enum CafStatus caf_mesh_l_shape(size_t n, struct CafMesh **out);

/**
 * Reads a mesh in the `nv nt` text format.
 */
enum CafStatus caf_mesh_read(const char *path, struct CafMesh **out);

void caf_mesh_free(struct CafMesh *mesh);

size_t caf_mesh_num_vertices(const struct CafMesh *mesh);

size_t caf_mesh_num_triangles(const struct CafMesh *mesh);

size_t caf_mesh_num_edges(const struct CafMesh *mesh);

/**
 * Copies vertex coordinates (interleaved x, y) into `out`, which must hold
 * `2 * caf_mesh_num_vertices` values.
 */
enum CafStatus caf_mesh_vertices(const struct CafMesh *mesh, double *out, size_t len);

/**
 * Copies triangle vertex indices into `out` (`3 * caf_mesh_num_triangles` values).
 */
enum CafStatus caf_mesh_triangles(const struct CafMesh *mesh, size_t *out, size_t len);

/**
 * Longest-edge bisection of the `n` marked elements with conforming closure.
 */
enum CafStatus caf_mesh_refine(const struct CafMesh *mesh,
                               const size_t *marked,
                               size_t n,
                               struct CafMesh **out);

/**
 * One of `example1`, `example2`, `verification-poisson`,
 * `verification-darcy-gradient`.
 */
enum CafStatus caf_problem_builtin(const char *name, struct CafProblem **out);

void caf_problem_free(struct CafProblem *problem);

struct CafRunOptions caf_run_options_default(void);

/**
 * Runs the adaptive loop. `mesh` may be null to use the problem's default
 * initial mesh; `options` may be null for the defaults.
 */
enum CafStatus caf_run_adaptive(const struct CafProblem *problem,
                                const struct CafMesh *mesh,
                                const struct CafRunOptions *options,
                                struct CafRun **out);

void caf_run_free(struct CafRun *run);

size_t caf_run_num_records(const struct CafRun *run);

enum CafStatus caf_run_record(const struct CafRun *run, size_t index, struct CafRecord *out);

/**
 * True when the loop stopped early because no element was marked.
 */
bool caf_run_stagnated(const struct CafRun *run);

/**
 * A copy of the last mesh of the run, on which the final solution lives.
 */
enum CafStatus caf_run_final_mesh(const struct CafRun *run, struct CafMesh **out);

/**
 * Final temperature at every vertex of the final mesh (zero on the boundary).
 */
enum CafStatus caf_run_temperature(const struct CafRun *run, double *out, size_t len);

/**
 * Final per-element total indicators (`caf_mesh_num_triangles` of the final mesh).
 */
enum CafStatus caf_run_indicators(const struct CafRun *run, double *out, size_t len);

/**
 * Writes the convergence table as CSV.
 */
enum CafStatus caf_run_write_csv(const struct CafRun *run, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COUPLED_AFEM_H */
