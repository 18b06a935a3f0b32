#ifndef OBLIQUE_KIT_H
#define OBLIQUE_KIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Values 0 to 3 match the exit codes of the command-line tool.
typedef enum OkitStatus {
  OKIT_STATUS_OK = 0,
  // The input was valid but a theorem or property check failed.
  OKIT_STATUS_CHECK_FAILED = 1,
  // Malformed input text.
  OKIT_STATUS_PARSE = 2,
  // Input violates a precondition (not a projection, disconnected graph, ...).
  OKIT_STATUS_INVALID = 3,
  OKIT_STATUS_NULL_ARGUMENT = 4,
  // The caller's buffer is shorter than `*len`.
  OKIT_STATUS_BUFFER_TOO_SMALL = 5,
  // Internal error; the library caught a panic.
  OKIT_STATUS_PANIC = 6,
} OkitStatus;

typedef enum OkitDriveMode {
  // Currents on the chords, power from `K0`.
  OKIT_DRIVE_MODE_CURRENT = 0,
  // Voltages on the tree edges, power from `Sigma1`.
  OKIT_DRIVE_MODE_VOLTAGE = 1,
} OkitDriveMode;

// A reduced resistor network.
typedef struct OkitCircuit OkitCircuit;

// A weighted graph with its DFS cycle and cocycle bases.
typedef struct OkitGraph OkitGraph;

// Analysis of a projection pair.
typedef struct OkitPair OkitPair;

// Pseudodeterminants and the two ratios that should equal `det_plus_g`.
typedef struct OkitTheorem1 {
  double det_plus_l0;
  double det_plus_l1;
  double det_plus_gamma0;
  double det_plus_gamma1;
  double det_plus_g;
  double l1_over_gamma0;
  double l0_over_gamma1;
  bool pass;
} OkitTheorem1;

typedef struct OkitTreePolynomials {
  double det_l0;
  double det_gamma1;
  double det_g;
  // Number of spanning trees, or -1 when the graph is too large to enumerate.
  int64_t tree_count;
} OkitTreePolynomials;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *okit_last_error(void);

// Library version as a static NUL-terminated string.
const char *okit_version(void);

// Validates the complementary projections `p0`, `p1` (each `n × n`) and
// checks both theorems under the metric `g` and scalar product `h`. `h` may
// be null for the identity. Theorem ratios and spectra are compared with `tol`.
//
// # Safety
// Non-null matrix pointers must reference `n * n` readable doubles, and `out`
// must be writable.
enum OkitStatus okit_pair_analyze(size_t n,
                                  const double *p0,
                                  const double *p1,
                                  const double *g,
                                  const double *h,
                                  double tol,
                                  struct OkitPair **out);

// # Safety
// `pair` must be null or a handle from [`okit_pair_analyze`] not yet freed.
void okit_pair_free(struct OkitPair *pair);

// Dimensions of the two ranges.
//
// # Safety
// `pair` must be a live handle; `n0` and `n1` must be writable.
enum OkitStatus okit_pair_dims(const struct OkitPair *pair, size_t *n0, size_t *n1);

// # Safety
// `pair` must be a live handle; `out` must be writable.
enum OkitStatus okit_pair_theorem1(const struct OkitPair *pair, struct OkitTheorem1 *out);

// Eigenvalues shared by `K0`, `K1`, `Sigma0`, `Sigma1` apart from 0 and 1, descending.
//
// # Safety
// `pair` must be a live handle; `out` null or writable for `cap` doubles; `len` writable.
enum OkitStatus okit_pair_shared_eigenvalues(const struct OkitPair *pair,
                                             double *out,
                                             size_t cap,
                                             size_t *len);

// Rank of the bridge matrix between the two subspaces.
//
// # Safety
// `pair` must be a live handle; `rank` must be writable.
enum OkitStatus okit_pair_bridge_rank(const struct OkitPair *pair, size_t *rank);

// `OKIT_STATUS_OK` when both theorems hold, `OKIT_STATUS_CHECK_FAILED` otherwise.
//
// # Safety
// `pair` must be a live handle.
enum OkitStatus okit_pair_check(const struct OkitPair *pair);

// Builds a weighted graph from `edge_count` edges given as `(tail, head)`
// pairs in `edges` (length `2 * edge_count`) with positive `weights`.
//
// # Safety
// `edges` and `weights` must reference `2 * edge_count` and `edge_count`
// readable values; `out` must be writable.
enum OkitStatus okit_graph_new(size_t vertex_count,
                               const size_t *edges,
                               const double *weights,
                               size_t edge_count,
                               struct OkitGraph **out);

// # Safety
// `graph` must be null or a handle from [`okit_graph_new`] not yet freed.
void okit_graph_free(struct OkitGraph *graph);

// Number of chords (independent cycles) of the DFS tree.
//
// # Safety
// `graph` must be a live handle; `count` must be writable.
enum OkitStatus okit_graph_chord_count(const struct OkitGraph *graph, size_t *count);

// Cycle and cocycle Gram determinants and the spanning-tree count.
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum OkitStatus okit_graph_tree_polynomials(const struct OkitGraph *graph,
                                            struct OkitTreePolynomials *out);

// `K0` of the graph, chords × chords, row-major.
//
// # Safety
// `graph` must be a live handle; `out` null or writable for `cap` doubles; `len` writable.
enum OkitStatus okit_graph_k0(const struct OkitGraph *graph, double *out, size_t cap, size_t *len);

// `Sigma1` of the graph, tree edges × tree edges, row-major.
//
// # Safety
// As for [`okit_graph_k0`].
enum OkitStatus okit_graph_sigma1(const struct OkitGraph *graph,
                                  double *out,
                                  size_t cap,
                                  size_t *len);

// Parses and reduces a netlist given as NUL-terminated JSON.
//
// # Safety
// `json` must be a valid C string; `out` must be writable.
enum OkitStatus okit_circuit_from_json(const char *json, struct OkitCircuit **out);

// # Safety
// `circuit` must be null or a handle from [`okit_circuit_from_json`] not yet freed.
void okit_circuit_free(struct OkitCircuit *circuit);

// Length of a drive vector: chords for current drive, tree edges for voltage drive.
//
// # Safety
// `circuit` must be a live handle; `len` must be writable.
enum OkitStatus okit_circuit_drive_len(const struct OkitCircuit *circuit,
                                       enum OkitDriveMode mode,
                                       size_t *len);

// Dissipated power for the given drive, from the quadratic power form.
// A null `drive` uses the netlist's own source values.
//
// # Safety
// `circuit` must be a live handle; `drive` null or readable for `len`
// doubles; `power` writable.
enum OkitStatus okit_circuit_power(const struct OkitCircuit *circuit,
                                   enum OkitDriveMode mode,
                                   const double *drive,
                                   size_t len,
                                   double *power);

// Current-drive power form `K0`, row-major.
//
// # Safety
// `circuit` must be a live handle; `out` null or writable for `cap` doubles; `len` writable.
enum OkitStatus okit_circuit_k0(const struct OkitCircuit *circuit,
                                double *out,
                                size_t cap,
                                size_t *len);

// Voltage-drive power form `Sigma1`, row-major.
//
// # Safety
// As for [`okit_circuit_k0`].
enum OkitStatus okit_circuit_sigma1(const struct OkitCircuit *circuit,
                                    double *out,
                                    size_t cap,
                                    size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OBLIQUE_KIT_H */
