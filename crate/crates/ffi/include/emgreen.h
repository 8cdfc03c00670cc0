#ifndef EMGREEN_H
#define EMGREEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum EgStatus {
  EG_STATUS_OK = 0,
  EG_STATUS_NULL_POINTER = 1,
  EG_STATUS_INVALID_UTF8 = 2,
  EG_STATUS_DOMAIN = 3,
  EG_STATUS_POLE_PROXIMITY = 4,
  EG_STATUS_INVALID_MODEL = 5,
  EG_STATUS_GAP_VIOLATION = 6,
  EG_STATUS_PERIODICITY = 7,
  EG_STATUS_SINGULAR = 8,
  EG_STATUS_QUADRATURE = 9,
  EG_STATUS_NON_DECAYING = 10,
  EG_STATUS_NO_CONVERGENCE = 11,
  EG_STATUS_DIMENSION = 12,
  EG_STATUS_CONFIG = 13,
  EG_STATUS_PANIC = 14,
} EgStatus;

// Layered permittivity model.
typedef struct EgModel EgModel;

// Assembled and lazily factored Helmholtz operator.
typedef struct EgOperator EgOperator;

typedef struct EgComplex {
  double re;
  double im;
} EgComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`) and returns the full message length in bytes, or 0
// when no error has occurred.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t eg_last_error_message(char *buf, size_t len);

// Parses a medium description in TOML.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum EgStatus eg_model_from_toml(const char *text, struct EgModel **out);

// Vacuum model.
//
// # Safety
// `out` must be a valid pointer.
enum EgStatus eg_model_vacuum(struct EgModel **out);

// # Safety
// `model` must be null or a handle from this library not yet freed.
void eg_model_free(struct EgModel *model);

// ε(x, z) for Im z ≥ 0.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum EgStatus eg_model_eval(const struct EgModel *model,
                            double x,
                            struct EgComplex z,
                            struct EgComplex *out);

// Dispersive operator on `n` interior points of a Dirichlet cell [0, length].
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum EgStatus eg_helmholtz_assemble(const struct EgModel *model,
                                    double length,
                                    size_t n,
                                    struct EgComplex z,
                                    struct EgOperator **out);

// Dispersive operator on a Bloch cell with wavevector `k`.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum EgStatus eg_helmholtz_assemble_bloch(const struct EgModel *model,
                                          double length,
                                          size_t n,
                                          struct EgComplex k,
                                          struct EgComplex z,
                                          struct EgOperator **out);

// Two-frequency operator z²ε(ξ) + d²/dx² on a Dirichlet cell.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum EgStatus eg_helmholtz_assemble_two_frequency(const struct EgModel *model,
                                                  double length,
                                                  size_t n,
                                                  struct EgComplex z,
                                                  struct EgComplex xi,
                                                  struct EgOperator **out);

// # Safety
// `op` must be null or a handle from this library not yet freed.
void eg_operator_free(struct EgOperator *op);

// Number of grid points of an operator.
//
// # Safety
// `op` must be null or a live handle.
size_t eg_operator_len(const struct EgOperator *op);

// Solves H·field = source; `residual` (may be null) receives the relative
// residual.
//
// # Safety
// `source` and `field` must each hold `len` elements, `len` must equal the
// operator size.
enum EgStatus eg_solve(const struct EgOperator *op,
                       const struct EgComplex *source,
                       struct EgComplex *field,
                       size_t len,
                       double *residual);

// Spectral norm of H⁻¹.
//
// # Safety
// `op` must be a live handle and `out` a valid pointer.
enum EgStatus eg_inverse_norm(const struct EgOperator *op, double *out);

// Continuum bound 1/(|z| Im z) on the norm of H⁻¹.
//
// # Safety
// `out` must be a valid pointer.
enum EgStatus eg_norm_bound(struct EgComplex z, double *out);

// Green samples G[i][j] written row-major into `out`, which must hold
// `len = n·n` elements.
//
// # Safety
// `out` must point to `len` writable elements.
enum EgStatus eg_green_matrix(const struct EgOperator *op, struct EgComplex *out, size_t len);

// ξ = ν + (ω0² − ν²)/z.
//
// # Safety
// `out` must be a valid pointer.
enum EgStatus eg_xi_map(struct EgComplex z, double nu, double omega0, struct EgComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EMGREEN_H */
