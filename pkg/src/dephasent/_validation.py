"""Input validation helpers shared by the public API."""

from __future__ import annotations

import numbers

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


class ValidationError(ValueError):
    """Raised when an input violates a documented invariant."""


def as_square_matrix(a, name="matrix"):
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr.astype(complex, copy=False)


def check_hermitian(a, name="matrix", tol=HERMITIAN_TOL):
    """Return ``a`` as a complex square array, raising if it is not Hermitian."""
    arr = as_square_matrix(a, name)
    err = np.max(np.abs(arr - arr.conj().T)) if arr.size else 0.0
    if err > tol:
        raise ValidationError(f"{name} is not Hermitian (max |A - A^H| = {err:.3g})")
    return arr


def check_dims(dims, dim):
    """Validate a subsystem-dimension tuple against a total dimension."""
    if dims is None:
        return (dim,)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValidationError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != dim:
        raise ValidationError(f"subsystem dimensions {dims} do not multiply to {dim}")
    return dims


def check_density_matrix(rho, name="state", hermitian_tol=1e-12, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
    """Check the three density-matrix invariants and return a complex array."""
    arr = check_hermitian(rho, name, tol=hermitian_tol)
    tr = np.trace(arr)
    if abs(tr - 1.0) > trace_tol:
        raise ValidationError(f"{name} does not have unit trace (Tr = {tr.real:.15g})")
    lam_min = np.linalg.eigvalsh(arr).min()
    if lam_min < -psd_tol:
        raise ValidationError(f"{name} is not positive semidefinite (min eigenvalue {lam_min:.3g})")
    return arr


def check_probability(p, name="p"):
    if not isinstance(p, numbers.Real) or not 0.0 <= float(p) <= 1.0:
        raise ValidationError(f"{name} must be a probability in [0, 1], got {p!r}")
    return float(p)


def check_probabilities(probs, name="probs", tol=1e-12):
    arr = np.asarray(probs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-D array")
    if np.any(arr < 0):
        raise ValidationError(f"{name} must be nonnegative")
    if abs(arr.sum() - 1.0) > tol:
        raise ValidationError(f"{name} must sum to 1 (sum = {arr.sum():.15g})")
    return arr


def check_orthonormal_columns(basis, name="basis", tol=1e-10):
    arr = np.asarray(basis, dtype=complex)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be a 2-D array of column vectors")
    gram = arr.conj().T @ arr
    err = np.max(np.abs(gram - np.eye(arr.shape[1])))
    if err > tol:
        raise ValidationError(f"{name} columns are not orthonormal (error {err:.3g})")
    return arr
