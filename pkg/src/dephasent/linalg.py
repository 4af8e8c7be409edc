"""Dense Hermitian linear algebra for small multipartite quantum states.

Subsystem ordering follows the convention used throughout the package:
index 0 is the system (left tensor factor), index 1 the environment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._validation import (
    PSD_TOL,
    ValidationError,
    as_square_matrix,
    check_density_matrix,
    check_dims,
    check_hermitian,
)

__all__ = [
    "DensityMatrix",
    "SpectralDecomposition",
    "tensor",
    "partial_trace",
    "partial_transpose",
    "herm_eig",
    "mat_func",
    "clip_spectrum",
    "ket_to_dm",
]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated, immutable density matrix with subsystem bookkeeping.

    ``data`` is stored read-only; arithmetic should go through ``np.asarray(rho)``.
    """

    data: np.ndarray
    dims: tuple = field(default=None)

    def __post_init__(self):
        arr = check_density_matrix(self.data)
        arr = np.array(arr, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "dims", check_dims(self.dims, arr.shape[0]))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, dims={self.dims})"


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _dims_of(a, dims=None):
    if dims is not None:
        return tuple(dims)
    if isinstance(a, DensityMatrix):
        return a.dims
    return (np.asarray(a).shape[0],)


def tensor(a, b):
    """Kronecker product ``a ⊗ b``.

    DensityMatrix inputs give a DensityMatrix with concatenated subsystem
    dimensions; plain arrays give a plain array.
    """
    prod = np.kron(np.asarray(a), np.asarray(b))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        # kron of two valid states is valid; skip the eigen-check on the product
        out = object.__new__(DensityMatrix)
        prod = np.array(prod, dtype=complex)
        prod.setflags(write=False)
        object.__setattr__(out, "data", prod)
        object.__setattr__(out, "dims", a.dims + b.dims)
        return out
    return prod


def _check_subsystem(index, n):
    if not isinstance(index, (int, np.integer)) or not 0 <= index < n:
        raise ValidationError(f"invalid subsystem index {index!r} for {n} subsystems")
    return int(index)


def partial_trace(rho, keep, dims=None):
    """Reduce ``rho`` onto the subsystem(s) ``keep``.

    Parameters
    ----------
    rho : array_like or DensityMatrix
        Operator on the composite space.
    keep : int or sequence of int
        Subsystem index (or indices, in increasing order) to keep.
    dims : sequence of int, optional
        Subsystem dimensions; taken from ``rho.dims`` for DensityMatrix input.
    """
    arr = as_square_matrix(rho, "rho")
    dims = check_dims(_dims_of(rho, dims), arr.shape[0])
    n = len(dims)
    if n < 2:
        raise ValidationError("partial_trace needs at least two subsystems")
    keep_list = [keep] if np.isscalar(keep) else list(keep)
    keep_list = sorted(_check_subsystem(k, n) for k in keep_list)
    trace_out = [i for i in range(n) if i not in keep_list]

    t = arr.reshape(dims + dims)
    # contract traced indices pairwise, highest first so axis numbers stay valid
    for i in sorted(trace_out, reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + cur)
    d_keep = int(np.prod([dims[k] for k in keep_list]))
    out = t.reshape(d_keep, d_keep)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(0.5 * (out + out.conj().T), dims=tuple(dims[k] for k in keep_list))
    return out


def partial_transpose(rho, subsystem=1, dims=None):
    """Transpose only the factor ``subsystem`` of a bipartite operator."""
    arr = as_square_matrix(rho, "rho")
    dims = check_dims(_dims_of(rho, dims), arr.shape[0])
    if len(dims) != 2:
        raise ValidationError("partial_transpose expects exactly two subsystems")
    sub = _check_subsystem(subsystem, 2)
    da, db = dims
    t = arr.reshape(da, db, da, db)
    t = t.transpose(2, 1, 0, 3) if sub == 0 else t.transpose(0, 3, 2, 1)
    return t.reshape(da * db, da * db)


def herm_eig(h, tol=1e-10) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    arr = check_hermitian(h, "h", tol=tol)
    arr = 0.5 * (arr + arr.conj().T)
    w, v = np.linalg.eigh(arr)
    return SpectralDecomposition(w, v)


def clip_spectrum(w, tol=PSD_TOL):
    """Clip eigenvalues in ``[-tol, 0)`` to zero; anything more negative is an error."""
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -tol:
        raise ValidationError(f"operator is not positive semidefinite (eigenvalue {w.min():.3g})")
    return np.clip(w, 0.0, None)


def mat_func(h, f: Callable[[np.ndarray], np.ndarray], tol=1e-10):
    """Apply the scalar function ``f`` to a Hermitian matrix through its eigenbasis.

    ``f`` receives the full eigenvalue array and must return an array of the
    same length; it is responsible for raising on eigenvalues outside its domain.
    """
    w, v = herm_eig(h, tol=tol)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w))
    if fw.shape != w.shape or not np.all(np.isfinite(fw)):
        raise ValidationError("f is undefined on part of the spectrum")
    return (v * fw) @ v.conj().T


def psd_sqrt(h):
    """Matrix square root of a PSD matrix, with the small-negative clipping rule."""
    return mat_func(h, lambda w: np.sqrt(clip_spectrum(w)))


def ket_to_dm(psi: Sequence[complex]) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())
