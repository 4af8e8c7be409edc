"""Entropic and distinguishability functionals (all logarithms base 2)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import (
    ValidationError,
    as_square_matrix,
    check_density_matrix,
    check_orthonormal_columns,
    check_probabilities,
    check_probability,
)
from .linalg import clip_spectrum, partial_trace, psd_sqrt

__all__ = [
    "EnvEnsemble",
    "Povm",
    "SUPPORT_TOL",
    "xlog2x",
    "shannon_entropy",
    "binary_entropy",
    "von_neumann_entropy",
    "relative_entropy",
    "dephase",
    "coherence_rel_entropy",
    "fidelity",
    "joint_probabilities",
    "conditional_entropy",
    "holevo_chi",
    "quantum_mutual_info",
]

SUPPORT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EnvEnsemble:
    """Probabilities ``p_i`` with conditional environment states ``rho_i``."""

    probs: np.ndarray
    states: tuple

    def __post_init__(self):
        probs = check_probabilities(self.probs)
        states = tuple(check_density_matrix(s, f"states[{i}]") for i, s in enumerate(self.states))
        if len(states) != probs.size:
            raise ValidationError(f"{probs.size} probabilities but {len(states)} states")
        if len({s.shape for s in states}) != 1:
            raise ValidationError("ensemble states must share one dimension")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def __len__(self):
        return len(self.states)

    def stacked(self) -> np.ndarray:
        return np.stack(self.states)

    def mixture(self) -> np.ndarray:
        return np.einsum("i,iab->ab", self.probs, self.stacked())


@dataclass(frozen=True, eq=False)
class Povm:
    """A finite list of PSD operators summing to the identity."""

    elements: tuple

    def __post_init__(self, tol=1e-10):
        els = tuple(as_square_matrix(m, f"elements[{k}]") for k, m in enumerate(self.elements))
        if not els:
            raise ValidationError("a POVM needs at least one element")
        if len({m.shape for m in els}) != 1:
            raise ValidationError("POVM elements must share one dimension")
        for k, m in enumerate(els):
            if np.max(np.abs(m - m.conj().T)) > tol:
                raise ValidationError(f"POVM element {k} is not Hermitian")
            if np.linalg.eigvalsh(m).min() < -tol:
                raise ValidationError(f"POVM element {k} is not positive semidefinite")
        err = np.max(np.abs(sum(els) - np.eye(els[0].shape[0])))
        if err > tol:
            raise ValidationError(f"POVM elements do not sum to identity (error {err:.3g})")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    def stacked(self) -> np.ndarray:
        return np.stack(self.elements)

    @classmethod
    def from_isometry(cls, a):
        """Rank-one POVM ``M_m = a_m^H a_m`` from the rows of an isometry ``a`` (n x d)."""
        a = np.asarray(a, dtype=complex)
        return cls(tuple(np.outer(row.conj(), row) for row in a))

    @classmethod
    def projective(cls, basis):
        basis = check_orthonormal_columns(basis)
        return cls(tuple(np.outer(v, v.conj()) for v in basis.T))


def xlog2x(x):
    """Elementwise ``x log2 x`` with the ``0 log 0 = 0`` convention."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


def shannon_entropy(probs) -> float:
    return float(max(0.0, -np.sum(xlog2x(probs))))


def binary_entropy(p) -> float:
    p = check_probability(p)
    return shannon_entropy([p, 1.0 - p])


def von_neumann_entropy(rho) -> float:
    """``S(rho) = -Tr rho log2 rho`` in bits."""
    w = clip_spectrum(np.linalg.eigvalsh(_herm(rho)))
    return shannon_entropy(w)


def _herm(a):
    a = as_square_matrix(a)
    return 0.5 * (a + a.conj().T)


def relative_entropy(rho, sigma) -> float:
    """``S(rho || sigma)`` in bits; ``math.inf`` when supp(rho) is not inside supp(sigma)."""
    rho, sigma = _herm(rho), _herm(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    ws, vs = np.linalg.eigh(sigma)
    ws = clip_spectrum(ws)
    # populations of rho in the eigenbasis of sigma
    pops = np.real(np.einsum("ai,ab,bi->i", vs.conj(), rho, vs))
    null = ws < SUPPORT_TOL
    if np.any(pops[null] > SUPPORT_TOL):
        return math.inf
    cross = float(np.sum(pops[~null] * np.log2(ws[~null])))
    val = -von_neumann_entropy(rho) - cross
    return max(val, 0.0)


def dephase(rho, basis=None) -> np.ndarray:
    """Completely dephase ``rho`` in ``basis`` (columns; computational basis by default)."""
    rho = as_square_matrix(rho, "rho")
    if basis is None:
        return np.diag(np.diag(rho))
    basis = check_orthonormal_columns(basis)
    if basis.shape != rho.shape:
        raise ValidationError("basis must be a complete orthonormal basis for rho")
    pops = np.einsum("ai,ab,bi->i", basis.conj(), rho, basis)
    return (basis * pops) @ basis.conj().T


def coherence_rel_entropy(rho, basis=None) -> float:
    """Relative entropy of coherence ``S(Delta(rho)) - S(rho)``."""
    val = von_neumann_entropy(dephase(rho, basis)) - von_neumann_entropy(rho)
    return max(val, 0.0)


def fidelity(rho, sigma) -> float:
    """Generalized overlap ``B = Tr sqrt(sqrt(rho) sigma sqrt(rho))``.

    Evaluated as the trace norm of ``sqrt(rho) sqrt(sigma)``, which is
    symmetric in the two arguments by construction.
    """
    rho, sigma = _herm(rho), _herm(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    sv = np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)
    return float(min(1.0, sv.sum()))


def joint_probabilities(e: EnvEnsemble, m: Povm) -> np.ndarray:
    """Table ``P[i, m] = p_i Tr[rho_i M_m]``."""
    if e.dim != m.dim:
        raise ValidationError(f"ensemble dimension {e.dim} does not match POVM dimension {m.dim}")
    tr = np.real(np.einsum("iab,mba->im", e.stacked(), m.stacked()))
    return np.clip(e.probs[:, None] * tr, 0.0, None)


def conditional_entropy(e: EnvEnsemble, m: Povm) -> float:
    """Shannon conditional entropy ``H(I|M)`` of the index given the outcome."""
    joint = joint_probabilities(e, m)
    val = shannon_entropy(joint.ravel()) - shannon_entropy(joint.sum(axis=0))
    return float(min(max(val, 0.0), shannon_entropy(e.probs)))


def holevo_chi(e: EnvEnsemble) -> float:
    """Holevo quantity ``S(sum p_i rho_i) - sum p_i S(rho_i)``."""
    avg = sum(p * von_neumann_entropy(s) for p, s in zip(e.probs, e.states))
    return max(von_neumann_entropy(e.mixture()) - avg, 0.0)


def quantum_mutual_info(sigma, dims=None) -> float:
    """``I(S:E) = S(sigma_S) + S(sigma_E) - S(sigma_SE)`` for a bipartite state."""
    dims = getattr(sigma, "dims", None) if dims is None else dims
    if dims is None or len(dims) != 2:
        raise ValidationError("quantum_mutual_info needs two subsystem dimensions")
    s_s = von_neumann_entropy(partial_trace(sigma, 0, dims))
    s_e = von_neumann_entropy(partial_trace(sigma, 1, dims))
    return max(s_s + s_e - von_neumann_entropy(sigma), 0.0)


def entanglement_entropy(psi_or_rho, dims) -> float:
    """Entropy of the system marginal; equals E_r for pure bipartite states."""
    return von_neumann_entropy(partial_trace(psi_or_rho, 0, dims))

