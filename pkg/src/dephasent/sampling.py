"""Seeded random generators for operators, states and measurements."""

from __future__ import annotations

import numpy as np


def as_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(d, n=None, rng=None):
    rng = as_rng(rng)
    n = d if n is None else n
    return (rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n))) / np.sqrt(2)


def random_hermitian(d, scale=1.0, rng=None):
    """Hermitian matrix from symmetrized independent Gaussian entries."""
    g = ginibre(d, rng=rng)
    return scale * 0.5 * (g + g.conj().T)


def random_unitary(d, rng=None):
    """Haar-random unitary via QR with phase correction."""
    q, r = np.linalg.qr(ginibre(d, rng=rng))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d, rank=None, rng=None):
    """Normalized Wishart-like state ``G G^H / Tr``; ``rank=1`` gives a pure state."""
    g = ginibre(d, d if rank is None else rank, rng=rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(d, rng=None):
    return random_density(d, rank=1, rng=rng)


def random_probabilities(n, rng=None):
    return as_rng(rng).dirichlet(np.ones(n))


def random_povm(d, n_outcomes=None, rng=None):
    """Random POVM with ``n_outcomes`` elements: ``S^{-1/2} W_m S^{-1/2}``."""
    rng = as_rng(rng)
    n_outcomes = d * d if n_outcomes is None else n_outcomes
    ws = [g @ g.conj().T for g in (ginibre(d, rng=rng) for _ in range(n_outcomes))]
    s = sum(ws)
    w, v = np.linalg.eigh(s)
    s_isqrt = (v / np.sqrt(w)) @ v.conj().T
    return [s_isqrt @ m @ s_isqrt for m in ws]


def mixed_coherent_state(d, alpha, bias=0.0, phases=None):
    """Two-parameter family ``(1 - alpha)|psi><psi| + alpha I/d``.

    ``|psi>`` has populations proportional to ``exp(-bias * i)`` and the given
    relative phases. With ``d=2, bias=0`` and zero phases this is the mixture of
    ``|+><+|`` with the maximally mixed state.
    """
    q = np.exp(-bias * np.arange(d))
    q /= q.sum()
    ph = np.zeros(d) if phases is None else np.asarray(phases, dtype=float)
    psi = np.sqrt(q) * np.exp(1j * ph)
    return (1 - alpha) * np.outer(psi, psi.conj()) + alpha * np.eye(d) / d
