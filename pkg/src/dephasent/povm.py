"""Maximizing classical mutual information over POVMs on an environment ensemble.

The optimizer works on rank-one POVMs ``M_m = a_m^H a_m`` where the rows
``a_m`` of an ``n x d`` isometry ``A`` (``A^H A = I``) are the measurement
vectors. Local search is Riemannian gradient ascent on that set, started from
a handful of structured candidates and from seeded random isometries. The
returned value is a lower estimate of the accessible information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import ValidationError, check_probability
from .info import EnvEnsemble, Povm, binary_entropy, conditional_entropy, fidelity, shannon_entropy
from .linalg import psd_sqrt
from .sampling import ginibre

__all__ = [
    "PovmSearchConfig",
    "PovmOptimizer",
    "mutual_info_classical",
    "optimize_povm",
    "two_state_info_bound",
    "eigenbasis_povm",
    "pretty_good_povm",
    "fidelity_povm",
]


@dataclass(frozen=True)
class PovmSearchConfig:
    n_outcomes: int | None = None
    restarts: int = 16
    max_iters: int = 500
    step_tolerance: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.n_outcomes is not None and self.n_outcomes < 2:
            raise ValidationError("n_outcomes must be at least 2")
        if self.restarts < 0 or self.max_iters < 1 or self.step_tolerance <= 0:
            raise ValidationError("restarts must be >= 0, max_iters and step_tolerance positive")


def mutual_info_classical(e: EnvEnsemble, m: Povm) -> float:
    """``I(I:M) = H(I) - H(I|M)`` for the ensemble measured with ``m``."""
    h_i = shannon_entropy(e.probs)
    return float(min(max(h_i - conditional_entropy(e, m), 0.0), h_i))


def two_state_info_bound(p, b) -> float:
    """Lower bound ``h(p) - 2 sqrt(p(1-p)) b`` on two-state accessible information."""
    p = check_probability(p, "p")
    b = check_probability(b, "b")
    return binary_entropy(p) - 2.0 * math.sqrt(p * (1.0 - p)) * b


def _mi_and_grad(a, states, probs):
    ar = np.einsum("md,kde->kme", a, states)
    joint = probs[:, None] * np.real(np.einsum("kme,me->km", ar, a.conj()))
    joint = np.clip(joint, 0.0, None)
    pm = joint.sum(axis=0)
    denom = probs[:, None] * pm[None, :]
    mask = (joint > 1e-300) & (denom > 1e-300)
    log_ratio = np.zeros_like(joint)
    log_ratio[mask] = np.log2(joint[mask] / denom[mask])
    mi = float(np.sum(joint[mask] * log_ratio[mask]))
    grad = np.einsum("km,kme->me", log_ratio * probs[:, None], ar)
    return mi, grad


def _polar(x):
    u, _, vh = np.linalg.svd(x, full_matrices=False)
    return u @ vh


def _ascend(a, states, probs, max_iters, step_tolerance):
    """Riemannian gradient ascent of the mutual information on the isometry set."""
    mi, g = _mi_and_grad(a, states, probs)
    step = 0.5
    for _ in range(max_iters):
        ahg = a.conj().T @ g
        xi = g - a @ (0.5 * (ahg + ahg.conj().T))
        norm = np.linalg.norm(xi)
        if norm < 1e-14:
            break
        improved = False
        while step > 1e-10:
            cand = _polar(a + (step / norm) * xi)
            mi_c, g_c = _mi_and_grad(cand, states, probs)
            if mi_c > mi:
                gain = mi_c - mi
                a, mi, g = cand, mi_c, g_c
                step = min(step * 1.5, 2.0)
                improved = True
                break
            step *= 0.5
        if not improved or gain < step_tolerance:
            break
    return a, mi


def _rank_one_rows(elements, n_outcomes, d):
    """Rows of an isometry reproducing a POVM, or None if it needs more than ``n_outcomes`` rows."""
    rows = []
    for m in elements:
        w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
        for lam, vec in zip(w, v.T):
            if lam > 1e-14:
                rows.append(np.sqrt(lam) * vec.conj())
    if len(rows) > n_outcomes:
        return None
    a = np.zeros((n_outcomes, d), dtype=complex)
    a[: len(rows)] = rows
    return _polar(a) if rows else None


def eigenbasis_povm(e: EnvEnsemble) -> Povm:
    """Projective measurement in the eigenbasis of the average environment state."""
    _, v = np.linalg.eigh(e.mixture())
    return Povm.projective(v)


def pretty_good_povm(e: EnvEnsemble) -> Povm:
    """Square-root measurement ``S^{-1/2} p_i rho_i S^{-1/2}`` completed on the kernel of ``S``."""
    s = e.mixture()
    w, v = np.linalg.eigh(0.5 * (s + s.conj().T))
    keep = w > 1e-12
    s_isqrt = (v[:, keep] / np.sqrt(w[keep])) @ v[:, keep].conj().T
    els = [s_isqrt @ (p * r) @ s_isqrt for p, r in zip(e.probs, e.states)]
    kernel = v[:, ~keep] @ v[:, ~keep].conj().T
    if np.any(~keep):
        els[0] = els[0] + kernel
    els = [0.5 * (m + m.conj().T) for m in els]
    return Povm(tuple(els))


def fidelity_povm(rho0, rho1, reg=1e-12) -> Povm:
    """Projective measurement whose outcome statistics attain the state fidelity.

    It measures in the eigenbasis of ``rho0^{-1/2} (rho0^{1/2} rho1 rho0^{1/2})^{1/2} rho0^{-1/2}``;
    a small regularization handles singular ``rho0``.
    """
    d = rho0.shape[0]
    r0 = rho0 + reg * np.eye(d)
    s0 = psd_sqrt(r0)
    w, v = np.linalg.eigh(0.5 * (r0 + r0.conj().T))
    s0_inv = (v / np.sqrt(w)) @ v.conj().T
    mid = psd_sqrt(s0 @ rho1 @ s0)
    op = s0_inv @ mid @ s0_inv
    _, basis = np.linalg.eigh(0.5 * (op + op.conj().T))
    return Povm.projective(basis)


def _qubit_grid_povm(e: EnvEnsemble, n_polar, n_azimuth) -> Povm:
    theta = (np.arange(n_polar) + 0.5) * np.pi / n_polar
    phi = np.arange(n_azimuth) * 2 * np.pi / n_azimuth
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    nx, ny, nz = np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)
    states = e.stacked()
    bx = 2 * np.real(states[:, 0, 1])
    by = -2 * np.imag(states[:, 0, 1])
    bz = np.real(states[:, 0, 0] - states[:, 1, 1])
    # P(+ | i) = (1 + n . r_i) / 2 for each direction n
    plus = 0.5 * (1 + bx[:, None, None] * nx + by[:, None, None] * ny + bz[:, None, None] * nz)
    plus = np.clip(plus, 0.0, 1.0)
    probs = e.probs[:, None, None]
    joint = np.stack([probs * plus, probs * (1 - plus)], axis=-1)
    pm = joint.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = joint / (probs[..., None] * pm[None])
        terms = np.where(joint > 0, joint * np.log2(np.where(joint > 0, ratio, 1.0)), 0.0)
    mi = terms.sum(axis=(0, 3))
    i, j = np.unravel_index(np.argmax(mi), mi.shape)
    n = np.array([nx[i, j], ny[i, j], nz[i, j]])
    pauli = (np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]]))
    ns = sum(c * p for c, p in zip(n, pauli))
    eye = np.eye(2)
    return Povm((0.5 * (eye + ns), 0.5 * (eye - ns)))


class PovmOptimizer(BaseEstimator):
    """Search for the POVM maximizing ``I(I:M)`` on an environment ensemble.

    Parameters
    ----------
    n_outcomes : int, optional
        Number of rank-one POVM elements; ``d_E**2`` when omitted.
    restarts : int
        Random restarts on top of the structured starting points.
    max_iters : int
        Iteration cap for each local ascent.
    step_tolerance : float
        Ascent stops once an accepted step gains less than this (bits).
    seed : int
        Restart ``r`` draws from ``np.random.default_rng([seed, r])``.
    qubit_grid : tuple of int
        Polar x azimuth resolution of the projective grid used for qubit environments.

    Attributes
    ----------
    povm_ : Povm
    mutual_info_ : float
        Mutual information at ``povm_``; a lower estimate of the accessible information.
    candidate_values_ : list of float
        Value reached from each start, in start order.
    two_state_bound_ : float or None
        For two-element ensembles, ``h(p) - 2 sqrt(p(1-p)) B(rho_0, rho_1)``.
    """

    def __init__(self, n_outcomes=None, restarts=16, max_iters=500, step_tolerance=1e-8, seed=0, qubit_grid=(256, 128)):
        self.n_outcomes = n_outcomes
        self.restarts = restarts
        self.max_iters = max_iters
        self.step_tolerance = step_tolerance
        self.seed = seed
        self.qubit_grid = qubit_grid

    def _starts(self, e: EnvEnsemble):
        starts = [eigenbasis_povm(e), pretty_good_povm(e)]
        if len(e) == 2:
            starts.append(fidelity_povm(e.states[0], e.states[1]))
        if e.dim == 2 and self.qubit_grid:
            starts.append(_qubit_grid_povm(e, *self.qubit_grid))
        return starts

    def fit(self, e: EnvEnsemble, y=None):
        cfg = PovmSearchConfig(self.n_outcomes, self.restarts, self.max_iters, self.step_tolerance, self.seed)
        d = e.dim
        n = cfg.n_outcomes or d * d
        if n < d:
            raise ValidationError(f"n_outcomes={n} cannot complete a POVM in dimension {d}")
        states, probs = e.stacked(), e.probs

        best_val, best_povm = -np.inf, None
        values = []

        def consider(val, povm):
            nonlocal best_val, best_povm
            values.append(val)
            # strict improvement: earlier starts win ties
            if val > best_val:
                best_val, best_povm = val, povm

        for start in self._starts(e):
            consider(mutual_info_classical(e, start), start)
            a0 = _rank_one_rows(start.elements, n, d)
            if a0 is not None:
                a, _ = _ascend(a0, states, probs, cfg.max_iters, cfg.step_tolerance)
                povm = Povm.from_isometry(a)
                consider(mutual_info_classical(e, povm), povm)
        for r in range(cfg.restarts):
            rng = np.random.default_rng([cfg.seed, r])
            a, _ = _ascend(_polar(ginibre(n, d, rng)), states, probs, cfg.max_iters, cfg.step_tolerance)
            povm = Povm.from_isometry(a)
            consider(mutual_info_classical(e, povm), povm)

        self.povm_ = best_povm
        self.mutual_info_ = float(best_val)
        self.candidate_values_ = values
        self.two_state_bound_ = None
        if len(e) == 2:
            self.two_state_bound_ = two_state_info_bound(float(e.probs[0]), fidelity(*e.states))
        return self


def optimize_povm(e: EnvEnsemble, cfg: PovmSearchConfig | None = None):
    """Return ``(povm, value)`` with ``value = mutual_info_classical(e, povm)``."""
    cfg = cfg or PovmSearchConfig()
    opt = PovmOptimizer(cfg.n_outcomes, cfg.restarts, cfg.max_iters, cfg.step_tolerance, cfg.seed).fit(e)
    return opt.povm_, opt.mutual_info_
