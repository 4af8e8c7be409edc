"""Two-sided brackets on the relative entropy of entanglement of small bipartite states.

The upper bracket minimizes ``S(sigma || xi)`` over separable states of the form
``xi = sum_k w_k |a_k><a_k| ⊗ |b_k><b_k|``. Any such ``xi`` is feasible, so every
value found is a certified upper bound. The lower bracket is the larger of zero
and the two negative conditional entropies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from sklearn.base import BaseEstimator

from ._validation import ValidationError, check_density_matrix, check_dims
from .info import relative_entropy, von_neumann_entropy
from .linalg import partial_trace, partial_transpose

__all__ = [
    "SeparableAnsatz",
    "SeparableBracket",
    "is_ppt",
    "ree_lower_bracket",
    "ree_upper_bracket",
    "MAX_DIM",
]

MAX_DIM = 36
BLEND = 1e-9
PPT_TOL = 1e-10


def _bipartite(sigma, dims):
    dims = getattr(sigma, "dims", None) if dims is None else dims
    arr = check_density_matrix(sigma, "sigma")
    if dims is None:
        raise ValidationError("bipartite dimensions are required")
    dims = check_dims(dims, arr.shape[0])
    if len(dims) != 2:
        raise ValidationError("expected exactly two subsystems")
    return arr, dims


@dataclass(frozen=True, eq=False)
class SeparableAnsatz:
    """Convex combination of product pure states, an explicit separable state."""

    weights: np.ndarray
    system_factors: np.ndarray  # (k, d_S) unit vectors
    env_factors: np.ndarray  # (k, d_E) unit vectors

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        a = np.asarray(self.system_factors, dtype=complex)
        b = np.asarray(self.env_factors, dtype=complex)
        if w.ndim != 1 or a.shape[0] != w.size or b.shape[0] != w.size:
            raise ValidationError("weights and factor arrays must have matching length")
        if np.any(w < -1e-15) or abs(w.sum() - 1.0) > 1e-10:
            raise ValidationError("weights must be a probability vector")
        for name, f in (("system", a), ("environment", b)):
            if np.max(np.abs(np.linalg.norm(f, axis=1) - 1.0)) > 1e-10:
                raise ValidationError(f"{name} factors must be normalized")
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))
        object.__setattr__(self, "system_factors", a)
        object.__setattr__(self, "env_factors", b)

    @property
    def dims(self):
        return (self.system_factors.shape[1], self.env_factors.shape[1])

    def state(self) -> np.ndarray:
        c = np.einsum("ka,kb->kab", self.system_factors, self.env_factors).reshape(len(self.weights), -1)
        return np.einsum("k,ka,kb->ab", self.weights, c, c.conj())

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "system_factors": {"re": self.system_factors.real.tolist(), "im": self.system_factors.imag.tolist()},
            "env_factors": {"re": self.env_factors.real.tolist(), "im": self.env_factors.imag.tolist()},
        }

    @classmethod
    def from_dict(cls, d):
        def cm(x):
            return np.asarray(x["re"], dtype=float) + 1j * np.asarray(x["im"], dtype=float)

        return cls(np.asarray(d["weights"], dtype=float), cm(d["system_factors"]), cm(d["env_factors"]))


def is_ppt(sigma, dims=None):
    """Peres test: ``(passes, min eigenvalue of the partial transpose)``."""
    arr, dims = _bipartite(sigma, dims)
    pt = partial_transpose(arr, 1, dims)
    lam = float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T)).min())
    return lam >= -PPT_TOL, lam


def ree_lower_bracket(sigma, dims=None) -> float:
    """``max{0, S(sigma_S) - S(sigma), S(sigma_E) - S(sigma)}``."""
    arr, dims = _bipartite(sigma, dims)
    s = von_neumann_entropy(arr)
    s_s = von_neumann_entropy(partial_trace(arr, 0, dims))
    s_e = von_neumann_entropy(partial_trace(arr, 1, dims))
    return max(0.0, s_s - s, s_e - s)


# -- objective -----------------------------------------------------------------


class _Objective:
    """``S(sigma || xi_blend)`` and its gradient in unconstrained coordinates."""

    def __init__(self, sigma, dims, k):
        self.sigma = sigma
        self.ds, self.de = dims
        self.k = k
        self.dim = self.ds * self.de
        self.neg_entropy = -von_neumann_entropy(sigma)

    def unpack(self, theta):
        k, ds, de = self.k, self.ds, self.de
        n_a, n_b = 2 * k * ds, 2 * k * de
        xa = theta[:n_a].reshape(2, k, ds)
        xb = theta[n_a:n_a + n_b].reshape(2, k, de)
        z = theta[n_a + n_b:]
        return xa[0] + 1j * xa[1], xb[0] + 1j * xb[1], z

    def pack(self, xa, xb, z):
        return np.concatenate([np.stack([xa.real, xa.imag]).ravel(), np.stack([xb.real, xb.imag]).ravel(), z])

    @staticmethod
    def softmax(z):
        e = np.exp(z - z.max())
        return e / e.sum()

    def __call__(self, theta):
        xa, xb, z = self.unpack(theta)
        na = np.linalg.norm(xa, axis=1)
        nb = np.linalg.norm(xb, axis=1)
        na = np.where(na > 1e-300, na, 1e-300)
        nb = np.where(nb > 1e-300, nb, 1e-300)
        a, b = xa / na[:, None], xb / nb[:, None]
        w = self.softmax(z)
        c = (a[:, :, None] * b[:, None, :]).reshape(self.k, self.dim)
        xi = (c.T * w) @ c.conj()
        xi = (1 - BLEND) * xi + BLEND * np.eye(self.dim) / self.dim
        lam, v = np.linalg.eigh(0.5 * (xi + xi.conj().T))
        lam = np.clip(lam, 1e-300, None)
        s_rot = v.conj().T @ self.sigma @ v
        ln = np.log(lam)
        val = self.neg_entropy - float(np.real(np.sum(np.diag(s_rot) * ln))) / math.log(2)

        # Frechet derivative of log at xi applied to sigma (divided differences)
        dl = lam[:, None] - lam[None, :]
        same = np.abs(dl) <= 1e-12 * np.maximum(lam[:, None], lam[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            gamma = np.where(same, 1.0 / lam[:, None], (ln[:, None] - ln[None, :]) / np.where(same, 1.0, dl))
        g = -(1 - BLEND) / math.log(2) * (v @ (gamma * s_rot) @ v.conj().T)

        # every partial derivative is read off G c_k
        gc = c @ g.T
        gk = np.real(np.sum(c.conj() * gc, axis=1))
        dz = w * (gk - np.dot(w, gk))
        gc3 = gc.reshape(self.k, self.ds, self.de) * w[:, None, None]
        h = w * gk
        gxa = (np.einsum("kae,ke->ka", gc3, b.conj()) - h[:, None] * a) / na[:, None]
        gxb = (np.einsum("kae,ka->ke", gc3, a.conj()) - h[:, None] * b) / nb[:, None]
        grad = self.pack(2 * gxa, 2 * gxb, dz)
        return val, grad

    def ansatz(self, theta) -> SeparableAnsatz:
        xa, xb, z = self.unpack(theta)
        a = xa / np.linalg.norm(xa, axis=1)[:, None]
        b = xb / np.linalg.norm(xb, axis=1)[:, None]
        return SeparableAnsatz(self.softmax(z), a, b)


# -- starting points -------------------------------------------------------------


def _cq_terms(sigma, dims, side, basis):
    """Product-pure decomposition of ``sigma`` dephased on one side in ``basis``."""
    ds, de = dims
    t = sigma.reshape(ds, de, ds, de)
    terms = []
    for vec in basis.T:
        if side == 0:
            block = np.einsum("a,aebf,b->ef", vec.conj(), t, vec)
        else:
            block = np.einsum("e,aebf,f->ab", vec.conj(), t, vec)
        w, u = np.linalg.eigh(0.5 * (block + block.conj().T))
        for lam, other in zip(w, u.T):
            if lam > 1e-14:
                terms.append((lam, vec, other) if side == 0 else (lam, other, vec))
    return terms


def _product_terms(sigma, dims):
    s_s = partial_trace(sigma, 0, dims)
    s_e = partial_trace(sigma, 1, dims)
    ws, us = np.linalg.eigh(s_s)
    we, ue = np.linalg.eigh(s_e)
    return [(p * q, us[:, i], ue[:, j]) for i, p in enumerate(ws) for j, q in enumerate(we) if p * q > 1e-14]


def _seed_terms(sigma, dims):
    ds, de = dims
    s_s = partial_trace(sigma, 0, dims)
    s_e = partial_trace(sigma, 1, dims)
    return [
        _product_terms(sigma, dims),
        _cq_terms(sigma, dims, 0, np.linalg.eigh(s_s)[1]),
        _cq_terms(sigma, dims, 0, np.eye(ds)),
        _cq_terms(sigma, dims, 1, np.linalg.eigh(s_e)[1]),
    ]


def _terms_to_theta(obj, terms, rng):
    k, ds, de = obj.k, obj.ds, obj.de
    terms = sorted(terms, key=lambda x: -x[0])[:k]
    xa = (rng.standard_normal((k, ds)) + 1j * rng.standard_normal((k, ds)))
    xb = (rng.standard_normal((k, de)) + 1j * rng.standard_normal((k, de)))
    w = np.full(k, 1e-10)
    for i, (lam, a, b) in enumerate(terms):
        w[i], xa[i], xb[i] = lam, a, b
    w = w / w.sum()
    return obj.pack(xa, xb, np.log(w))


def _random_theta(obj, rng):
    k = obj.k
    xa = rng.standard_normal((k, obj.ds)) + 1j * rng.standard_normal((k, obj.ds))
    xb = rng.standard_normal((k, obj.de)) + 1j * rng.standard_normal((k, obj.de))
    return obj.pack(xa, xb, rng.standard_normal(k))


class SeparableBracket(BaseEstimator):
    """Bracket ``E_r`` of a bipartite state between a lower and an upper bound.

    Parameters
    ----------
    n_terms : int, optional
        Product terms in the separable ansatz, ``(d_S d_E)**2`` when omitted.
    restarts : int
        Random restarts on top of the deterministic starting points.
    max_iter : int
        L-BFGS iteration cap per start.
    seed : int
        Restart ``r`` draws from ``np.random.default_rng([seed, r])``.

    Attributes
    ----------
    lower_, upper_ : float
        The bracket; ``upper_`` may be ``math.inf`` if no start has adequate support.
    ansatz_ : SeparableAnsatz
        Certificate for ``upper_``.
    """

    def __init__(self, n_terms=None, restarts=4, max_iter=300, seed=0):
        self.n_terms = n_terms
        self.restarts = restarts
        self.max_iter = max_iter
        self.seed = seed

    def fit(self, sigma, y=None, dims=None):
        arr, dims = _bipartite(sigma, dims)
        if arr.shape[0] > MAX_DIM:
            raise ValidationError(f"dimension {arr.shape[0]} exceeds the supported maximum {MAX_DIM}")
        k = self.n_terms or arr.shape[0] ** 2
        obj = _Objective(arr, dims, k)

        starts = [_terms_to_theta(obj, terms, np.random.default_rng([self.seed, 0, i]))
                  for i, terms in enumerate(_seed_terms(arr, dims))]
        starts += [_random_theta(obj, np.random.default_rng([self.seed, r + 1])) for r in range(self.restarts)]

        best_val, best = math.inf, None
        for theta0 in starts:
            v0, _ = obj(theta0)
            if self.max_iter > 0:
                res = minimize(obj, theta0, jac=True, method="L-BFGS-B", options={"maxiter": self.max_iter})
                theta, val = (res.x, res.fun) if res.fun <= v0 else (theta0, v0)
            else:
                theta, val = theta0, v0
            if val < best_val:
                best_val, best = val, theta

        ansatz = obj.ansatz(best)
        xi = ansatz.state()
        val = relative_entropy(arr, xi)
        if not math.isfinite(val):
            # blended state (1-eps) xi + eps I/d is itself separable
            val = relative_entropy(arr, (1 - BLEND) * xi + BLEND * np.eye(arr.shape[0]) / arr.shape[0])
        self.upper_ = val
        self.lower_ = ree_lower_bracket(arr, dims)
        self.ansatz_ = ansatz
        return self


def ree_upper_bracket(sigma, k=None, restarts=4, seed=0, dims=None, max_iter=300):
    """Return ``(value, ansatz)``: the best ``S(sigma || xi)`` found and its separable ``xi``."""
    est = SeparableBracket(n_terms=k, restarts=restarts, max_iter=max_iter, seed=seed).fit(sigma, dims=dims)
    return est.upper_, est.ansatz_

