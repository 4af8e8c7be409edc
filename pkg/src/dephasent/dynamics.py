"""Pure-dephasing (controlled-unitary) dynamics of a system coupled to an environment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import ValidationError, check_density_matrix, check_hermitian
from .info import EnvEnsemble
from .linalg import DensityMatrix, herm_eig
from .sampling import as_rng, mixed_coherent_state, random_density, random_hermitian

__all__ = [
    "DephasingModel",
    "total_hamiltonian",
    "conditional_unitaries",
    "evolve",
    "env_ensemble",
    "random_model",
    "random_system_state",
    "Instance",
    "random_instance",
]


@dataclass(frozen=True, eq=False)
class DephasingModel:
    """``H = sum_i |i><i| ⊗ (eps_i + H_E + V_i)`` in the pointer (computational) basis.

    Attributes
    ----------
    pointer_energies : (d_S,) float array
    env_hamiltonian : (d_E, d_E) Hermitian array
    couplings : tuple of (d_E, d_E) Hermitian arrays, one per pointer state
    """

    pointer_energies: np.ndarray
    env_hamiltonian: np.ndarray
    couplings: tuple

    def __post_init__(self):
        eps = np.asarray(self.pointer_energies, dtype=float).ravel()
        h_e = check_hermitian(self.env_hamiltonian, "env_hamiltonian")
        vs = tuple(check_hermitian(v, f"couplings[{i}]") for i, v in enumerate(self.couplings))
        if len(vs) != eps.size:
            raise ValidationError(f"{eps.size} pointer energies but {len(vs)} couplings")
        if any(v.shape != h_e.shape for v in vs):
            raise ValidationError("all environment operators must share one dimension")
        object.__setattr__(self, "pointer_energies", eps)
        object.__setattr__(self, "env_hamiltonian", h_e)
        object.__setattr__(self, "couplings", vs)

    @property
    def d_S(self) -> int:
        return self.pointer_energies.size

    @property
    def d_E(self) -> int:
        return self.env_hamiltonian.shape[0]

    def conditional_hamiltonians(self):
        """The sector Hamiltonians ``V_i' = eps_i + H_E + V_i``."""
        eye = np.eye(self.d_E)
        return [e * eye + self.env_hamiltonian + v for e, v in zip(self.pointer_energies, self.couplings)]


def total_hamiltonian(m: DephasingModel) -> np.ndarray:
    d_s, d_e = m.d_S, m.d_E
    h = np.zeros((d_s * d_e, d_s * d_e), dtype=complex)
    for i, hi in enumerate(m.conditional_hamiltonians()):
        h[i * d_e:(i + 1) * d_e, i * d_e:(i + 1) * d_e] = hi
    return h


def conditional_unitaries(m: DephasingModel, t: float):
    """``U_E^i(t) = exp(-i V_i' t)`` computed from the spectral decomposition of each sector."""
    out = []
    for hi in m.conditional_hamiltonians():
        w, v = herm_eig(hi)
        out.append((v * np.exp(-1j * w * t)) @ v.conj().T)
    return out


def _check_inputs(m, rho_s, rho_e):
    rho_s = check_density_matrix(rho_s, "rho_S")
    rho_e = check_density_matrix(rho_e, "rho_E")
    if rho_s.shape[0] != m.d_S or rho_e.shape[0] != m.d_E:
        raise ValidationError(
            f"state dimensions ({rho_s.shape[0]}, {rho_e.shape[0]}) do not match model ({m.d_S}, {m.d_E})"
        )
    return rho_s, rho_e


def evolve(m: DephasingModel, rho_s, rho_e, t: float) -> DensityMatrix:
    """Evolved joint state ``sum_ij <i|rho_S|j> |i><j| ⊗ U_i rho_E U_j^H``."""
    rho_s, rho_e = _check_inputs(m, rho_s, rho_e)
    us = conditional_unitaries(m, t)
    d_s, d_e = m.d_S, m.d_E
    blocks = np.empty((d_s, d_s, d_e, d_e), dtype=complex)
    left = [u @ rho_e for u in us]
    for i in range(d_s):
        for j in range(d_s):
            blocks[i, j] = rho_s[i, j] * (left[i] @ us[j].conj().T)
    sigma = blocks.transpose(0, 2, 1, 3).reshape(d_s * d_e, d_s * d_e)
    return DensityMatrix(0.5 * (sigma + sigma.conj().T), dims=(d_s, d_e))


def env_ensemble(m: DephasingModel, rho_s, rho_e, t: float) -> EnvEnsemble:
    """Pointer probabilities ``p_i = <i|rho_S|i>`` with states ``U_i rho_E U_i^H``."""
    rho_s, rho_e = _check_inputs(m, rho_s, rho_e)
    probs = np.clip(np.real(np.diag(rho_s)), 0.0, None)
    probs = probs / probs.sum()
    states = []
    for u in conditional_unitaries(m, t):
        s = u @ rho_e @ u.conj().T
        states.append(0.5 * (s + s.conj().T))
    return EnvEnsemble(probs, tuple(states))


def random_model(d_s, d_e, rng=None, scale=1.0) -> DephasingModel:
    rng = as_rng(rng)
    return DephasingModel(
        pointer_energies=rng.standard_normal(d_s),
        env_hamiltonian=random_hermitian(d_e, scale, rng),
        couplings=tuple(random_hermitian(d_e, scale, rng) for _ in range(d_s)),
    )


def random_system_state(d_s, rng=None, kind="family"):
    """Draw ``rho_S``.

    ``kind`` is one of ``"family"`` (mixed coherent family with random mixedness,
    population bias and phases), ``"pure"``, ``"diagonal"`` or ``"wishart"``.
    """
    rng = as_rng(rng)
    if kind == "family":
        return mixed_coherent_state(d_s, rng.uniform(), rng.uniform(0, 2), rng.uniform(0, 2 * np.pi, d_s))
    if kind == "pure":
        return mixed_coherent_state(d_s, 0.0, rng.uniform(0, 2), rng.uniform(0, 2 * np.pi, d_s))
    if kind == "diagonal":
        return np.diag(rng.dirichlet(np.ones(d_s))).astype(complex)
    if kind == "wishart":
        return random_density(d_s, rng=rng)
    raise ValueError(f"unknown system-state kind {kind!r}")


@dataclass(frozen=True, eq=False)
class Instance:
    model: DephasingModel
    rho_S: np.ndarray
    rho_E: np.ndarray
    times: tuple
    povm: tuple | None = None
    kind: str = ""


INSTANCE_KINDS = ("family", "pure", "diagonal", "wishart")


def random_instance(d_s, d_e, rng=None, kind=None, t_max=3.0) -> Instance:
    """Random model, states and a single evolution time.

    ``kind="pure"`` also makes the environment state pure, so the evolved joint
    state is pure.
    """
    rng = as_rng(rng)
    if kind is None:
        kind = INSTANCE_KINDS[rng.integers(len(INSTANCE_KINDS))]
    model = random_model(d_s, d_e, rng)
    rho_s = random_system_state(d_s, rng, kind)
    rho_e = random_density(d_e, rank=1 if kind == "pure" else None, rng=rng)
    t = float(rng.uniform(0.0, t_max))
    return Instance(model, rho_s, rho_e, (t,), kind=kind)
