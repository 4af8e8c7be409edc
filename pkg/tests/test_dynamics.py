import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dephasent import (
    DephasingModel,
    ValidationError,
    conditional_unitaries,
    dephase,
    env_ensemble,
    evolve,
    partial_trace,
    total_hamiltonian,
    von_neumann_entropy,
)
from dephasent.dynamics import random_instance, random_model, random_system_state
from dephasent.sampling import random_density

seeds = st.integers(0, 2**32 - 1)
SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_trivial_hamiltonians(rng):
    h_e = np.diag([0.3, -0.2, 1.0])
    m = DephasingModel(np.zeros(2), h_e, (np.zeros((3, 3)), np.zeros((3, 3))))
    assert np.allclose(total_hamiltonian(m), np.kron(np.eye(2), h_e))
    g = 0.7
    m2 = DephasingModel(np.zeros(2), np.zeros((2, 2)), (g * SZ, -g * SZ))
    assert np.allclose(total_hamiltonian(m2), np.kron(SZ, g * SZ))


def test_hamiltonian_commutes_with_pointer_projectors(rng):
    m = random_model(3, 2, rng)
    h = total_hamiltonian(m)
    assert np.max(np.abs(h - h.conj().T)) <= 1e-10
    for i in range(3):
        p = np.kron(np.diag(np.eye(3)[i]), np.eye(2))
        assert np.max(np.abs(h @ p - p @ h)) <= 1e-10


def test_model_validation():
    with pytest.raises(ValidationError):
        DephasingModel(np.zeros(2), np.zeros((2, 2)), (SZ,))
    with pytest.raises(ValidationError):
        DephasingModel(np.zeros(1), np.zeros((2, 2)), (np.zeros((3, 3)),))
    with pytest.raises(ValidationError):
        DephasingModel(np.zeros(1), np.array([[0, 1], [0, 0]]), (SZ,))


def test_conditional_unitaries(rng):
    m = random_model(2, 3, rng)
    for u in conditional_unitaries(m, 0.0):
        assert np.allclose(u, np.eye(3))
    m_diag = DephasingModel(np.array([0.5, -0.5]), np.zeros((2, 2)), (SZ, 2 * SZ))
    u0, u1 = conditional_unitaries(m_diag, 1.3)
    assert np.allclose(u0, np.diag(np.exp(-1j * 1.3 * np.array([1.5, -0.5]))))
    assert np.allclose(u1, np.diag(np.exp(-1j * 1.3 * np.array([1.5, -2.5]))))
    for ua, ub in zip(conditional_unitaries(m, 0.9), conditional_unitaries(m, -0.9)):
        assert np.max(np.abs(ua @ ub - np.eye(3))) <= 1e-10
        assert np.max(np.abs(ua @ ua.conj().T - np.eye(3))) <= 1e-10


def test_evolve_examples(rng):
    m = random_model(2, 2, rng)
    rs, re = random_density(2, rng=rng), random_density(2, rng=rng)
    sigma = evolve(m, rs, re, 0.0)
    assert np.allclose(np.asarray(sigma), np.kron(rs, re), atol=1e-12)
    assert sigma.dims == (2, 2)
    # orthogonalizing conditional evolution from |+> and |0>
    m_bell = DephasingModel(np.zeros(2), np.zeros((2, 2)), (np.zeros((2, 2)), SX))
    plus = np.full((2, 2), 0.5, dtype=complex)
    s = evolve(m_bell, plus, np.diag([1.0, 0.0]), np.pi / 2)
    assert abs(von_neumann_entropy(partial_trace(np.asarray(s), 0, (2, 2))) - 1) < 1e-10
    with pytest.raises(ValidationError):
        evolve(m, np.eye(3) / 3, re, 1.0)


def test_env_ensemble_examples(rng):
    m = random_model(2, 3, rng)
    re = random_density(3, rng=rng)
    e0 = env_ensemble(m, np.eye(2) / 2, re, 0.0)
    assert np.allclose(e0.probs, [0.5, 0.5])
    assert all(np.allclose(s, re) for s in e0.states)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(2, 3), st.integers(1, 4), st.floats(0, 5))
def test_dynamics_invariants(seed, d_s, d_e, t):
    rng = np.random.default_rng(seed)
    m = random_model(d_s, d_e, rng)
    rs = random_system_state(d_s, rng, "wishart")
    re = random_density(d_e, rng=rng)
    sigma = np.asarray(evolve(m, rs, re, t))
    sigma_s = partial_trace(sigma, 0, (d_s, d_e))
    # populations and purity preserved, coherences damped
    assert np.max(np.abs(np.diag(sigma_s) - np.diag(rs))) <= 1e-10
    assert abs(np.trace(sigma @ sigma) - np.trace(rs @ rs) * np.trace(re @ re)) <= 1e-10
    assert np.max(np.abs(dephase(sigma_s) - dephase(rs))) <= 1e-10
    assert np.all(np.abs(sigma_s) <= np.abs(rs) + 1e-10)
    # entropy bookkeeping
    assert abs(von_neumann_entropy(sigma) - von_neumann_entropy(rs) - von_neumann_entropy(re)) <= 1e-9
    e = env_ensemble(m, rs, re, t)
    for s in e.states:
        assert abs(von_neumann_entropy(s) - von_neumann_entropy(re)) <= 1e-9
    assert np.max(np.abs(e.mixture() - partial_trace(sigma, 1, (d_s, d_e)))) <= 1e-10


def test_random_instance_kinds(rng):
    for kind in ("family", "pure", "diagonal", "wishart"):
        inst = random_instance(2, 3, rng, kind=kind)
        assert inst.kind == kind and len(inst.times) == 1
    pure = random_instance(2, 2, rng, kind="pure")
    assert abs(np.trace(pure.rho_S @ pure.rho_S) - 1) < 1e-12
    assert abs(np.trace(pure.rho_E @ pure.rho_E) - 1) < 1e-12
    with pytest.raises(ValueError):
        random_system_state(2, rng, "nope")
