import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dephasent import (
    EnvEnsemble,
    Povm,
    ValidationError,
    binary_entropy,
    coherence_rel_entropy,
    conditional_entropy,
    dephase,
    fidelity,
    holevo_chi,
    partial_trace,
    quantum_mutual_info,
    relative_entropy,
    von_neumann_entropy,
)
from dephasent.info import shannon_entropy
from dephasent.sampling import mixed_coherent_state, random_density, random_povm, random_pure, random_unitary

from conftest import basis_dm, bell_state

seeds = st.integers(0, 2**32 - 1)
PLUS = np.full((2, 2), 0.5, dtype=complex)


def test_entropy_values():
    assert von_neumann_entropy(basis_dm(3, 1)) == 0.0
    assert abs(von_neumann_entropy(np.eye(2) / 2) - 1) < 1e-15
    assert abs(von_neumann_entropy(np.diag([0.25, 0.75])) - 0.8112781244591328) < 1e-12


def test_relative_entropy_values(rng):
    rho = random_density(3, rng=rng)
    assert relative_entropy(rho, rho) < 1e-12
    assert abs(relative_entropy(basis_dm(2, 0), np.eye(2) / 2) - 1) < 1e-12
    assert relative_entropy(basis_dm(2, 0), basis_dm(2, 1)) == math.inf
    with pytest.raises(ValidationError):
        relative_entropy(np.eye(2) / 2, np.eye(3) / 3)


def test_dephase_examples():
    assert np.allclose(dephase(PLUS), np.eye(2) / 2)
    d = np.diag([0.2, 0.3, 0.5]).astype(complex)
    assert np.array_equal(dephase(d), d)
    assert np.allclose(dephase(mixed_coherent_state(2, 0.3)), np.eye(2) / 2, atol=1e-15)
    with pytest.raises(ValidationError):
        dephase(PLUS, np.array([[1, 1], [0, 1]]))


def test_dephase_in_other_basis():
    had = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert np.allclose(dephase(PLUS, had), PLUS)


def test_coherence_examples():
    assert abs(coherence_rel_entropy(PLUS) - 1) < 1e-12
    assert coherence_rel_entropy(np.diag([0.3, 0.7])) == 0.0
    for alpha in (0.0, 0.5, 1.0):
        expected = 1 - binary_entropy(alpha / 2)
        assert abs(coherence_rel_entropy(mixed_coherent_state(2, alpha)) - expected) < 1e-12


def test_fidelity_examples(rng):
    rho = random_density(3, rng=rng)
    assert abs(fidelity(rho, rho) - 1) < 1e-10
    assert fidelity(basis_dm(2, 0), basis_dm(2, 1)) < 1e-12
    psi, phi = rng.standard_normal(3) + 1j * rng.standard_normal(3), rng.standard_normal(3) + 1j * rng.standard_normal(3)
    psi, phi = psi / np.linalg.norm(psi), phi / np.linalg.norm(phi)
    assert abs(fidelity(np.outer(psi, psi.conj()), np.outer(phi, phi.conj())) - abs(np.vdot(psi, phi))) < 1e-7
    sigma = random_density(3, rng=rng)
    assert abs(fidelity(rho, sigma) - fidelity(sigma, rho)) < 1e-10


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0) == 0.0 and binary_entropy(1) == 0.0
    assert abs(binary_entropy(0.25) - 0.8112781244591328) < 1e-15
    with pytest.raises(ValidationError):
        binary_entropy(1.2)


def test_conditional_entropy_examples():
    e = EnvEnsemble(np.array([0.5, 0.5]), (basis_dm(2, 0), basis_dm(2, 1)))
    assert conditional_entropy(e, Povm.projective(np.eye(2))) == 0.0
    assert abs(conditional_entropy(e, Povm((np.eye(2),))) - 1) < 1e-12
    same = EnvEnsemble(np.array([0.3, 0.7]), (PLUS, PLUS))
    assert abs(conditional_entropy(same, Povm.projective(np.eye(2))) - binary_entropy(0.3)) < 1e-12
    with pytest.raises(ValidationError):
        conditional_entropy(e, Povm((np.eye(3),)))


def test_ensemble_and_povm_validation():
    with pytest.raises(ValidationError):
        EnvEnsemble(np.array([0.5, 0.6]), (PLUS, PLUS))
    with pytest.raises(ValidationError):
        EnvEnsemble(np.array([0.5, 0.5]), (PLUS, np.eye(3) / 3))
    with pytest.raises(ValidationError):
        Povm((basis_dm(2, 0),))
    with pytest.raises(ValidationError):
        Povm((np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])))


def test_holevo_examples(rng):
    assert holevo_chi(EnvEnsemble(np.array([0.4, 0.6]), (PLUS, PLUS))) < 1e-12
    e = EnvEnsemble(np.array([0.5, 0.5]), (basis_dm(2, 0), basis_dm(2, 1)))
    assert abs(holevo_chi(e) - 1) < 1e-12


def test_mutual_info_examples(rng):
    prod = np.kron(random_density(2, rng=rng), random_density(3, rng=rng))
    assert quantum_mutual_info(prod, (2, 3)) < 1e-10
    assert abs(quantum_mutual_info(bell_state(), (2, 2)) - 2) < 1e-12
    cc = 0.5 * (np.kron(basis_dm(2, 0), basis_dm(2, 0)) + np.kron(basis_dm(2, 1), basis_dm(2, 1)))
    assert abs(quantum_mutual_info(cc, (2, 2)) - 1) < 1e-12
    with pytest.raises(ValidationError):
        quantum_mutual_info(cc)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_relative_entropy_to_marginals_is_mutual_info(seed):
    rho = random_density(6, rng=np.random.default_rng(seed))
    marg = np.kron(partial_trace(rho, 0, (2, 3)), partial_trace(rho, 1, (2, 3)))
    assert abs(relative_entropy(rho, marg) - quantum_mutual_info(rho, (2, 3))) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_dephasing_minimizes_relative_entropy_over_diagonal_states(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(3, rng=rng)
    c = coherence_rel_entropy(rho)
    for _ in range(100):
        sigma = np.diag(rng.dirichlet(np.ones(3)))
        assert relative_entropy(rho, sigma) >= c - 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_fidelity_monotone_under_partial_trace(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density(6, rng=rng), random_density(6, rng=rng)
    reduced = fidelity(partial_trace(a, 0, (2, 3)), partial_trace(b, 0, (2, 3)))
    assert reduced >= fidelity(a, b) - 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(2, 4), st.integers(2, 4))
def test_holevo_bounds_sampled_povms(seed, n_states, d):
    rng = np.random.default_rng(seed)
    e = EnvEnsemble(rng.dirichlet(np.ones(n_states)), tuple(random_density(d, rng=rng) for _ in range(n_states)))
    m = Povm(tuple(random_povm(d, rng=rng)))
    h_i = shannon_entropy(e.probs)
    h_im = conditional_entropy(e, m)
    assert 0.0 <= h_im <= h_i
    assert holevo_chi(e) >= h_i - h_im - 1e-9


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    u = random_unitary(6, rng=rng)
    rho, sigma = random_density(6, rng=rng), random_density(6, rng=rng)
    rot = lambda x: u @ x @ u.conj().T  # noqa: E731
    assert abs(von_neumann_entropy(rot(rho)) - von_neumann_entropy(rho)) <= 1e-9
    assert abs(relative_entropy(rot(rho), rot(sigma)) - relative_entropy(rho, sigma)) <= 1e-9
    assert abs(fidelity(rot(rho), rot(sigma)) - fidelity(rho, sigma)) <= 1e-9
    basis = np.eye(6)
    assert abs(coherence_rel_entropy(rot(rho), u @ basis) - coherence_rel_entropy(rho, basis)) <= 1e-9
    p = random_pure(2, rng=rng)
    e = EnvEnsemble(np.array([0.5, 0.5]), (rho[:2, :2] / np.trace(rho[:2, :2]).real, p))
    v = random_unitary(2, rng=rng)
    er = EnvEnsemble(e.probs, tuple(v @ s @ v.conj().T for s in e.states))
    m = Povm.projective(np.eye(2))
    mr = Povm(tuple(v @ x @ v.conj().T for x in m.elements))
    assert abs(conditional_entropy(e, m) - conditional_entropy(er, mr)) <= 1e-9
    assert abs(holevo_chi(e) - holevo_chi(er)) <= 1e-9
