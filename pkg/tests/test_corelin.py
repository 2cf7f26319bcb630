import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wclass.corelin import (
    DensityMatrix,
    StateVector,
    embed,
    evolve,
    fidelity,
    hermitian_eig,
    is_unitary,
    kron,
    partial_trace,
    partial_transpose,
    random_density,
    random_unitary,
    reduced,
    tensor,
    trace_distance,
    von_neumann_entropy,
)
from strategies import qubit_states, seeds


def test_basis_ordering_is_row_major():
    psi = StateVector.qubits("10")
    assert psi.data[2] == 1
    assert StateVector.basis((1, 0), (2, 2)).data[2] == 1


def test_unnormalized_state_rejected():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]), (2,))
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 0, 0]), (2,))


def test_apply_does_not_renormalize():
    with pytest.raises(ValueError):
        StateVector.qubits("0").apply(2 * np.eye(2))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.5, 0.6]), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1, 1], [0, 0]]), (2,))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]), (2,))


def test_tensor_kind_mismatch():
    with pytest.raises(TypeError):
        tensor(StateVector.qubits("0"), StateVector.qubits("1").dm())


def test_partial_trace_of_product():
    a, b = StateVector.qubits("0"), StateVector.normalized([1, 1j], (2,))
    rho = tensor(a, b).dm()
    assert np.allclose(partial_trace(rho, [1]).data, b.dm().data, atol=1e-14)
    assert np.allclose(partial_trace(rho, [0]).data, a.dm().data, atol=1e-14)
    with pytest.raises(ValueError):
        partial_trace(rho, [])


@given(qubit_states(2, 4), st.data())
def test_partial_trace_preserves_trace_and_matches_reduced(psi, data):
    n = psi.n_sub
    keep = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
    r1 = partial_trace(psi.dm(), keep)
    r2 = reduced(psi, keep)
    assert abs(np.trace(r1.data) - 1) < 1e-12
    assert np.abs(r1.data - r2.data).max() < 1e-12


@given(qubit_states(2, 3))
def test_partial_transpose_is_involution(psi):
    rho = psi.dm()
    pt = partial_transpose(rho, [0])
    back = partial_transpose(pt, [0], rho.dims)
    assert np.abs(back - rho.data).max() < 1e-14
    assert abs(np.trace(pt) - 1) < 1e-12


@given(seeds)
def test_eigendecomposition_reconstructs(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = m + m.conj().T
    spec = hermitian_eig(h)
    assert np.abs(spec.reconstruct() - h).max() < 1e-10
    assert np.all(np.diff(spec.eigenvalues) >= -1e-12)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_evolve_against_scipy():
    from scipy.linalg import expm

    rng = np.random.default_rng(3)
    m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = m + m.conj().T
    assert np.abs(evolve(h, 0.37) - expm(-1j * 0.37 * h)).max() < 1e-12


@given(seeds)
def test_random_unitary_is_unitary(seed):
    assert is_unitary(random_unitary(4, np.random.default_rng(seed)), 1e-12)


def test_embed_matches_kron():
    x = np.array([[0, 1], [1, 0]])
    assert np.array_equal(embed(x, [1], (2, 2, 2)), kron(np.eye(2), x, np.eye(2)))
    with pytest.raises(ValueError):
        embed(x, [3], (2, 2))


@given(seeds)
def test_fidelity_and_distance_bounds(seed):
    rng = np.random.default_rng(seed)
    a = StateVector.normalized(rng.normal(size=4) + 1j * rng.normal(size=4), (2, 2))
    b = StateVector.normalized(rng.normal(size=4) + 1j * rng.normal(size=4), (2, 2))
    assert 0 <= fidelity(a, b) <= 1 + 1e-12
    assert abs(fidelity(a, a) - 1) < 1e-12
    assert 0 <= trace_distance(a.dm().data, b.dm().data) <= 1 + 1e-12


def test_entropy_of_mixed_qubit():
    assert abs(von_neumann_entropy(DensityMatrix(np.eye(2) / 2, (2,))) - 1) < 1e-12
    rho = random_density((2, 2), np.random.default_rng(0), rank=1)
    assert von_neumann_entropy(rho) < 1e-9
