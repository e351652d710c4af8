"""Shared dense-matrix oracles built independently of the package internals.

Index bit k of a basis state holds qubit k, bit value 1 = spin up; the dense
single-qubit matrices below are written in the (index 0, index 1) ordering,
so sigma_z = diag(-1, +1).
"""
import numpy as np
import pytest

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
ID = np.eye(2, dtype=complex)


def dense_op(single: np.ndarray, k: int, n_qubits: int) -> np.ndarray:
    """single-qubit operator on qubit k (bit k) of an n-qubit register."""
    out = np.kron(np.eye(2 ** (n_qubits - 1 - k)), np.kron(single, np.eye(2 ** k)))
    return out.astype(complex)


def dense_full_hamiltonian(params) -> np.ndarray:
    """All five terms of the model on the (n_s + 1)-qubit register, with the
    impurity on the highest bit."""
    nq = params.n_s + 1
    sysq = params.n_s
    h = 0.5 * params.omega0 * dense_op(SZ, sysq, nq)
    h = h + params.beta * dense_op(SX, sysq, nq)
    for j in range(params.n_s):
        h = h + params.lambda0 * dense_op(SX, sysq, nq) @ dense_op(SX, j, nq)
        h = h + 0.5 * params.omegas[j] * dense_op(SZ, j, nq)
        h = h + params.beta * dense_op(SX, j, nq)
    for i in range(params.n_s):
        for j in range(params.n_s):
            if i != j:
                h = h + 0.5 * params.lam * dense_op(SX, i, nq) @ dense_op(SX, j, nq)
    return h


def dense_bath_hamiltonian(params) -> np.ndarray:
    """Environment-only terms on the n_s-qubit register."""
    nq = params.n_s
    h = np.zeros((2 ** nq, 2 ** nq), dtype=complex)
    for j in range(nq):
        h = h + 0.5 * params.omegas[j] * dense_op(SZ, j, nq)
        h = h + params.beta * dense_op(SX, j, nq)
    for i in range(nq):
        for j in range(nq):
            if i != j:
                h = h + 0.5 * params.lam * dense_op(SX, i, nq) @ dense_op(SX, j, nq)
    return h


def random_state(n_qubits: int, rng) -> np.ndarray:
    v = rng.standard_normal(2 ** n_qubits) + 1j * rng.standard_normal(2 ** n_qubits)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
