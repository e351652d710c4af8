"""Bitstring-basis state vectors and matrix-free spin-operator application.

Basis conventions
-----------------
A register of ``n_qubits`` spin-1/2 modes is stored as a complex amplitude
vector of length ``2**n_qubits``. Bit k of the basis index holds the z
component of qubit k, with bit value 1 meaning "up": sigma_z |1> = +|1>,
sigma_z |0> = -|0>, sigma_x |0> = |1>, sigma_y |0> = i|1>.

For the full impurity-plus-environment register the impurity occupies the
most significant bit (qubit index n_s) and environment mode j occupies bit
j - 1. Environment amplitudes for a fixed impurity state are then one
contiguous half of the vector, which makes the reduced 2x2 density a pair of
strided inner products.

All operator applications are matrix-free: sigma_x is an index permutation
j -> j XOR 2**k, sigma_z a sign flip keyed on bit k, and the two-body
sigma_x sums enter through the identity
``sum_{i != j} sx_i sx_j = (sum_k sx_k)**2 - n_s``, so a Hamiltonian
application costs O(n_s * 2**n_qubits) instead of O(n_s**2 * 2**n_qubits).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np

__all__ = [
    "ModelParams",
    "PureState",
    "apply_sigma",
    "apply_hamiltonian",
    "apply_bath_hamiltonian",
    "partial_trace_system",
    "hamiltonian_action",
    "bath_action",
    "sigma_x_total_apply",
    "hamiltonian_norm_bound",
    "bath_norm_bound",
]


@dataclass(frozen=True)
class ModelParams:
    """Model constants: impurity frequency and anharmonicity, couplings,
    environment frequencies and the thermal-ensemble size.

    Units have hbar = 1; kT is a temperature in energy units.
    """
    omega0: float = 0.8288
    beta: float = 0.01
    lambda0: float = 1.0
    lam: float = 2.0
    n_s: int = 14
    omegas: tuple = ()
    kT: float = 0.02
    n_eig: int = 20

    def __post_init__(self):
        if self.n_s < 1:
            raise ValueError("n_s must be at least 1")
        if len(self.omegas) != self.n_s:
            raise ValueError(f"expected {self.n_s} environment frequencies, got {len(self.omegas)}")
        if any(w <= 0 for w in self.omegas):
            raise ValueError("environment frequencies must be positive")
        if self.kT <= 0:
            raise ValueError("kT must be positive")
        if not 1 <= self.n_eig <= 2 ** self.n_s:
            raise ValueError("n_eig must lie in [1, 2**n_s]")

    @property
    def n_qubits(self) -> int:
        return self.n_s + 1

    @property
    def bath_dim(self) -> int:
        return 2 ** self.n_s


@dataclass
class PureState:
    """Complex amplitude vector over the 2**n_qubits bitstring basis."""
    amplitudes: np.ndarray
    n_qubits: int = field(default=0)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.n_qubits == 0:
            n = self.amplitudes.shape[0]
            self.n_qubits = int(n).bit_length() - 1
        if self.amplitudes.shape != (2 ** self.n_qubits,):
            raise ValueError(
                f"amplitude vector of length {self.amplitudes.shape} does not match "
                f"{self.n_qubits} qubits")

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> "PureState":
        amps = np.zeros(2 ** n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps, n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


# ---------------------------------------------------------------------------
# low-level kernels

@numba.njit(cache=True)
def _sum_bit_flips(psi, out, n_bits):
    # out[j] = sum_k psi[j ^ 2**k] for k < n_bits
    n = psi.shape[0]
    for j in range(n):
        acc = psi[j ^ 1]
        for k in range(1, n_bits):
            acc += psi[j ^ (1 << k)]
        out[j] = acc


@numba.njit(cache=True)
def _full_h(psi, out, diag, phi, phi2, n_s, beta, lambda0, half_lam):
    # out = H psi given phi = Sx psi and phi2 = Sx phi (Sx = bath sigma_x sum)
    n = psi.shape[0]
    smask = 1 << n_s
    for j in range(n):
        out[j] = (diag[j] - half_lam * n_s) * psi[j] + beta * psi[j ^ smask] \
            + lambda0 * phi[j ^ smask] + beta * phi[j] + half_lam * phi2[j]


@numba.njit(cache=True)
def _bath_h(psi, out, diag, phi, phi2, n_s, beta, half_lam):
    n = psi.shape[0]
    for j in range(n):
        out[j] = (diag[j] - half_lam * n_s) * psi[j] + beta * phi[j] + half_lam * phi2[j]


def _sigma_z_diagonal(weights, n_bits):
    # sum_k w_k/2 * (+1 if bit k set else -1)
    idx = np.arange(1 << n_bits)
    d = np.zeros(1 << n_bits)
    for k, w in enumerate(weights):
        d += np.where((idx >> k) & 1, 0.5 * w, -0.5 * w)
    return d


@lru_cache(maxsize=8)
def _full_diag(params: ModelParams) -> np.ndarray:
    return _sigma_z_diagonal(params.omegas + (params.omega0,), params.n_qubits)


@lru_cache(maxsize=8)
def _bath_diag(params: ModelParams) -> np.ndarray:
    return _sigma_z_diagonal(params.omegas, params.n_s)


def sigma_x_total_apply(vec: np.ndarray, n_bits: int, out: np.ndarray | None = None) -> np.ndarray:
    """out = (sum_{k<n_bits} sigma_x^(k)) vec, matrix-free."""
    if out is None:
        out = np.empty_like(vec)
    _sum_bit_flips(vec, out, n_bits)
    return out


def hamiltonian_action(params: ModelParams):
    """Matrix-free ``accumulate(psi, out)`` computing out = H psi for the
    full register; the returned callable owns its scratch buffers and is not
    safe to share across threads (create one per propagation).
    """
    diag = _full_diag(params)
    n_s, beta = params.n_s, params.beta
    lambda0, half_lam = params.lambda0, 0.5 * params.lam
    scratch = {}

    def apply(psi, out):
        key = psi.dtype
        if key not in scratch:
            scratch[key] = (np.empty_like(psi), np.empty_like(psi))
        phi, phi2 = scratch[key]
        _sum_bit_flips(psi, phi, n_s)
        _sum_bit_flips(phi, phi2, n_s)
        _full_h(psi, out, diag, phi, phi2, n_s, beta, lambda0, half_lam)
        return out

    return apply


def bath_action(params: ModelParams):
    """Matrix-free ``apply(psi, out)`` for the isolated environment
    (frequency, anharmonic and intra-environment terms only)."""
    diag = _bath_diag(params)
    n_s, beta, half_lam = params.n_s, params.beta, 0.5 * params.lam
    scratch = {}

    def apply(psi, out):
        key = psi.dtype
        if key not in scratch:
            scratch[key] = (np.empty_like(psi), np.empty_like(psi))
        phi, phi2 = scratch[key]
        _sum_bit_flips(psi, phi, n_s)
        _sum_bit_flips(phi, phi2, n_s)
        _bath_h(psi, out, diag, phi, phi2, n_s, beta, half_lam)
        return out

    return apply


def hamiltonian_norm_bound(params: ModelParams) -> float:
    """Triangle-inequality bound on the spectral radius of the full
    Hamiltonian; used to pick stable substep counts."""
    p = params
    return (abs(p.omega0) / 2 + abs(p.beta) * (1 + p.n_s) + abs(p.lambda0) * p.n_s
            + 0.5 * sum(abs(w) for w in p.omegas)
            + 0.5 * abs(p.lam) * p.n_s * (p.n_s - 1))


def bath_norm_bound(params: ModelParams) -> float:
    p = params
    return (0.5 * sum(abs(w) for w in p.omegas) + abs(p.beta) * p.n_s
            + 0.5 * abs(p.lam) * p.n_s * (p.n_s - 1))


# ---------------------------------------------------------------------------
# public operations

def _flip_bit(psi: np.ndarray, k: int) -> np.ndarray:
    n = psi.shape[0]
    return psi.reshape(n >> (k + 1), 2, 1 << k)[:, ::-1, :].reshape(n)


def apply_sigma(state: PureState, axis: str, k: int) -> PureState:
    """Apply sigma_axis on qubit k. axis is one of 'x', 'y', 'z'."""
    if not 0 <= k < state.n_qubits:
        raise IndexError(f"qubit index {k} out of range for {state.n_qubits} qubits")
    psi = state.amplitudes
    if axis == "x":
        out = _flip_bit(psi, k)
    elif axis == "z":
        sign = np.where((np.arange(psi.shape[0]) >> k) & 1, 1.0, -1.0)
        out = sign * psi
    elif axis == "y":
        sign = np.where((np.arange(psi.shape[0]) >> k) & 1, 1j, -1j)
        out = sign * _flip_bit(psi, k)
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return PureState(out, state.n_qubits)


def apply_hamiltonian(state: PureState, params: ModelParams) -> PureState:
    """H |psi> for the full impurity-plus-environment register."""
    if state.n_qubits != params.n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, model needs {params.n_qubits}")
    out = np.empty_like(state.amplitudes)
    hamiltonian_action(params)(state.amplitudes, out)
    return PureState(out, state.n_qubits)


def apply_bath_hamiltonian(state: PureState, params: ModelParams) -> PureState:
    """H_b |psi> on the environment-only register (n_s qubits)."""
    if state.n_qubits != params.n_s:
        raise ValueError(f"state has {state.n_qubits} qubits, environment has {params.n_s}")
    out = np.empty_like(state.amplitudes)
    bath_action(params)(state.amplitudes, out)
    return PureState(out, state.n_qubits)


def partial_trace_system(state) -> "DensityMatrix2":
    """Trace out the environment, leaving the impurity's 2x2 density.

    Accepts a PureState or a bare amplitude vector. The trace equals the
    squared norm of the state (no renormalization is applied).
    """
    from .observables import DensityMatrix2

    psi = state.amplitudes if isinstance(state, PureState) else np.asarray(state)
    n = psi.shape[0]
    if n < 4:
        raise ValueError("need at least two qubits to trace out the environment")
    half = n // 2
    lower, upper = psi[:half], psi[half:]
    return DensityMatrix2(
        rho11=float(np.real(np.vdot(upper, upper))),
        rho00=float(np.real(np.vdot(lower, lower))),
        rho10=complex(np.vdot(lower, upper)),
    )
