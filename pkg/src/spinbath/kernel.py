"""Second moments of the projected interaction Liouvillian, the scalar
memory function W(t) they parameterize, and a brute-force superoperator
oracle used to validate the closed-form trace expressions.

Conventions for the truncated-basis formulas
--------------------------------------------
All operators live on a finite product basis of m_s impurity states (the
two sigma_z eigenstates, excited first) and the m_b lowest environment
eigenstates. ``tr_s`` traces over the impurity factor (an m_s x m_s partial
trace returning an m_b x m_b matrix), ``tr_b`` over the environment factor,
``tr`` over the whole product space. The thermal environment density enters
products on the full space as I_s (x) B. Squares of partial traces are
matrix squares, not elementwise ones.

The brute-force route builds the Liouville-space matrices explicitly:
L = [H, .], the projector P: chi -> tr_b{chi} (x) B, and the projected
generator A = (1-P) L (1-P); moments are normalized Frobenius traces of
A A^dag and A A. The closed forms agree with it to machine precision, which
is the central correctness property of this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import BathEnsemble, boltzmann_weights
from .spins import ModelParams, sigma_x_total_apply

__all__ = [
    "KernelParams",
    "FiniteBasisOperators",
    "canonical_bath_density",
    "assemble_finite_hamiltonian",
    "moments_closed_form",
    "brute_force_moments",
    "memory_function",
    "ellipse_semiaxes",
]

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])  # (excited, ground) ordering


@dataclass(frozen=True)
class KernelParams:
    """Moments <AA+> and <AA> of the projected Liouvillian and the derived
    memory-function parameters p (decay) and q (oscillation)."""
    aad: float
    aa: float
    p: float
    q: float

    @classmethod
    def from_moments(cls, aad: float, aa: float) -> "KernelParams":
        if aad <= 0:
            raise ValueError(f"<AA+> must be positive, got {aad!r}")
        if abs(aa) > aad * (1 + 1e-12):
            raise ValueError(
                f"|<AA>| = {abs(aa)!r} exceeds <AA+> = {aad!r}; "
                "p and q would not be real nonnegative")
        root = math.sqrt(aad)
        return cls(aad=aad, aa=aa, p=max((aad - aa) / root, 0.0),
                   q=max((aad + aa) / root, 0.0))


@dataclass
class FiniteBasisOperators:
    """Dense Hamiltonian and thermal environment density on the truncated
    product basis (impurity index major, environment index minor)."""
    H: np.ndarray
    B: np.ndarray
    m_s: int
    m_b: int

    def __post_init__(self):
        dim = self.m_s * self.m_b
        if self.H.shape != (dim, dim):
            raise ValueError(f"H must be {dim}x{dim}")
        if self.B.shape != (self.m_b, self.m_b):
            raise ValueError(f"B must be {self.m_b}x{self.m_b}")
        if np.abs(self.H - self.H.conj().T).max() > 1e-12 * max(1.0, np.abs(self.H).max()):
            raise ValueError("H is not Hermitian")


def canonical_bath_density(bath_energies: np.ndarray, kT: float, m_b: int) -> np.ndarray:
    """Thermal density of the environment in its own eigenbasis: a diagonal
    matrix of Boltzmann weights over the m_b kept levels, renormalized."""
    energies = np.asarray(bath_energies, dtype=float)
    if m_b > len(energies):
        raise ValueError("m_b exceeds the number of available levels")
    return np.diag(boltzmann_weights(energies[:m_b], kT))


def assemble_finite_hamiltonian(
    params: ModelParams, bath: BathEnsemble, m_b: int | None = None,
) -> FiniteBasisOperators:
    """Project the model Hamiltonian onto {2 impurity states} (x) {m_b
    lowest environment eigenstates}.

    The impurity block is omega0/2 sigma_z + beta sigma_x, the environment
    block is diagonal in its eigenbasis, and the coupling block is
    lambda0 sigma_x (x) M with M_mm' = <m|Sx|m'> computed matrix-free.
    """
    if m_b is None:
        m_b = bath.n_eig
    if m_b > bath.n_eig:
        raise ValueError("m_b exceeds the computed ensemble size")
    vecs = bath.eigvecs[:m_b]
    sx_vecs = np.empty_like(vecs)
    for i in range(m_b):
        sigma_x_total_apply(vecs[i], params.n_s, sx_vecs[i])
    coupling = vecs.conj() @ sx_vecs.T
    coupling = 0.5 * (coupling + coupling.conj().T)  # symmetrize roundoff

    h_sys = 0.5 * params.omega0 * _SIGMA_Z + params.beta * _SIGMA_X
    h = (np.kron(h_sys, np.eye(m_b))
         + np.kron(np.eye(2), np.diag(bath.energies[:m_b]))
         + params.lambda0 * np.kron(_SIGMA_X, coupling))
    b = canonical_bath_density(bath.energies, params.kT, m_b)
    return FiniteBasisOperators(H=h.astype(complex), B=b, m_s=2, m_b=m_b)


def _tr_b(m: np.ndarray, m_s: int, m_b: int) -> np.ndarray:
    return np.einsum("sbtb->st", m.reshape(m_s, m_b, m_s, m_b))


def _tr_s(m: np.ndarray, m_s: int, m_b: int) -> np.ndarray:
    return np.einsum("sbsc->bc", m.reshape(m_s, m_b, m_s, m_b))


def moments_closed_form(ops: FiniteBasisOperators) -> tuple[float, float]:
    """Evaluate the explicit finite-basis trace expressions for <AA+> and
    <AA>. Every term is formed literally; no cancellation shortcuts."""
    ms, mb = ops.m_s, ops.m_b
    H = ops.H
    B = ops.B
    b_full = np.kron(np.eye(ms), B)
    b2 = B @ B
    b2_full = np.kron(np.eye(ms), b2)
    h2 = H @ H
    tr = np.trace

    tr_h = tr(H)
    tr_h2 = tr(h2)
    tr_hb = tr(H @ b_full)
    tr_h2b = tr(h2 @ b_full)
    tr_h2b2 = tr(h2 @ b2_full)
    tr_hb2 = tr(H @ b2_full)
    trb_b2 = tr(b2)

    trs_h = _tr_s(H, ms, mb)
    trb_h = _tr_b(H, ms, mb)
    trb_hb = _tr_b(H @ b_full, ms, mb)
    trb_hb2 = _tr_b(H @ b2_full, ms, mb)
    trs_hb = _tr_s(H @ b_full, ms, mb)

    aad = (
        2 * ms * mb * tr_h2
        - 2 * tr_h ** 2
        - 8 * ms * tr_h2b
        - 4 * tr_hb ** 2
        + 2 * ms * mb * tr_h2b2
        + 2 * ms * tr_h2 * trb_b2
        + 4 * mb * tr_hb * tr_hb2
        + 8 * tr(trs_h @ trs_h @ B)
        + 4 * ms * tr(trb_hb @ trb_hb)
        + 4 * ms * tr(trb_hb2 @ trb_h)
        - 4 * tr_h * tr_hb2
        - 2 * mb * tr(trs_hb @ trs_hb)
        - 2 * tr(trs_h @ trs_h) * trb_b2
        - 4 * ms * mb * tr(trb_hb @ trb_hb2)
        - 4 * ms * tr(trb_h @ trb_hb) * trb_b2
        + 2 * ms * mb * tr(trb_hb @ trb_hb) * trb_b2
        - 2 * mb * tr_hb ** 2 * trb_b2
        + 4 * tr_h * tr_hb * trb_b2
    ) / (ms ** 2 * mb ** 2)

    aa = (
        2 * ms * mb * tr_h2
        - 2 * tr_h ** 2
        + 4 * tr(trs_h @ trs_h @ B)
        + 2 * ms * tr(trb_hb @ trb_hb)
        - 4 * ms * tr_h2b
        - 2 * tr_hb ** 2
    ) / (ms ** 2 * mb ** 2)

    return float(np.real(aad)), float(np.real(aa))


def brute_force_moments(ops: FiniteBasisOperators) -> tuple[float, float]:
    """Dense Liouville-space oracle for the same two moments.

    Cost is O((m_s m_b)**6); refuses product dimensions above 64.
    """
    ms, mb = ops.m_s, ops.m_b
    n = ms * mb
    if n > 64:
        raise ValueError("product dimension too large for the dense oracle")
    lmat = liouvillian_matrix(ops.H)
    p = projector_matrix(ops.B, ms, mb)
    q = np.eye(n * n) - p
    a = q @ lmat @ q
    aad = np.trace(a @ a.conj().T) / (ms ** 2 * mb ** 2)
    aa = np.trace(a @ a) / (ms ** 2 * mb ** 2)
    return float(np.real(aad)), float(np.real(aa))


def liouvillian_matrix(h: np.ndarray) -> np.ndarray:
    """Matrix of chi -> [H, chi] acting on row-major vectorized operators."""
    n = h.shape[0]
    eye = np.eye(n)
    return np.kron(h, eye) - np.kron(eye, h.T)


def projector_matrix(b: np.ndarray, m_s: int, m_b: int) -> np.ndarray:
    """Matrix of the thermal projection chi -> tr_b{chi} (x) B on row-major
    vectorized operators."""
    n = m_s * m_b
    p = np.empty((n * n, n * n), dtype=complex)
    basis = np.zeros((n, n), dtype=complex)
    for idx in range(n * n):
        basis.reshape(-1)[idx] = 1.0
        p[:, idx] = np.kron(_tr_b(basis, m_s, m_b), b).reshape(-1)
        basis.reshape(-1)[idx] = 0.0
    return p


def memory_function(params: KernelParams, t) -> np.ndarray | float:
    """Scalar memory kernel: quartic polynomial in p|t| times a Gaussian in
    q|t|. Defined even in t; exactly 1 at t = 0. Accepts scalars or arrays.
    """
    at = np.abs(np.asarray(t, dtype=float))
    x = params.p * at
    poly = (1.0 - (4.0 / (3.0 * math.pi)) * x + 0.125 * x ** 2
            - (4.0 / (45.0 * math.pi)) * x ** 3 + x ** 4 / 48.0)
    expo = -((params.q * at) ** 2) / 8.0
    gauss = np.where(expo < -700.0, 0.0, np.exp(np.maximum(expo, -700.0)))
    out = poly * gauss
    return float(out) if np.isscalar(t) else out


def ellipse_semiaxes(params: KernelParams) -> tuple[float, float]:
    """Support half-widths of the uniform spectral density of the projected
    Liouvillian: (imaginary-part semiaxis, real-part semiaxis) = (p, q)."""
    if params.aad <= 0:
        raise ValueError("<AA+> must be positive")
    return params.p, params.q
