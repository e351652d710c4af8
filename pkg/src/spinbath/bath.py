"""Environment construction: frequency sampling, iterative eigensolution of
the isolated environment, thermal weights and canonical sigma_x statistics.

The eigensolver is a Lanczos iteration with full reorthogonalization and
thick restarts, driven entirely through a matrix-free Hamiltonian action.
Full reorthogonalization keeps the basis orthonormal to machine precision at
the dimensions used here (2**14), at the cost of one extra projection pass
per iteration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spins import ModelParams, bath_action, sigma_x_total_apply

__all__ = [
    "BathEnsemble",
    "ConvergenceError",
    "debye_frequencies",
    "lowest_eigenpairs",
    "boltzmann_weights",
    "canonical_sigma_x_stats",
    "build_bath_ensemble",
]


class ConvergenceError(RuntimeError):
    """Eigensolver ran out of its matrix-vector budget; carries the residuals
    achieved so far in ``residuals``."""

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = residuals


def debye_frequencies(n_s: int, omega_d: float = 1.0, seed: int | None = None) -> np.ndarray:
    """Sample n_s mode frequencies from the acoustic branch of a Debye
    spectrum, g(w) ~ w**2 below the cutoff omega_d.

    With seed=None the deterministic quantile rule w_j = omega_d *
    ((j - 1/2) / n_s)**(1/3) is used, which makes runs reproducible without
    any RNG state. With an integer seed, n_s uniform draws u from
    numpy's PCG64 generator are mapped through the inverse CDF
    omega_d * u**(1/3). Either way the result is sorted ascending.
    """
    if n_s < 1:
        raise ValueError("n_s must be at least 1")
    if omega_d <= 0:
        raise ValueError("omega_d must be positive")
    if seed is None:
        u = (np.arange(1, n_s + 1) - 0.5) / n_s
    else:
        u = np.sort(np.random.default_rng(seed).random(n_s))
    return omega_d * np.cbrt(u)


def lowest_eigenpairs(
    h_apply,
    dim: int,
    n_eig: int,
    tol: float = 1e-10,
    max_matvecs: int | None = None,
    max_basis: int | None = None,
    dtype=np.float64,
    seed: int = 12,
):
    """Lowest n_eig eigenpairs of a Hermitian operator given only its action.

    h_apply(vec, out) must write the operator product into out. Returns
    (energies, vectors) with energies ascending and vectors as rows of an
    (n_eig, dim) array, orthonormal, each with residual |H v - e v| <= tol.

    Lanczos with full reorthogonalization; when the basis reaches max_basis
    the n_eig + 10 lowest Ritz vectors are kept and iteration continues
    (thick restart). Exact breakdowns (invariant subspaces, degeneracies)
    are escaped by injecting a fresh random direction.
    """
    if n_eig > dim:
        raise ValueError("cannot request more eigenpairs than the dimension")
    if max_matvecs is None:
        max_matvecs = 500 * n_eig
    if max_basis is None:
        max_basis = min(dim, max(3 * n_eig, n_eig + 40))
    keep = max(n_eig, min(n_eig + 10, max_basis - 2))

    rng = np.random.default_rng(seed)
    real = not np.issubdtype(dtype, np.complexfloating)

    def random_vec():
        v = rng.standard_normal(dim)
        if not real:
            v = v + 1j * rng.standard_normal(dim)
        return v.astype(dtype)

    V = np.zeros((max_basis + 1, dim), dtype=dtype)
    T = np.zeros((max_basis + 1, max_basis + 1), dtype=dtype)
    v = random_vec()
    V[0] = v / np.linalg.norm(v)
    m = 1
    matvecs = 0
    w = np.empty(dim, dtype=dtype)
    beta = 0.0
    scale = None
    best_res = None

    while matvecs < max_matvecs:
        h_apply(V[m - 1], w)
        matvecs += 1
        # full reorthogonalization, two passes
        for _ in range(2):
            coeffs = V[:m].conj() @ w
            w -= coeffs.T @ V[:m]
            T[:m, m - 1] += coeffs.real if real else coeffs
        T[m - 1, :m] = T[:m, m - 1].conj()
        beta = float(np.linalg.norm(w))
        if scale is None:
            scale = max(np.abs(T[: m, m - 1]).max(), beta, 1e-30)

        if m >= n_eig:
            theta, S = np.linalg.eigh(T[:m, :m])
            res = beta * np.abs(S[m - 1, :n_eig])
            best_res = res
            if np.all(res <= 0.5 * tol):
                vecs = S[:, :n_eig].T @ V[:m]
                true_res = _residuals(h_apply, vecs, theta[:n_eig],
                                      np.empty(dim, dtype=dtype))
                matvecs += n_eig
                if np.all(true_res <= tol):
                    return theta[:n_eig].copy(), vecs
                best_res = true_res

        if m == max_basis:
            # thick restart: keep the lowest Ritz vectors, continue with w
            theta, S = np.linalg.eigh(T[:m, :m])
            Y = S[:, :keep].T @ V[:m]
            V[:keep] = Y
            T[:] = 0.0
            T[np.arange(keep), np.arange(keep)] = theta[:keep]
            m = keep

        if beta <= 1e-13 * scale:
            # invariant subspace found; inject a fresh direction
            w = random_vec()
            for _ in range(2):
                w -= (V[:m].conj() @ w).T @ V[:m]
            beta = float(np.linalg.norm(w))
            if beta <= 1e-13:
                raise ConvergenceError("cannot extend basis beyond invariant subspace",
                                       best_res)
        V[m] = w / beta
        m += 1

    raise ConvergenceError(
        f"eigensolver did not converge within {max_matvecs} matrix-vector products "
        f"(residuals {best_res})", best_res)


def _residuals(h_apply, vecs, theta, work):
    res = np.empty(len(theta))
    for i, (vec, th) in enumerate(zip(vecs, theta)):
        h_apply(vec, work)
        res[i] = np.linalg.norm(work - th * vec)
    return res


def boltzmann_weights(energies: np.ndarray, kT: float) -> np.ndarray:
    """Normalized thermal weights exp(-e_m/kT)/Z over the supplied levels.

    The lowest energy is subtracted before exponentiation so low kT cannot
    overflow; the weights of a uniform shift are exactly unchanged.
    """
    if kT <= 0:
        raise ValueError("kT must be positive")
    e = np.asarray(energies, dtype=float)
    w = np.exp(-(e - e.min()) / kT)
    return w / w.sum()


def canonical_sigma_x_stats(eigvecs: np.ndarray, weights: np.ndarray, n_s: int):
    """Thermal mean and variance of the collective sigma_x sum.

    Both moments are taken over the truncated ensemble with its renormalized
    weights: mean = sum_m p_m <m|Sx|m> and var = sum_m p_m <m|Sx^2|m> -
    mean**2, computed matrix-free. The per-state convexity of
    <Sx^2> >= <Sx>**2 keeps the variance nonnegative.
    """
    mean = 0.0
    second = 0.0
    work = np.empty(eigvecs.shape[1], dtype=eigvecs.dtype)
    for vec, p in zip(eigvecs, weights):
        sigma_x_total_apply(vec, n_s, work)
        mean += p * float(np.real(np.vdot(vec, work)))
        second += p * float(np.real(np.vdot(work, work)))
    return mean, second - mean ** 2


@dataclass
class BathEnsemble:
    """Lowest eigenpairs of the isolated environment with thermal weights
    and the derived canonical sigma_x statistics."""
    energies: np.ndarray
    eigvecs: np.ndarray
    weights: np.ndarray
    sigma_x_mean: float
    sigma_x_var: float

    @property
    def n_eig(self) -> int:
        return len(self.energies)


def build_bath_ensemble(
    params: ModelParams,
    tol: float = 1e-10,
    max_matvecs: int | None = None,
) -> BathEnsemble:
    """Diagonalize the isolated environment and assemble the thermal data."""
    energies, eigvecs = lowest_eigenpairs(
        bath_action(params), params.bath_dim, params.n_eig,
        tol=tol, max_matvecs=max_matvecs)
    weights = boltzmann_weights(energies, params.kT)
    mean, var = canonical_sigma_x_stats(eigvecs, weights, params.n_s)
    return BathEnsemble(energies, eigvecs, weights, mean, var)
