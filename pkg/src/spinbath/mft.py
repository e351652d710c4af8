"""Mean-field master-equation solvers.

The memory integral is removed by an auxiliary field chi(t, u) sampled on a
one-dimensional grid in the lag variable u; the convolution then turns into
an advection equation with a source and a damping term, integrated together
with the 2x2 density by the shared fixed-step RK8. A direct-quadrature
solver (explicit trapezoid memory sum with a Heun predictor-corrector) is
kept alongside as a slow reference oracle for the grid method.

Grid layout: u_j = (n - l - j) * dt for j = 1..n with l = floor(0.338 n),
stored in that (descending) order. The span has length n*dt, reaches down to
-l*dt, and contains u = 0 exactly, which is where the density equation reads
the field. The damping e^{-g u^2} with g = 11 / ((n-l) dt)^2 suppresses the
field near the grid ends so no boundary condition is imposed there.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import ode
from .exact import ReducedTrajectory
from .kernel import KernelParams, memory_function
from .observables import DensityMatrix2
from .spins import ModelParams

__all__ = [
    "AuxGrid",
    "MftState",
    "build_grid",
    "dvr_derivative",
    "mft_rhs",
    "solve_mft",
    "solve_mft_quadrature",
]

_TRACE_DRIFT_LIMIT = 1e-6


@dataclass
class AuxGrid:
    """Uniform lag grid with damping values and the spectral derivative."""
    n: int
    l: int
    dt: float
    u: np.ndarray
    g: float
    f: np.ndarray
    D: np.ndarray
    index0: int


def dvr_derivative(u: np.ndarray) -> np.ndarray:
    """First-derivative matrix on a uniform grid (truncated sinc basis):
    D_jk = (-1)^(j-k) / (h (j-k)) off the diagonal, zero on it, with h the
    signed grid spacing u[1] - u[0]. Exactly antisymmetric."""
    n = len(u)
    h = u[1] - u[0]
    j = np.arange(n)
    diff = j[:, None] - j[None, :]
    with np.errstate(divide="ignore"):
        d = np.where(diff == 0, 0.0, 1.0 / (h * np.where(diff == 0, 1, diff)))
    signs = np.where((np.abs(diff) % 2) == 1, -1.0, 1.0)
    np.fill_diagonal(signs, 0.0)
    return signs * d


def build_grid(n: int, dt: float) -> AuxGrid:
    """Lag grid of n points with spacing dt; see the module docstring."""
    if n < 8:
        raise ValueError("grid needs at least 8 points")
    if dt <= 0:
        raise ValueError("dt must be positive")
    l = int(np.floor(0.338 * n))
    j = np.arange(1, n + 1)
    u = (n - l - j) * dt
    g = 11.0 / ((n - l) * dt) ** 2
    f = np.exp(-g * u ** 2)
    return AuxGrid(n=n, l=l, dt=dt, u=u, g=g, f=f, D=dvr_derivative(u),
                   index0=n - l - 1)


@dataclass
class MftState:
    """Density plus auxiliary field samples chi(t, u_j), each 2x2 complex."""
    rho: np.ndarray
    chi: np.ndarray


def _sigma_x_conjugate(m: np.ndarray) -> np.ndarray:
    # sigma_x M sigma_x just swaps both indices in the 2x2 basis
    return m[::-1, ::-1]


def _system_hamiltonian(params: ModelParams, sigma_x_mean: float) -> np.ndarray:
    beta_eff = params.beta + params.lambda0 * sigma_x_mean
    return np.array([[0.5 * params.omega0, beta_eff],
                     [beta_eff, -0.5 * params.omega0]], dtype=complex)


def _rhs_parts(rho, chi, htilde, two_c, fw, two_gu, d_mat, index0):
    chi0 = chi[index0]
    drho = -1j * (htilde @ rho - rho @ htilde) \
        - two_c * (chi0 - _sigma_x_conjugate(chi0))
    dchi = fw[:, None, None] * rho[None, :, :] \
        + np.tensordot(d_mat, chi, axes=(1, 0)) \
        + two_gu[:, None, None] * chi
    return drho, dchi


def mft_rhs(
    state: MftState,
    params: ModelParams,
    stats: tuple[float, float],
    kparams: KernelParams,
    grid: AuxGrid,
):
    """Time derivatives (drho/dt, dchi/dt) of the coupled field equations."""
    mean, var = stats
    htilde = _system_hamiltonian(params, mean)
    two_c = 2.0 * params.lambda0 ** 2 * var
    fw = grid.f * memory_function(kparams, grid.u)
    two_gu = 2.0 * grid.g * grid.u
    return _rhs_parts(state.rho, state.chi, htilde, two_c, fw, two_gu,
                      grid.D, grid.index0)


def _record_steps(t_max, dt, dt_out):
    if dt_out is None:
        dt_out = dt
    every = int(round(dt_out / dt))
    if every < 1 or abs(every * dt - dt_out) > 1e-9 * dt:
        raise ValueError("dt_out must be a positive integer multiple of dt")
    return every


def solve_mft(
    params: ModelParams,
    stats: tuple[float, float],
    kparams: KernelParams,
    grid: AuxGrid,
    t_max: float,
    dt: float,
    dt_out: Optional[float] = None,
) -> ReducedTrajectory:
    """Integrate the field equations from the excited pure state.

    chi(0, u) vanishes (the memory integral is empty at t = 0). The density
    is recorded every dt_out; trace drift beyond 1e-6 aborts.
    """
    every = _record_steps(t_max, dt, dt_out)
    mean, var = stats
    htilde = _system_hamiltonian(params, mean)
    two_c = 2.0 * params.lambda0 ** 2 * var
    fw = grid.f * memory_function(kparams, grid.u)
    two_gu = 2.0 * grid.g * grid.u
    n = grid.n

    def rhs(t, y):
        rho = y[:8].view(complex).reshape(2, 2)
        chi = y[8:].view(complex).reshape(n, 2, 2)
        drho, dchi = _rhs_parts(rho, chi, htilde, two_c, fw, two_gu,
                                grid.D, grid.index0)
        out = np.empty_like(y)
        out[:8] = drho.reshape(-1).view(float)
        out[8:] = dchi.reshape(-1).view(float)
        return out

    y0 = np.zeros(8 * (n + 1))
    rho0 = y0[:8].view(complex).reshape(2, 2)
    rho0[0, 0] = 1.0

    times = [0.0]
    densities = [DensityMatrix2(rho11=1.0, rho00=0.0, rho10=0j)]
    counter = {"step": 0}

    def observe(t, y):
        counter["step"] += 1
        rho = y[:8].view(complex).reshape(2, 2)
        drift = abs(rho[0, 0].real + rho[1, 1].real - 1.0)
        if drift > _TRACE_DRIFT_LIMIT:
            raise RuntimeError(
                f"density trace drifted by {drift:.3e} at t={t:g}; "
                "the field-grid integration is unstable at this dt")
        if counter["step"] % every == 0:
            times.append(t)
            densities.append(DensityMatrix2(rho11=float(rho[0, 0].real),
                                            rho00=float(rho[1, 1].real),
                                            rho10=complex(rho[0, 1])))

    system = ode.FlatSystem(8 * (n + 1), rhs)
    ode.integrate(system, 0.0, y0, t_max, dt, observer=observe)
    return ReducedTrajectory(np.array(times), densities)


def solve_mft_quadrature(
    params: ModelParams,
    stats: tuple[float, float],
    kparams: KernelParams,
    t_max: float,
    dt: float,
    dt_out: Optional[float] = None,
) -> ReducedTrajectory:
    """Reference solver: trapezoid quadrature over the stored density
    history with a second-order Heun predictor-corrector step. O(steps^2);
    intended for validation runs of modest length."""
    every = _record_steps(t_max, dt, dt_out)
    mean, var = stats
    htilde = _system_hamiltonian(params, mean)
    two_c = 2.0 * params.lambda0 ** 2 * var
    n_steps = int(round(t_max / dt))
    if abs(n_steps * dt - t_max) > 1e-9 * dt or n_steps < 1:
        raise ValueError("t_max must be a positive integer multiple of dt")
    w_nodes = memory_function(kparams, dt * np.arange(n_steps + 1))

    def unitary(rho):
        return -1j * (htilde @ rho - rho @ htilde)

    def dissip(rho):
        return rho - _sigma_x_conjugate(rho)

    g_hist = np.empty((n_steps + 1, 2, 2), dtype=complex)
    rho = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    g_hist[0] = dissip(rho)

    times = [0.0]
    densities = [DensityMatrix2(rho11=1.0, rho00=0.0, rho10=0j)]

    def memory_sum(k, w, g_latest):
        # trapezoid over t' in [0, k dt] with the current endpoint g_latest
        if k == 0:
            return np.zeros((2, 2), dtype=complex)
        weights = w[k::-1].copy()
        weights[0] *= 0.5
        weights[-1] *= 0.5
        total = np.tensordot(weights[:-1], g_hist[:k], axes=(0, 0))
        total += weights[-1] * g_latest
        return dt * total

    for k in range(n_steps):
        f0 = unitary(rho) - two_c * memory_sum(k, w_nodes, g_hist[k])
        rho_pred = rho + dt * f0
        f1 = unitary(rho_pred) - two_c * memory_sum(k + 1, w_nodes, dissip(rho_pred))
        rho = rho + 0.5 * dt * (f0 + f1)
        g_hist[k + 1] = dissip(rho)
        t = (k + 1) * dt
        drift = abs(rho[0, 0].real + rho[1, 1].real - 1.0)
        if drift > _TRACE_DRIFT_LIMIT:
            raise RuntimeError(f"density trace drifted by {drift:.3e} at t={t:g}")
        if (k + 1) % every == 0:
            times.append(t)
            densities.append(DensityMatrix2(rho11=float(rho[0, 0].real),
                                            rho00=float(rho[1, 1].real),
                                            rho10=complex(rho[0, 1])))
    return ReducedTrajectory(np.array(times), densities)
