"""Thermal-ensemble Schrodinger propagation of the full register and
assembly of the exact reduced-density trajectory.

Each thermally populated environment eigenstate |m> seeds one pure-state
trajectory |1> (x) |m>; the reduced density is the weight-averaged partial
trace over those trajectories. Trajectories are independent, so they may run
in worker processes; partial sums are always reduced in ascending m order so
the output is bit-identical regardless of worker scheduling.

The integrator step is the shared fixed-step RK8. Strong intra-environment
coupling makes the Hamiltonian stiff (spectral radius grows like
lam * n_s**2 / 2), so each output step of size dt is internally divided into
enough substeps to keep dt_sub * |H| inside the scheme's imaginary-axis
stability interval.
"""
from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import ode
from .bath import BathEnsemble
from .observables import DensityMatrix2
from .spins import ModelParams, PureState, hamiltonian_action, hamiltonian_norm_bound, partial_trace_system

__all__ = [
    "ReducedTrajectory",
    "propagate_schrodinger",
    "thermal_reduced_density",
    "free_spin_trajectory",
    "stable_substeps",
]

# imaginary-axis stability boundary of the RK8 tableau is ~3.70; stay below
_Z_SAFE = 3.5

_NORM_DRIFT_LIMIT = 1e-6


@dataclass
class ReducedTrajectory:
    """Reduced 2x2 densities sampled on a uniform time grid."""
    times: np.ndarray
    densities: list[DensityMatrix2]

    def observables(self):
        """Arrays (S, X, Y, Z) evaluated along the trajectory."""
        from .observables import entropy, spin_components

        s = np.array([entropy(r) for r in self.densities])
        xyz = np.array([spin_components(r) for r in self.densities])
        return s, xyz[:, 0], xyz[:, 1], xyz[:, 2]


def stable_substeps(params: ModelParams, dt: float) -> int:
    """Substeps per output step keeping the propagation linearly stable."""
    return max(1, int(np.ceil(dt * hamiltonian_norm_bound(params) / _Z_SAFE)))


def propagate_schrodinger(
    state0: PureState,
    params: ModelParams,
    t_max: float,
    dt: float,
    observer: Optional[Callable[[float, PureState], None]] = None,
    substeps: Optional[int] = None,
) -> PureState:
    """Integrate d|psi>/dt = -i H |psi| from t=0 to t_max.

    The observer is invoked after every accepted step of size dt with
    (t, state); the state passed to it aliases the integration buffer and
    must be copied if retained. Norm drift beyond 1e-6 aborts: it indicates
    the step is too large for the spectral radius of H.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if state0.n_qubits != params.n_qubits:
        raise ValueError("state does not match the model register")
    if substeps is None:
        substeps = stable_substeps(params, dt)

    h_mul = hamiltonian_action(params)
    n = state0.amplitudes.shape[0]
    work = np.empty(n, dtype=complex)

    def rhs(t, y):
        psi = y.view(complex)
        h_mul(psi, work)
        np.multiply(work, -1j, out=work)
        return work.view(float)

    system = ode.FlatSystem(2 * n, rhs)
    n_outer = int(np.ceil(t_max / dt - 1e-9))
    y = state0.amplitudes.astype(complex).view(float).copy()
    t = 0.0
    for i in range(n_outer):
        t_next = t_max if i == n_outer - 1 else (i + 1) * dt
        y = ode.integrate(system, t, y, t_next, (t_next - t) / substeps)
        t = t_next
        psi = y.view(complex)
        drift = abs(np.linalg.norm(psi) - state0.norm())
        if drift > _NORM_DRIFT_LIMIT:
            raise RuntimeError(
                f"norm drifted by {drift:.3e} at t={t:g}; the step dt={dt:g} with "
                f"{substeps} substeps is too large for this Hamiltonian")
        if observer is not None:
            observer(t, PureState(psi, params.n_qubits))
    return PureState(y.view(complex).copy(), params.n_qubits)


def _embed_excited(bath_vec: np.ndarray) -> PureState:
    """|1> (x) |m>: environment amplitudes fill the impurity-excited half."""
    dim = bath_vec.shape[0]
    amps = np.zeros(2 * dim, dtype=complex)
    amps[dim:] = bath_vec
    return PureState(amps)


def _reduced_trajectory_arrays(args):
    params, bath_vec, t_max, dt, record_every, substeps = args
    n_outer = int(np.ceil(t_max / dt - 1e-9))
    n_out = n_outer // record_every + 1
    r11 = np.empty(n_out)
    r00 = np.empty(n_out)
    r10 = np.empty(n_out, dtype=complex)
    state0 = _embed_excited(bath_vec)

    rho0 = partial_trace_system(state0)
    r11[0], r00[0], r10[0] = rho0.rho11, rho0.rho00, rho0.rho10
    counter = {"step": 0}

    def observe(t, state):
        counter["step"] += 1
        step = counter["step"]
        if step % record_every == 0:
            rho = partial_trace_system(state)
            k = step // record_every
            r11[k], r00[k], r10[k] = rho.rho11, rho.rho00, rho.rho10

    propagate_schrodinger(state0, params, t_max, dt, observer=observe, substeps=substeps)
    return r11, r00, r10


def thermal_reduced_density(
    params: ModelParams,
    bath: BathEnsemble,
    t_max: float,
    dt: float,
    dt_out: Optional[float] = None,
    workers: int = 1,
    substeps: Optional[int] = None,
) -> ReducedTrajectory:
    """Weight-averaged reduced density over the thermal trajectory ensemble.

    dt_out must be an integer multiple of dt (default: every step). With
    workers > 1 the per-m trajectories run in a process pool; the reduction
    over m is performed in ascending order either way.
    """
    if dt_out is None:
        dt_out = dt
    record_every = int(round(dt_out / dt))
    if record_every < 1 or abs(record_every * dt - dt_out) > 1e-9 * dt:
        raise ValueError("dt_out must be a positive integer multiple of dt")
    if substeps is None:
        substeps = stable_substeps(params, dt)

    jobs = [(params, bath.eigvecs[m], t_max, dt, record_every, substeps)
            for m in range(bath.n_eig)]
    if workers > 1 and len(jobs) > 1:
        ctx = multiprocessing.get_context("fork" if "fork" in multiprocessing.get_all_start_methods() else None)
        with ctx.Pool(min(workers, len(jobs))) as pool:
            results = pool.map(_reduced_trajectory_arrays, jobs, chunksize=1)
    else:
        results = [_reduced_trajectory_arrays(job) for job in jobs]

    n_outer = int(np.ceil(t_max / dt - 1e-9))
    n_out = n_outer // record_every + 1
    acc11 = np.zeros(n_out)
    acc00 = np.zeros(n_out)
    acc10 = np.zeros(n_out, dtype=complex)
    for m in range(bath.n_eig):
        p = bath.weights[m]
        r11, r00, r10 = results[m]
        acc11 += p * r11
        acc00 += p * r00
        acc10 += p * r10

    times = np.array([min(k * record_every * dt, t_max) for k in range(n_out)])
    densities = [DensityMatrix2(rho11=acc11[k], rho00=acc00[k], rho10=acc10[k])
                 for k in range(n_out)]
    return ReducedTrajectory(times, densities)


def free_spin_trajectory(omega0: float, beta: float, times: np.ndarray):
    """Closed-form evolution of the isolated impurity from the excited state.

    The Bloch vector precesses about (2*beta, 0, omega0) at the Rabi
    frequency Omega = sqrt(omega0**2 + 4 beta**2). Returns arrays (X, Y, Z).
    """
    t = np.asarray(times, dtype=float)
    omega_r = np.hypot(omega0, 2.0 * beta)
    if omega_r == 0.0:
        z = np.ones_like(t)
        return np.zeros_like(t), np.zeros_like(t), z
    c, s = np.cos(omega_r * t), np.sin(omega_r * t)
    x = (2.0 * beta * omega0 / omega_r ** 2) * (1.0 - c)
    y = -(2.0 * beta / omega_r) * s
    z = (omega0 ** 2 + 4.0 * beta ** 2 * c) / omega_r ** 2
    return x, y, z
