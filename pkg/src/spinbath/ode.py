"""Fixed-step eighth-order Runge-Kutta integration over flat real state vectors.

The tableau is the 13-stage Prince-Dormand RK8(7)13M scheme (P. J. Prince and
J. R. Dormand, J. Comp. Appl. Math. 7 (1981) 67, Table 2), of which only the
eighth-order weights are used here; there is no embedded error estimate and no
step-size control. The published rational coefficients satisfy the row-sum and
quadrature order conditions to ~1e-18, well below double precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = ["FlatSystem", "rk8_step", "integrate", "N_STAGES", "imag_stability_limit"]

N_STAGES = 13

C = np.array([
    0.0, 1 / 18, 1 / 12, 1 / 8, 5 / 16, 3 / 8, 59 / 400, 93 / 200,
    5490023248 / 9719169821, 13 / 20, 1201146811 / 1299019798, 1.0, 1.0,
])

A = np.zeros((13, 13))
A[1, 0] = 1 / 18
A[2, :2] = [1 / 48, 1 / 16]
A[3, 0] = 1 / 32
A[3, 2] = 3 / 32
A[4, 0] = 5 / 16
A[4, 2:4] = [-75 / 64, 75 / 64]
A[5, 0] = 3 / 80
A[5, 3:5] = [3 / 16, 3 / 20]
A[6, 0] = 29443841 / 614563906
A[6, 3:6] = [77736538 / 692538347, -28693883 / 1125000000, 23124283 / 1800000000]
A[7, 0] = 16016141 / 946692911
A[7, 3:7] = [61564180 / 158732637, 22789713 / 633445777,
             545815736 / 2771057229, -180193667 / 1043307555]
A[8, 0] = 39632708 / 573591083
A[8, 3:8] = [-433636366 / 683701615, -421739975 / 2616292301, 100302831 / 723423059,
             790204164 / 839813087, 800635310 / 3783071287]
A[9, 0] = 246121993 / 1340847787
A[9, 3:9] = [-37695042795 / 15268766246, -309121744 / 1061227803, -12992083 / 490766935,
             6005943493 / 2108947869, 393006217 / 1396673457, 123872331 / 1001029789]
A[10, 0] = -1028468189 / 846180014
A[10, 3:10] = [8478235783 / 508512852, 1311729495 / 1432422823, -10304129995 / 1701304382,
               -48777925059 / 3047939560, 15336726248 / 1032824649,
               -45442868181 / 3398467696, 3065993473 / 597172653]
A[11, 0] = 185892177 / 718116043
A[11, 3:11] = [-3185094517 / 667107341, -477755414 / 1098053517, -703635378 / 230739211,
               5731566787 / 1027545527, 5232866602 / 850066563, -4093664535 / 808688257,
               3962137247 / 1805957418, 65686358 / 487910083]
A[12, 0] = 403863854 / 491063109
A[12, 3:11] = [-5068492393 / 434740067, -411421997 / 543043805, 652783627 / 914296604,
               11173962825 / 925320556, -13158990841 / 6184727034, 3936647629 / 1978049680,
               -160528059 / 685178525, 248638103 / 1413531060]

B = np.array([
    14005451 / 335480064, 0.0, 0.0, 0.0, 0.0, -59238493 / 1068277825,
    181606767 / 758867731, 561292985 / 797845732, -1041891430 / 1371343529,
    760417239 / 1151165299, 118820643 / 751138087, -528747749 / 2220607170, 1 / 4,
])


def imag_stability_limit() -> float:
    """Largest y such that |R(iy)| <= 1 for the linear stability function.

    Callers picking substep counts for oscillatory systems should stay below
    this (the value is about 3.70 for this tableau).
    """
    eye = np.eye(N_STAGES)
    ones = np.ones(N_STAGES)

    def amp(y):
        z = 1j * y
        return abs(1 + z * (B @ np.linalg.solve(eye - z * A, ones)))

    lo, hi = 3.0, 4.5
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if amp(mid) <= 1.0:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class FlatSystem:
    """A first-order ODE system over a flat real vector.

    ``rhs(t, y)`` must be deterministic, side-effect free with respect to the
    integrator state, and return an array of length ``dimension``.
    """
    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]


def _step(rhs, t, y, h, k):
    # overflow from a diverging rhs is caught by the isfinite check afterwards
    with np.errstate(invalid="ignore", over="ignore"):
        k[0] = rhs(t, y)
        for i in range(1, N_STAGES):
            k[i] = rhs(t + C[i] * h, y + h * (A[i, :i] @ k[:i]))
        return y + h * (B @ k)


def rk8_step(system: FlatSystem, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """Advance one step of size h; raises on non-finite results."""
    if h <= 0:
        raise ValueError("step size must be positive")
    k = np.empty((N_STAGES, system.dimension))
    y_next = _step(system.rhs, t, y, h, k)
    if not np.all(np.isfinite(y_next)):
        raise FloatingPointError(f"non-finite state after step at t={t!r}")
    return y_next


def integrate(
    system: FlatSystem,
    t0: float,
    y0: np.ndarray,
    t_max: float,
    h: float,
    observer: Optional[Callable[[float, np.ndarray], None]] = None,
) -> np.ndarray:
    """Integrate from t0 to t_max with fixed step h.

    The observer is called after every step with (t, y); the final step is
    shortened so the integration lands on t_max exactly.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    span = t_max - t0
    if span <= 0:
        raise ValueError("t_max must exceed t0")
    n_steps = int(np.ceil(span / h - 1e-9))
    k = np.empty((N_STAGES, system.dimension))
    y = np.array(y0, dtype=float, copy=True)
    t = t0
    for i in range(n_steps):
        t_next = t_max if i == n_steps - 1 else t0 + (i + 1) * h
        y = _step(system.rhs, t, y, t_next - t, k)
        if not np.all(np.isfinite(y)):
            raise FloatingPointError(f"non-finite state after step at t={t!r}")
        t = t_next
        if observer is not None:
            observer(t, y)
    return y
