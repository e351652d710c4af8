"""Scalar observables of the impurity's 2x2 reduced density matrix."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["DensityMatrix2", "entropy", "spin_components"]

_PURE_DET_FLOOR = 1e-15


@dataclass
class DensityMatrix2:
    """Reduced density of a two-level system in the (excited, ground) basis.

    rho01 is implicitly conj(rho10).
    """
    rho11: float
    rho00: float
    rho10: complex

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "DensityMatrix2":
        return cls(rho11=float(m[0, 0].real), rho00=float(m[1, 1].real),
                   rho10=complex(m[0, 1]))

    def matrix(self) -> np.ndarray:
        return np.array([[self.rho11, self.rho10],
                         [np.conj(self.rho10), self.rho00]], dtype=complex)

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho00

    @property
    def det(self) -> float:
        return self.rho11 * self.rho00 - abs(self.rho10) ** 2

    def eigenvalues(self) -> tuple[float, float]:
        t, d = self.trace, self.det
        s = math.sqrt(max(t * t - 4 * d, 0.0))
        return (t - s) / 2, (t + s) / 2


def entropy(rho: DensityMatrix2) -> float:
    """Von Neumann entropy -Tr(rho log rho), natural logarithm.

    Uses the closed form in the determinant,
    S = -(1/2) [log d + s log((1+s)/(1-s))] with s = sqrt(1 - 4 d),
    valid for a unit-trace 2x2 density. d is clamped into [0, 1/4] so
    roundoff at purity or maximal mixing cannot produce NaN; densities with
    d below 1e-15 are reported as exactly pure (S = 0).
    """
    d = rho.det
    if d < _PURE_DET_FLOOR:
        return 0.0
    d = min(d, 0.25)
    s = math.sqrt(max(1.0 - 4.0 * d, 0.0))
    if s == 0.0:
        return math.log(2.0)
    return -0.5 * (math.log(d) + s * math.log((1.0 + s) / (1.0 - s)))


def spin_components(rho: DensityMatrix2) -> tuple[float, float, float]:
    """Expectations (X, Y, Z) of the impurity spin components."""
    x = 2.0 * rho.rho10.real
    y = -2.0 * rho.rho10.imag
    z = rho.rho11 - rho.rho00
    return x, y, z
