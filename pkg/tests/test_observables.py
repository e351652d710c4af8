import math

import numpy as np
import pytest

from spinbath import DensityMatrix2, entropy, spin_components


def random_density(rng) -> DensityMatrix2:
    # random pure + mixing keeps the matrix a valid unit-trace density
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v /= np.linalg.norm(v)
    w = rng.random()
    m = w * np.outer(v, v.conj()) + (1 - w) * np.eye(2) / 2
    return DensityMatrix2.from_matrix(m)


class TestEntropy:
    def test_maximally_mixed(self):
        rho = DensityMatrix2(rho11=0.5, rho00=0.5, rho10=0j)
        assert entropy(rho) == pytest.approx(math.log(2.0), abs=1e-14)

    def test_pure_state(self):
        rho = DensityMatrix2(rho11=1.0, rho00=0.0, rho10=0j)
        assert entropy(rho) == 0.0
        coherent = DensityMatrix2(rho11=0.5, rho00=0.5, rho10=0.5 + 0j)
        assert entropy(coherent) == 0.0

    def test_three_quarters(self):
        rho = DensityMatrix2(rho11=0.75, rho00=0.25, rho10=0j)
        expect = -(0.75 * math.log(0.75) + 0.25 * math.log(0.25))
        assert entropy(rho) == pytest.approx(expect, abs=1e-12)
        assert entropy(rho) == pytest.approx(0.562335, abs=1e-6)

    def test_closed_form_equals_eigenvalue_sum(self, rng):
        for _ in range(200):
            rho = random_density(rng)
            lo, hi = rho.eigenvalues()
            expect = 0.0
            for lam in (lo, hi):
                if lam > 1e-15:
                    expect -= lam * math.log(lam)
            assert entropy(rho) == pytest.approx(expect, abs=1e-12)

    def test_monotone_in_det(self):
        dets = np.linspace(1e-12, 0.25, 400)
        values = []
        for d in dets:
            lam = (1 - math.sqrt(1 - 4 * d)) / 2
            rho = DensityMatrix2(rho11=1 - lam, rho00=lam, rho10=0j)
            values.append(entropy(rho))
        assert np.all(np.diff(values) > 0)

    def test_roundoff_above_quarter_is_clamped(self):
        rho = DensityMatrix2(rho11=0.5 + 1e-13, rho00=0.5 - 1e-13, rho10=0j)
        assert entropy(rho) <= math.log(2.0)
        assert entropy(rho) == pytest.approx(math.log(2.0), abs=1e-10)


class TestSpinComponents:
    def test_excited(self):
        rho = DensityMatrix2(rho11=1.0, rho00=0.0, rho10=0j)
        assert spin_components(rho) == (0.0, 0.0, 1.0)

    def test_maximally_mixed(self):
        rho = DensityMatrix2(rho11=0.5, rho00=0.5, rho10=0j)
        assert spin_components(rho) == (0.0, 0.0, 0.0)

    def test_coherence_quarter(self):
        rho = DensityMatrix2(rho11=0.5, rho00=0.5, rho10=(1 - 1j) / 4)
        x, y, z = spin_components(rho)
        assert x == pytest.approx(0.5)
        assert y == pytest.approx(0.5)
        assert z == pytest.approx(0.0)

    def test_matches_trace_formulas(self, rng):
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
        sz = np.array([[1, 0], [0, -1]], dtype=complex)
        for _ in range(50):
            rho = random_density(rng)
            m = rho.matrix()
            x, y, z = spin_components(rho)
            assert x == pytest.approx(np.trace(sx @ m).real, abs=1e-14)
            assert y == pytest.approx(np.trace(sy @ m).real, abs=1e-14)
            assert z == pytest.approx(np.trace(sz @ m).real, abs=1e-14)

    def test_bloch_norm_bounded(self, rng):
        for _ in range(200):
            rho = random_density(rng)
            x, y, z = spin_components(rho)
            assert x * x + y * y + z * z <= 1.0 + 1e-10
