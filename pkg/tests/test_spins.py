import numpy as np
import pytest

from spinbath import (ModelParams, PureState, apply_bath_hamiltonian,
                      apply_hamiltonian, apply_sigma, debye_frequencies,
                      partial_trace_system)

from conftest import (SX, SY, SZ, dense_bath_hamiltonian,
                      dense_full_hamiltonian, dense_op, random_state)


def make_params(n_s, **kw):
    defaults = dict(omega0=0.8288, beta=0.01, lambda0=1.0, lam=2.0,
                    kT=0.02, n_eig=min(4, 2 ** n_s))
    defaults.update(kw)
    return ModelParams(n_s=n_s, omegas=tuple(debye_frequencies(n_s)), **defaults)


class TestApplySigma:
    def test_single_qubit_x_swaps(self):
        state = PureState(np.array([1.0, 2.0j]))
        out = apply_sigma(state, "x", 0)
        assert np.array_equal(out.amplitudes, np.array([2.0j, 1.0]))

    def test_x_is_involution(self, rng):
        state = PureState(random_state(3, rng))
        twice = apply_sigma(apply_sigma(state, "x", 1), "x", 1)
        assert np.array_equal(twice.amplitudes, state.amplitudes)

    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_involution_all_axes(self, rng, axis, k):
        state = PureState(random_state(3, rng))
        twice = apply_sigma(apply_sigma(state, axis, k), axis, k)
        assert np.abs(twice.amplitudes - state.amplitudes).max() < 1e-15

    def test_sigma_algebra_phase(self, rng):
        # y then z then x at one site composes to i * identity
        state = PureState(random_state(3, rng))
        xzy = apply_sigma(apply_sigma(apply_sigma(state, "y", 1), "z", 1), "x", 1)
        assert np.abs(xzy.amplitudes - 1j * state.amplitudes).max() < 1e-15
        # dense cross-check of the same composition
        composed = dense_op(SX, 1, 3) @ dense_op(SZ, 1, 3) @ dense_op(SY, 1, 3)
        assert np.abs(composed @ state.amplitudes - 1j * state.amplitudes).max() < 1e-14

    @pytest.mark.parametrize("axis,dense", [("x", SX), ("y", SY), ("z", SZ)])
    def test_matches_dense(self, rng, axis, dense):
        state = PureState(random_state(3, rng))
        for k in range(3):
            out = apply_sigma(state, axis, k)
            expect = dense_op(dense, k, 3) @ state.amplitudes
            assert np.abs(out.amplitudes - expect).max() < 1e-14

    def test_index_out_of_range(self):
        state = PureState(np.array([1.0, 0.0]))
        with pytest.raises(IndexError):
            apply_sigma(state, "x", 1)


class TestApplyHamiltonian:
    def test_diagonal_eigenstate(self):
        params = make_params(3, beta=0.0, lambda0=0.0, lam=0.0)
        state = PureState.basis_state(4, 2 ** 4 - 1)  # every bit set
        out = apply_hamiltonian(state, params)
        energy = params.omega0 / 2 + sum(params.omegas) / 2
        assert np.abs(out.amplitudes - energy * state.amplitudes).max() < 1e-14

    def test_matches_dense_n2(self, rng):
        params = make_params(2)
        state = PureState(random_state(3, rng))
        out = apply_hamiltonian(state, params)
        expect = dense_full_hamiltonian(params) @ state.amplitudes
        assert np.abs(out.amplitudes - expect).max() < 1e-12

    def test_matches_dense_n3(self, rng):
        params = make_params(3, lam=4.0)
        state = PureState(random_state(4, rng))
        out = apply_hamiltonian(state, params)
        expect = dense_full_hamiltonian(params) @ state.amplitudes
        assert np.abs(out.amplitudes - expect).max() < 1e-12

    def test_hermiticity_matrix_free(self, rng):
        params = make_params(6)
        phi = PureState(random_state(7, rng))
        psi = PureState(random_state(7, rng))
        lhs = np.vdot(phi.amplitudes, apply_hamiltonian(psi, params).amplitudes)
        rhs = np.conj(np.vdot(psi.amplitudes, apply_hamiltonian(phi, params).amplitudes))
        assert abs(lhs - rhs) < 1e-12

    def test_linearity(self, rng):
        params = make_params(4)
        a, b = 0.3 - 1.1j, -0.7 + 0.2j
        psi = random_state(5, rng)
        phi = random_state(5, rng)
        combined = apply_hamiltonian(PureState(a * psi + b * phi), params)
        separate = (a * apply_hamiltonian(PureState(psi), params).amplitudes
                    + b * apply_hamiltonian(PureState(phi), params).amplitudes)
        assert np.abs(combined.amplitudes - separate).max() < 1e-12

    def test_dimension_mismatch(self, rng):
        params = make_params(3)
        with pytest.raises(ValueError):
            apply_hamiltonian(PureState(random_state(3, rng)), params)


class TestApplyBathHamiltonian:
    def test_diagonal_eigenstate(self):
        params = make_params(3, beta=0.0, lam=0.0)
        state = PureState.basis_state(3, 7)
        out = apply_bath_hamiltonian(state, params)
        energy = sum(params.omegas) / 2
        assert np.abs(out.amplitudes - energy * state.amplitudes).max() < 1e-14

    def test_matches_dense_n3(self, rng):
        params = make_params(3, lam=2.0)
        state = PureState(random_state(3, rng))
        out = apply_bath_hamiltonian(state, params)
        expect = dense_bath_hamiltonian(params) @ state.amplitudes
        assert np.abs(out.amplitudes - expect).max() < 1e-12

    def test_ground_energy_vs_dense(self):
        params = ModelParams(n_s=2, omegas=(0.5, 0.8), beta=0.01, lam=2.0,
                             n_eig=4, kT=0.02)
        dense = dense_bath_hamiltonian(params)
        expect = np.linalg.eigvalsh(dense)[0]
        # power-iterate the shifted operator to find the ground state
        from spinbath.bath import lowest_eigenpairs
        from spinbath.spins import bath_action
        energies, _ = lowest_eigenpairs(bath_action(params), 4, 1)
        assert abs(energies[0] - expect) < 1e-10


class TestPartialTrace:
    def test_product_excited(self):
        bath_part = np.zeros(4, dtype=complex)
        bath_part[2] = 1.0
        amps = np.concatenate([np.zeros(4, dtype=complex), bath_part])
        rho = partial_trace_system(PureState(amps))
        assert rho.rho11 == pytest.approx(1.0)
        assert rho.rho00 == pytest.approx(0.0)
        assert rho.rho10 == pytest.approx(0.0)

    def test_bell_like(self):
        n_bath = 3
        amps = np.zeros(2 ** (n_bath + 1), dtype=complex)
        amps[2 ** n_bath] = 1 / np.sqrt(2)        # |1>|0...0>
        amps[2 ** n_bath - 1] = 1 / np.sqrt(2)    # |0>|1...1>
        rho = partial_trace_system(PureState(amps))
        assert rho.rho11 == pytest.approx(0.5)
        assert rho.rho00 == pytest.approx(0.5)
        assert abs(rho.rho10) < 1e-15

    def test_matches_dense(self, rng):
        psi = random_state(3, rng)
        rho = partial_trace_system(PureState(psi))
        proj = np.outer(psi, psi.conj())
        # impurity = bit 2: reshape to (sys, bath, sys, bath) and trace bath
        dense = np.einsum("sbtb->st", proj.reshape(2, 4, 2, 4))
        # dense index 0 = impurity down; rho11 is the (1,1) entry
        assert rho.rho11 == pytest.approx(dense[1, 1].real, abs=1e-14)
        assert rho.rho00 == pytest.approx(dense[0, 0].real, abs=1e-14)
        assert rho.rho10 == pytest.approx(dense[1, 0], abs=1e-14)

    def test_trace_equals_norm_and_psd(self, rng):
        psi = 2.5 * random_state(4, rng)
        rho = partial_trace_system(PureState(psi))
        assert rho.trace == pytest.approx(np.linalg.norm(psi) ** 2, rel=1e-12)
        assert rho.det >= -1e-12
        assert abs(rho.rho10 - np.conj(np.conj(rho.rho10))) == 0.0
